#include <CLI11.hpp>

#include <iostream>

#include "ellipnls/commands.hpp"
#include "ellipnls/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ellipnls: elliptic-function solution family of the cubic NLS equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::vector<std::string> overrides;

    for (const auto& name : ellipnls::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key-value config file");
        sub->add_option("--param", overrides, "override: key=value or section.key=value");
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        ellipnls::RunConfig cfg;
        if (!config_path.empty()) cfg = ellipnls::RunConfig::from_file(config_path);
        for (const auto& kv : overrides) cfg.apply_override(kv);
        cfg.out_dir = out_dir;
        return ellipnls::run_command(command, cfg, std::cout);
    } catch (const ellipnls::Error& e) {
        std::cerr << "error,ellipnls," << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error,internal," << e.what() << "\n";
        return 1;
    }
}
