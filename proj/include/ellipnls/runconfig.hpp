#pragma once

#include <map>
#include <string>

#include "ellipnls/quartic.hpp"

namespace ellipnls {

/// Flat key-value config with one section per command; [global] holds the
/// solution parameters. Flags override file values.
class RunConfig {
public:
    RunConfig() = default;
    static RunConfig from_file(const std::string& path);

    /// "key=value" (global) or "section.key=value"
    void apply_override(const std::string& keyval);

    bool has(const std::string& section, const std::string& key) const;
    double get(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;

    SolutionParams params() const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    std::string out_dir = ".";

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace ellipnls
