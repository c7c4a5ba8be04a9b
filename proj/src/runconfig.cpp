#include "ellipnls/runconfig.hpp"

#include <charconv>
#include <fstream>

#include "ellipnls/errors.hpp"

namespace ellipnls {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line, section = "global";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("config parse error at line " + std::to_string(lineno));
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

void RunConfig::apply_override(const std::string& keyval) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos) throw InvalidInputError("bad --param (expect key=value)");
    std::string key = trim(keyval.substr(0, eq));
    const std::string value = trim(keyval.substr(eq + 1));
    std::string section = "global";
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        section = key.substr(0, dot);
        key = key.substr(dot + 1);
    }
    sections_[section][key] = value;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
    sections_[section][key] = value;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string RunConfig::get_str(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    const auto kit = it->second.find(key);
    return kit == it->second.end() ? fallback : kit->second;
}

double RunConfig::get(const std::string& section, const std::string& key, double fallback) const {
    const std::string s = get_str(section, key, "");
    if (s.empty()) return fallback;
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc())
        throw InvalidInputError("config value for " + section + "." + key + " is not a number");
    return v;
}

int RunConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
    const double v = get(section, key, static_cast<double>(fallback));
    return static_cast<int>(v);
}

SolutionParams RunConfig::params() const {
    SolutionParams p;
    p.a = get("global", "a", -1.0);
    p.c1 = get("global", "c1", -2.0);
    p.c2 = get("global", "c2", 0.4);
    p.c3 = get("global", "c3", 0.13);
    p.h0 = get("global", "h0", 0.0);
    p.f0 = get("global", "f0", 0.0);
    p.phi0 = get("global", "phi0", 0.0);
    return p;
}

}  // namespace ellipnls
