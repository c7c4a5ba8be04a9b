#include "ellipnls/field.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ellipnls {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void write_meta(std::ofstream& out,
                const std::vector<std::pair<std::string, std::string>>& meta) {
    out << "# ellipnls 0.1.0\n";
    for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
}

double parse_double(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc()) {
        if (s == "nan") return std::nan("");
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw InvalidInputError("bad number in CSV: " + s);
    }
    return v;
}

}  // namespace

void SampledField::write_csv(const std::string& path) const {
    check_shape();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open for writing: " + path);
    write_meta(out, meta);
    out << (is_complex ? "t,z,re,im\n" : "t,z,value\n");
    for (std::size_t j = 0; j < z_grid.size(); ++j)
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const Complex v = at(i, j);
            out << format_double(t_grid[i]) << ',' << format_double(z_grid[j]) << ','
                << format_double(v.real());
            if (is_complex) out << ',' << format_double(v.imag());
            out << '\n';
        }
}

SampledField SampledField::read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open: " + path);
    SampledField f;
    std::string line;
    bool header_seen = false;
    std::vector<double> ts, zs;
    std::vector<Complex> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string k = line.substr(2, eq - 3);
                std::string v = line.substr(eq + 2);
                f.meta.emplace_back(k, v);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            f.is_complex = line.find(",im") != std::string::npos;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3) throw InvalidInputError("short CSV row");
        ts.push_back(parse_double(cells[0]));
        zs.push_back(parse_double(cells[1]));
        const double re = parse_double(cells[2]);
        const double im = (f.is_complex && cells.size() > 3) ? parse_double(cells[3]) : 0.0;
        vals.emplace_back(re, im);
    }
    // reconstruct the rectangular grids (rows are z-major)
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (k == 0 || zs[k] != zs[k - 1]) f.z_grid.push_back(zs[k]);
    }
    const std::size_t nt = ts.size() / std::max<std::size_t>(1, f.z_grid.size());
    f.t_grid.assign(ts.begin(), ts.begin() + nt);
    f.values = std::move(vals);
    f.check_shape();
    return f;
}

void write_curve_csv(const std::string& path, const std::string& xname, const std::string& yname,
                     const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<std::pair<std::string, std::string>>& meta) {
    if (x.size() != y.size()) throw InvalidInputError("curve arrays differ in length");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open for writing: " + path);
    write_meta(out, meta);
    out << xname << ',' << yname << '\n';
    for (std::size_t i = 0; i < x.size(); ++i)
        out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
}

void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& rows,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open for writing: " + path);
    write_meta(out, meta);
    out << "key,value\n";
    for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

}  // namespace ellipnls
