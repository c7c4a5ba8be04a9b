#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "ellipnls/errors.hpp"

namespace ellipnls {

using Complex = std::complex<double>;

/// Rectangular (t, z) grid of field values with provenance metadata.
/// values are row-major: values[iz * t_grid.size() + it].
struct SampledField {
    std::vector<double> t_grid;
    std::vector<double> z_grid;
    std::vector<Complex> values;
    bool is_complex = true;
    std::vector<std::pair<std::string, std::string>> meta;

    Complex at(std::size_t it, std::size_t iz) const { return values[iz * t_grid.size() + it]; }
    void check_shape() const {
        if (values.size() != t_grid.size() * z_grid.size())
            throw InvalidInputError("SampledField: grid/value shape mismatch");
    }

    /// columns: t,z,re,im (complex) or t,z,value (real)
    void write_csv(const std::string& path) const;
    static SampledField read_csv(const std::string& path);
};

/// shortest round-trip decimal formatting (deterministic across runs)
std::string format_double(double v);

void write_curve_csv(const std::string& path, const std::string& xname, const std::string& yname,
                     const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<std::pair<std::string, std::string>>& meta);

void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& rows,
                      const std::vector<std::pair<std::string, std::string>>& meta);

}  // namespace ellipnls
