#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ellipnls/physicality.hpp"
#include "ellipnls/solution.hpp"

namespace ellipnls {

/// Richardson-extrapolated central difference (fourth order): (4 D(h/2) - D(h)) / 3.
double richardson_central_derivative(const std::function<double(double)>& f, double x, double h);

struct GridSpec {
    double lo = 0, hi = 0;
    int n = 0;
};

struct ResidualReport {
    std::string equation;
    GridSpec grid_t, grid_z;        // grid_t unused for z-only residuals
    double max_abs = 0;
    double max_rel = 0;             // max_abs / (1 + max term magnitude)
    double loc_t = 0, loc_z = 0;    // location of the maximum
    double construction_error_floor = 0;
    long skipped_cells = 0;
};

/// |h_z^2 - R1(h)| over a z grid, h_z analytic.
ResidualReport residual_h(const HSolution& hs, GridSpec z_grid);

/// |f_t^2 - R2(f, z)| over a t grid at fixed z, f_t analytic.
ResidualReport residual_f(const FSolution& fs, double z, GridSpec t_grid);

/// |phi_z + 2 a h - c1| with phi_z by Richardson-extrapolated central differences.
ResidualReport residual_phase(const PhiSolution& ps, const HSolution& hs, GridSpec z_grid);

/// Riccati consistency Eq.: |f_z - sqrt(h) (c1 - a (3h + f^2))|, f_z by
/// Richardson-extrapolated central differences of the closed form in z.
/// Cells whose FD stencil leaves the admissible region are skipped and counted.
ResidualReport residual_riccati(const FSolution& fs, const HSolution& hs, GridSpec t_grid,
                                GridSpec z_grid, double floor_from_residual_f = 0.0);

struct CnlseResidual {
    ResidualReport real_part;  // maps to Eq. (3b) in the rotated frame
    ResidualReport imag_part;  // maps to Eq. (3a)
};

/// Full CNLSE residual i Psi_z + Psi_tt + a Psi |Psi|^2 on a uniform field,
/// fourth-order finite differences, rotated by e^{-i phi(z)} so the real/imag
/// split maps to the real/imag part equations. phi_cols has one entry per
/// z column. Throws ResolutionError when the estimated FD truncation exceeds
/// requested_tol.
CnlseResidual residual_cnlse(const std::vector<double>& t_grid, const std::vector<double>& z_grid,
                             const std::vector<Complex>& psi, double a,
                             const std::vector<double>& phi_cols, double requested_tol = 1e-3);

enum class OracleKind { h_curve, phi_curve };

struct OracleCurve {
    std::vector<double> z;
    std::vector<double> value;
    double period = 0;  // measured by turning-point detection; 0 when none found
};

/// Independent verification channel: adaptive RK integration of
/// h_zz = R1'(h)/2 from (h0, -slope_sign sqrt(R1(h0))) and quadrature of Eq. (6).
OracleCurve ode_oracle(const SolutionParams& p, OracleKind kind, double z_max, int n_samples,
                       double slope_sign = +1.0);

struct SearchRanges {
    double a_lo = -2, a_hi = 2;
    double c1_lo = -3, c1_hi = 3;
    double c2_lo = -1, c2_hi = 1;
    double c3_lo = 0, c3_hi = 1;
    double h0_lo = 0, h0_hi = 1;
    double f0_lo = -1, f0_hi = 1;
};

struct SearchResult {
    bool found = false;
    SolutionParams best;
    double best_residual = 0;
    std::vector<std::pair<int, double>> trace;  // (sample index, best-so-far)
    int evaluated = 0;
    int rejected = 0;
};

/// Quasi-random (Halton) sweep + simplex refinement of the normalized Riccati
/// residual over physical, admissible candidates. Deterministic given seed.
SearchResult consistency_search(const SearchRanges& r, int budget, std::uint64_t seed);

}  // namespace ellipnls
