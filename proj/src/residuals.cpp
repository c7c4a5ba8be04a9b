#include "ellipnls/residuals.hpp"

#include <algorithm>
#include <cmath>

#include "ellipnls/ode.hpp"
#include "ellipnls/quadrature.hpp"

namespace ellipnls {

namespace {

double grid_point(const GridSpec& g, int i) {
    if (g.n <= 1) return g.lo;
    return g.lo + (g.hi - g.lo) * i / (g.n - 1);
}

}  // namespace

double richardson_central_derivative(const std::function<double(double)>& f, double x, double h) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

namespace {
}  // namespace

ResidualReport residual_h(const HSolution& hs, GridSpec z_grid) {
    ResidualReport rep;
    rep.equation = "eq4";
    rep.grid_z = z_grid;
    const auto& q = hs.q1();
    double max_term = 0.0;
    for (int i = 0; i < z_grid.n; ++i) {
        const double z = grid_point(z_grid, i);
        double h, hz;
        hs.eval_both(z, h, hz);
        const double lhs = hz * hz;
        const double rhs = evaluate(q, h);
        const double r = std::abs(lhs - rhs);
        max_term = std::max({max_term, std::abs(lhs), std::abs(rhs)});
        if (r > rep.max_abs) {
            rep.max_abs = r;
            rep.loc_z = z;
        }
    }
    rep.max_rel = rep.max_abs / (1.0 + max_term);
    rep.construction_error_floor = 1e2 * 2.2e-16 * (1.0 + max_term);
    return rep;
}

ResidualReport residual_f(const FSolution& fs, double z, GridSpec t_grid) {
    ResidualReport rep;
    rep.equation = "eq5";
    rep.grid_t = t_grid;
    rep.grid_z = {z, z, 1};
    rep.loc_z = z;
    const auto& s = fs.slice(z);
    double max_term = 0.0;
    for (int i = 0; i < t_grid.n; ++i) {
        const double t = grid_point(t_grid, i);
        const double f = fs.eval(t, z);
        const double ft = fs.deriv_t(t, z);
        const double lhs = ft * ft;
        const double rhs = evaluate(s.q2, f);
        const double r = std::abs(lhs - rhs);
        max_term = std::max({max_term, std::abs(lhs), std::abs(rhs)});
        if (r > rep.max_abs) {
            rep.max_abs = r;
            rep.loc_t = t;
        }
    }
    rep.max_rel = rep.max_abs / (1.0 + max_term);
    rep.construction_error_floor = 1e2 * 2.2e-16 * (1.0 + max_term);
    return rep;
}

ResidualReport residual_phase(const PhiSolution& ps, const HSolution& hs, GridSpec z_grid) {
    ResidualReport rep;
    rep.equation = "eq6";
    rep.grid_z = z_grid;
    const auto& p = hs.params();
    const double Lz = hs.period();
    const double step = 1e-5 * (std::isfinite(Lz) ? Lz : 1.0);
    double max_term = 0.0;
    for (int i = 0; i < z_grid.n; ++i) {
        const double z = grid_point(z_grid, i);
        const double dphi = richardson_central_derivative([&](double u) { return ps.eval(u); }, z, step);
        const double h = hs.eval(z);
        const double r = std::abs(dphi + 2.0 * p.a * h - p.c1);
        max_term = std::max({max_term, std::abs(dphi), std::abs(2.0 * p.a * h), std::abs(p.c1)});
        if (r > rep.max_abs) {
            rep.max_abs = r;
            rep.loc_z = z;
        }
    }
    rep.max_rel = rep.max_abs / (1.0 + max_term);
    rep.construction_error_floor = 1e-9;  // FD-limited
    return rep;
}

ResidualReport residual_riccati(const FSolution& fs, const HSolution& hs, GridSpec t_grid,
                                GridSpec z_grid, double floor_from_residual_f) {
    ResidualReport rep;
    rep.equation = "eq28";
    rep.grid_t = t_grid;
    rep.grid_z = z_grid;
    rep.construction_error_floor = floor_from_residual_f;
    const auto& p = hs.params();
    const double Lz = hs.period();
    const double step = 1e-5 * (std::isfinite(Lz) ? Lz : 1.0);
    double max_term = 0.0;
    for (int j = 0; j < z_grid.n; ++j) {
        const double z = grid_point(z_grid, j);
        for (int i = 0; i < t_grid.n; ++i) {
            const double t = grid_point(t_grid, i);
            try {
                const double fz =
                    richardson_central_derivative([&](double u) { return fs.eval(t, u); }, z, step);
                const double h = hs.eval(z);
                const double f = fs.eval(t, z);
                const double rhs = std::sqrt(std::max(h, 0.0)) *
                                   (p.c1 - p.a * (3.0 * h + f * f));
                const double r = std::abs(fz - rhs);
                max_term = std::max({max_term, std::abs(fz), std::abs(rhs)});
                if (r > rep.max_abs) {
                    rep.max_abs = r;
                    rep.loc_t = t;
                    rep.loc_z = z;
                }
            } catch (const Error&) {
                ++rep.skipped_cells;  // stencil touched an inadmissible cell
            }
        }
    }
    rep.max_rel = rep.max_abs / (1.0 + max_term);
    return rep;
}

CnlseResidual residual_cnlse(const std::vector<double>& t_grid, const std::vector<double>& z_grid,
                             const std::vector<Complex>& psi, double a,
                             const std::vector<double>& phi_cols, double requested_tol) {
    const std::size_t nt = t_grid.size(), nz = z_grid.size();
    if (nt < 5 || nz < 5) throw InvalidInputError("cnlse residual needs at least a 5x5 grid");
    if (psi.size() != nt * nz || phi_cols.size() != nz)
        throw InvalidInputError("cnlse residual: shape mismatch");
    const double dt = t_grid[1] - t_grid[0];
    const double dz = z_grid[1] - z_grid[0];
    const auto at = [&](std::size_t i, std::size_t j) { return psi[j * nt + i]; };

    CnlseResidual out;
    out.real_part.equation = "cnlse-re";
    out.imag_part.equation = "cnlse-im";
    out.real_part.grid_t = out.imag_part.grid_t = {t_grid.front(), t_grid.back(),
                                                   static_cast<int>(nt)};
    out.real_part.grid_z = out.imag_part.grid_z = {z_grid.front(), z_grid.back(),
                                                   static_cast<int>(nz)};

    // truncation floor: compare both fourth-order stencils at steps h and 2h
    // over a sample of interior points including the window edges, where the
    // field is steepest
    double floor_est = 0.0;
    {
        std::vector<std::size_t> is = {4, nt / 4, nt / 2, 3 * nt / 4, nt - 5};
        for (std::size_t i : is) {
            if (i < 4 || i + 4 >= nt) continue;
            for (std::size_t j = 4; j + 4 < nz; j += std::max<std::size_t>(1, nz / 7)) {
                const Complex dz1 = (at(i, j - 2) - 8.0 * at(i, j - 1) + 8.0 * at(i, j + 1) -
                                     at(i, j + 2)) /
                                    (12.0 * dz);
                const Complex dz2 = (at(i, j - 4) - 8.0 * at(i, j - 2) + 8.0 * at(i, j + 2) -
                                     at(i, j + 4)) /
                                    (24.0 * dz);
                const Complex dt1 = (-at(i - 2, j) + 16.0 * at(i - 1, j) - 30.0 * at(i, j) +
                                     16.0 * at(i + 1, j) - at(i + 2, j)) /
                                    (12.0 * dt * dt);
                const Complex dt2 = (-at(i - 4, j) + 16.0 * at(i - 2, j) - 30.0 * at(i, j) +
                                     16.0 * at(i + 2, j) - at(i + 4, j)) /
                                    (48.0 * dt * dt);
                floor_est = std::max(floor_est, std::abs(dz1 - dz2) + std::abs(dt1 - dt2));
            }
        }
    }
    if (floor_est > requested_tol)
        throw ResolutionError("cnlse residual grid too coarse for the requested tolerance");
    out.real_part.construction_error_floor = floor_est;
    out.imag_part.construction_error_floor = floor_est;

    double max_term_re = 0.0, max_term_im = 0.0;
    for (std::size_t j = 2; j + 2 < nz; ++j) {
        const Complex rot = std::exp(Complex(0.0, -phi_cols[j]));
        for (std::size_t i = 2; i + 2 < nt; ++i) {
            const Complex psi_z = (at(i, j - 2) - 8.0 * at(i, j - 1) + 8.0 * at(i, j + 1) -
                                   at(i, j + 2)) /
                                  (12.0 * dz);
            const Complex psi_tt = (-at(i - 2, j) + 16.0 * at(i - 1, j) - 30.0 * at(i, j) +
                                    16.0 * at(i + 1, j) - at(i + 2, j)) /
                                   (12.0 * dt * dt);
            const Complex v = at(i, j);
            const Complex res = (Complex(0, 1) * psi_z + psi_tt + a * v * std::norm(v)) * rot;
            const double tm = std::max({std::abs(psi_z), std::abs(psi_tt),
                                        std::abs(a) * std::norm(v) * std::abs(v)});
            if (std::abs(res.real()) > out.real_part.max_abs) {
                out.real_part.max_abs = std::abs(res.real());
                out.real_part.loc_t = t_grid[i];
                out.real_part.loc_z = z_grid[j];
            }
            if (std::abs(res.imag()) > out.imag_part.max_abs) {
                out.imag_part.max_abs = std::abs(res.imag());
                out.imag_part.loc_t = t_grid[i];
                out.imag_part.loc_z = z_grid[j];
            }
            max_term_re = std::max(max_term_re, tm);
            max_term_im = std::max(max_term_im, tm);
        }
    }
    out.real_part.max_rel = out.real_part.max_abs / (1.0 + max_term_re);
    out.imag_part.max_rel = out.imag_part.max_abs / (1.0 + max_term_im);
    return out;
}

OracleCurve ode_oracle(const SolutionParams& p, OracleKind kind, double z_max, int n_samples,
                       double slope_sign) {
    p.validate();
    const auto q = r1_coefficients(p);
    const double r0 = evaluate(q, p.h0);
    if (r0 < -1e-12 * std::max(1.0, coefficient_scale(q)))
        throw InvalidInputError("R1(h0) < 0 in ode_oracle");
    // y = (h, w, phi): h' = w, w' = R1'(h)/2, phi' = c1 - 2 a h
    Dopri5<3>::Rhs rhs = [&q, &p](double, const Dopri5<3>::State& y, Dopri5<3>::State& dy) {
        dy[0] = y[1];
        dy[1] = 0.5 * derivative(q, y[0]);
        dy[2] = p.c1 - 2.0 * p.a * y[0];
    };
    Dopri5<3> solver(rhs, 1e-10, 1e-13);
    Dopri5<3>::State y0{p.h0, -slope_sign * std::sqrt(std::max(r0, 0.0)), p.phi0};
    const auto steps = solver.integrate(0.0, y0, z_max);

    OracleCurve out;
    out.z.resize(n_samples);
    out.value.resize(n_samples);
    std::size_t si = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double z = z_max * i / (n_samples - 1);
        while (si + 1 < steps.size() && steps[si].x1 < z) ++si;
        const auto y = Dopri5<3>::interpolate(steps[si], z);
        out.z[i] = z;
        out.value[i] = (kind == OracleKind::h_curve) ? y[0] : y[2];
    }

    // period from turning points: w = h_z sign changes, refined by bisection on
    // the Hermite interpolant
    std::vector<double> turns;
    for (const auto& s : steps) {
        if (s.f0[0] == 0.0 && s.x0 == 0.0) continue;  // started at a turning point
        if ((s.y0[1] > 0) == (s.y1[1] > 0)) continue;
        double a_ = s.x0, b_ = s.x1;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a_ + b_);
            const double wm = Dopri5<3>::interpolate(s, m)[1];
            if ((wm > 0) == (Dopri5<3>::interpolate(s, a_)[1] > 0))
                a_ = m;
            else
                b_ = m;
        }
        turns.push_back(0.5 * (a_ + b_));
    }
    if (turns.size() >= 3) {
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t k = 0; k + 2 < turns.size(); ++k) {
            acc += turns[k + 2] - turns[k];
            ++cnt;
        }
        out.period = acc / cnt;
    } else if (turns.size() == 2) {
        out.period = 2.0 * (turns[1] - turns[0]);
    }
    return out;
}

namespace {

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

struct Objective {
    const SearchRanges* ranges;
    mutable int evaluated = 0;
    mutable int rejected = 0;

    // normalized Riccati residual on a small interior grid; +inf when rejected
    double operator()(const SolutionParams& cand) const {
        ++evaluated;
        try {
            cand.validate();
            const auto rep_h = check_h(cand);
            if (!rep_h.satisfied) {
                ++rejected;
                return std::numeric_limits<double>::infinity();
            }
            auto hs = std::make_shared<HSolution>(HSolution::build(cand));
            const double Lz = hs->period();
            const double zspan = std::isfinite(Lz) ? Lz : 5.0;
            auto fs = FSolution::build(hs);
            // interior window avoiding the h = 0 and h = hmax constraint bands,
            // capped inside the pole-free t core
            GridSpec zg{0.15 * zspan, 0.45 * zspan, 7};
            const double Lt = fs.period_t(0.3 * zspan);
            double t_cap = 0.3 * Lt;
            for (int j = 0; j < zg.n; ++j) {
                const double z = zg.lo + (zg.hi - zg.lo) * j / (zg.n - 1);
                t_cap = std::min(t_cap, 0.7 * fs.nearest_pole_t(z));
            }
            if (!(t_cap > 1e-3 * Lt)) {
                ++rejected;
                return std::numeric_limits<double>::infinity();
            }
            GridSpec tg{-t_cap, t_cap, 7};
            auto rep = residual_riccati(fs, *hs, tg, zg);
            if (rep.skipped_cells > 0.5 * tg.n * zg.n) {
                ++rejected;
                return std::numeric_limits<double>::infinity();
            }
            return rep.max_rel;
        } catch (const Error&) {
            ++rejected;
            return std::numeric_limits<double>::infinity();
        }
    }
};

SolutionParams from_unit(const SearchRanges& r, const std::array<double, 6>& u) {
    SolutionParams p;
    p.a = r.a_lo + (r.a_hi - r.a_lo) * u[0];
    p.c1 = r.c1_lo + (r.c1_hi - r.c1_lo) * u[1];
    p.c2 = r.c2_lo + (r.c2_hi - r.c2_lo) * u[2];
    p.c3 = r.c3_lo + (r.c3_hi - r.c3_lo) * u[3];
    p.h0 = r.h0_lo + (r.h0_hi - r.h0_lo) * u[4];
    p.f0 = r.f0_lo + (r.f0_hi - r.f0_lo) * u[5];
    p.phi0 = 0.0;
    return p;
}

}  // namespace

SearchResult consistency_search(const SearchRanges& r, int budget, std::uint64_t seed) {
    for (double v : {r.a_lo, r.a_hi, r.c1_lo, r.c1_hi, r.c2_lo, r.c2_hi, r.c3_lo, r.c3_hi,
                     r.h0_lo, r.h0_hi, r.f0_lo, r.f0_hi})
        if (!std::isfinite(v)) throw InvalidInputError("non-finite search range");
    if (r.h0_lo < 0.0) throw InvalidInputError("search range violates h0 >= 0");
    if (budget < 1) throw InvalidInputError("search budget must be positive");

    Objective obj{&r};
    SearchResult out;
    static constexpr int bases[6] = {2, 3, 5, 7, 11, 13};
    const int offset = static_cast<int>(seed % 100000) + 17;

    struct Cand {
        SolutionParams p;
        double val;
    };
    std::vector<Cand> top;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < budget; ++k) {
        std::array<double, 6> u;
        for (int d = 0; d < 6; ++d) u[d] = halton(offset + k, bases[d]);
        const auto cand = from_unit(r, u);
        const double v = obj(cand);
        if (std::isfinite(v)) {
            top.push_back({cand, v});
            std::sort(top.begin(), top.end(), [](const Cand& a, const Cand& b) {
                return a.val < b.val;
            });
            if (top.size() > 10) top.resize(10);
        }
        if (v < best) {
            best = v;
            out.trace.emplace_back(k, v);
        }
    }
    if (top.empty()) {
        out.evaluated = obj.evaluated;
        out.rejected = obj.rejected;
        return out;  // empty-result status
    }

    // local simplex (Nelder-Mead) refinement of the best candidates
    auto tovec = [](const SolutionParams& p) {
        return std::array<double, 6>{p.a, p.c1, p.c2, p.c3, p.h0, p.f0};
    };
    auto clampv = [&](std::array<double, 6> v) {
        v[0] = std::clamp(v[0], r.a_lo, r.a_hi);
        v[1] = std::clamp(v[1], r.c1_lo, r.c1_hi);
        v[2] = std::clamp(v[2], r.c2_lo, r.c2_hi);
        v[3] = std::clamp(v[3], r.c3_lo, r.c3_hi);
        v[4] = std::clamp(v[4], std::max(0.0, r.h0_lo), r.h0_hi);
        v[5] = std::clamp(v[5], r.f0_lo, r.f0_hi);
        return v;
    };
    auto fromvec = [](const std::array<double, 6>& v) {
        SolutionParams p;
        p.a = v[0];
        p.c1 = v[1];
        p.c2 = v[2];
        p.c3 = v[3];
        p.h0 = v[4];
        p.f0 = v[5];
        return p;
    };
    Cand global{top[0].p, top[0].val};
    for (const auto& seed_cand : top) {
        // simplex around the seed
        std::vector<std::pair<std::array<double, 6>, double>> simplex;
        const auto v0 = tovec(seed_cand.p);
        simplex.push_back({v0, seed_cand.val});
        for (int d = 0; d < 6; ++d) {
            auto v = v0;
            const double span = 0.05 * (d == 0   ? r.a_hi - r.a_lo
                                        : d == 1 ? r.c1_hi - r.c1_lo
                                        : d == 2 ? r.c2_hi - r.c2_lo
                                        : d == 3 ? r.c3_hi - r.c3_lo
                                        : d == 4 ? r.h0_hi - r.h0_lo
                                                 : r.f0_hi - r.f0_lo);
            v[d] += (span == 0.0 ? 1e-3 : span);
            v = clampv(v);
            simplex.push_back({v, obj(fromvec(v))});
        }
        for (int it = 0; it < 60; ++it) {
            std::sort(simplex.begin(), simplex.end(),
                      [](const auto& a, const auto& b) { return a.second < b.second; });
            if (!std::isfinite(simplex.back().second) && !std::isfinite(simplex[1].second)) break;
            std::array<double, 6> centroid{};
            for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
                for (int d = 0; d < 6; ++d) centroid[d] += simplex[i].first[d];
            for (int d = 0; d < 6; ++d) centroid[d] /= 6.0;
            auto& worst = simplex.back();
            std::array<double, 6> refl;
            for (int d = 0; d < 6; ++d) refl[d] = centroid[d] + (centroid[d] - worst.first[d]);
            refl = clampv(refl);
            const double fr = obj(fromvec(refl));
            if (fr < simplex[0].second) {
                std::array<double, 6> exp_;
                for (int d = 0; d < 6; ++d)
                    exp_[d] = centroid[d] + 2.0 * (centroid[d] - worst.first[d]);
                exp_ = clampv(exp_);
                const double fe = obj(fromvec(exp_));
                worst = fe < fr ? std::pair{exp_, fe} : std::pair{refl, fr};
            } else if (fr < simplex[simplex.size() - 2].second) {
                worst = {refl, fr};
            } else {
                std::array<double, 6> con;
                for (int d = 0; d < 6; ++d)
                    con[d] = centroid[d] + 0.5 * (worst.first[d] - centroid[d]);
                con = clampv(con);
                const double fc = obj(fromvec(con));
                if (fc < worst.second) {
                    worst = {con, fc};
                } else {
                    for (std::size_t i = 1; i < simplex.size(); ++i) {
                        for (int d = 0; d < 6; ++d)
                            simplex[i].first[d] =
                                0.5 * (simplex[i].first[d] + simplex[0].first[d]);
                        simplex[i].second = obj(fromvec(simplex[i].first));
                    }
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        if (simplex[0].second < global.val) global = {fromvec(simplex[0].first), simplex[0].second};
    }
    out.found = true;
    out.best = global.p;
    out.best_residual = global.val;
    out.evaluated = obj.evaluated;
    out.rejected = obj.rejected;
    return out;
}

}  // namespace ellipnls
