#include "ellipnls/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <fstream>
#include <ostream>

#include "ellipnls/field.hpp"
#include "ellipnls/physicality.hpp"
#include "ellipnls/quadrature.hpp"
#include "ellipnls/residuals.hpp"
#include "ellipnls/spectral.hpp"

namespace ellipnls {

namespace {

namespace fs = std::filesystem;

using MetaRows = std::vector<std::pair<std::string, std::string>>;

MetaRows base_meta(const SolutionParams& p, const std::string& command) {
    return {{"version", kVersion},
            {"command", command},
            {"a", format_double(p.a)},
            {"c1", format_double(p.c1)},
            {"c2", format_double(p.c2)},
            {"c3", format_double(p.c3)},
            {"h0", format_double(p.h0)},
            {"f0", format_double(p.f0)},
            {"phi0", format_double(p.phi0)}};
}

std::string opath(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

struct Family {
    std::shared_ptr<HSolution> hs;
    std::unique_ptr<PhiSolution> ps;
    std::unique_ptr<FSolution> fs;
};

Family build_family(const SolutionParams& p) {
    Family fam;
    fam.hs = std::make_shared<HSolution>(HSolution::build(p));
    fam.ps = std::make_unique<PhiSolution>(PhiSolution::build(*fam.hs));
    fam.fs = std::make_unique<FSolution>(FSolution::build(fam.hs));
    return fam;
}

int cmd_coeffs(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    const auto q1 = r1_coefficients(p);
    const double h = cfg.get("coeffs", "h", p.h0);
    const double hz = cfg.get("coeffs", "hz", 0.0);
    const auto q2 = r2_coefficients(p, h, hz, +1.0);
    const auto inv1 = invariants_from_quartic(q1);
    const auto inv2 = invariants_from_quartic(q2);
    MetaRows rows = {
        {"r1.alpha", format_double(q1.alpha)},     {"r1.beta", format_double(q1.beta)},
        {"r1.gamma", format_double(q1.gamma)},     {"r1.delta", format_double(q1.delta)},
        {"r1.epsilon", format_double(q1.epsilon)}, {"r2.alpha", format_double(q2.alpha)},
        {"r2.beta", format_double(q2.beta)},       {"r2.gamma", format_double(q2.gamma)},
        {"r2.delta", format_double(q2.delta)},     {"r2.epsilon", format_double(q2.epsilon)},
        {"g2z", format_double(inv1.g2)},           {"g3z", format_double(inv1.g3)},
        {"delta_z", format_double(inv1.delta)},    {"g2t", format_double(inv2.g2)},
        {"g3t", format_double(inv2.g3)},           {"delta_t", format_double(inv2.delta)},
    };
    write_report_csv(opath(cfg, "coeffs.csv"), rows, base_meta(p, "coeffs"));
    log << "coeffs: R1 = (" << format_double(q1.alpha) << ", " << format_double(q1.beta) << ", "
        << format_double(q1.gamma) << ", " << format_double(q1.delta) << ", "
        << format_double(q1.epsilon) << ")\n";
    return 0;
}

int cmd_phase_diagram(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    const auto q1 = r1_coefficients(p);
    const auto rep = pdc_classify(q1);
    double hmax_default = 1.0;
    for (const auto& iv : rep.positivity_intervals)
        if (std::isfinite(iv.hi)) hmax_default = std::max(hmax_default, 1.1 * iv.hi);
    const double h_lo = cfg.get("phase-diagram", "h_min", -0.1);
    const double h_hi = cfg.get("phase-diagram", "h_max", hmax_default);
    const int n = cfg.get_int("phase-diagram", "n", 1201);
    std::vector<double> hh(n), rr(n);
    for (int i = 0; i < n; ++i) {
        hh[i] = h_lo + (h_hi - h_lo) * i / (n - 1);
        rr[i] = evaluate(q1, hh[i]);
    }
    write_curve_csv(opath(cfg, "phase_diagram.csv"), "h", "r1", hh, rr,
                    base_meta(p, "phase-diagram"));
    MetaRows rows = {{"sign_changes", std::to_string(rep.sign_changes)}};
    for (std::size_t i = 0; i < rep.pdc_roots.size(); ++i) {
        rows.emplace_back("pdc_root_" + std::to_string(i), format_double(rep.pdc_roots[i]));
        rows.emplace_back("pdc_mult_" + std::to_string(i),
                          std::to_string(rep.pdc_multiplicities[i]));
    }
    for (std::size_t i = 0; i < rep.positivity_intervals.size(); ++i) {
        rows.emplace_back("interval_" + std::to_string(i) + "_lo",
                          format_double(rep.positivity_intervals[i].lo));
        rows.emplace_back("interval_" + std::to_string(i) + "_hi",
                          format_double(rep.positivity_intervals[i].hi));
    }
    write_report_csv(opath(cfg, "pdc_report.csv"), rows, base_meta(p, "phase-diagram"));
    log << "phase-diagram: " << rep.pdc_roots.size() << " PDC-roots, " << rep.sign_changes
        << " sign changes\n";
    return 0;
}

int cmd_h_profile(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    const auto hs = HSolution::build(p);
    const double Lz = hs.period();
    const double span = cfg.get("h-profile", "z_max",
                                std::isfinite(Lz) ? 2.0 * Lz : 10.0);
    const int n = cfg.get_int("h-profile", "n", 1025);
    std::vector<double> zz(n), hh(n);
    for (int i = 0; i < n; ++i) {
        zz[i] = span * i / (n - 1);
        hh[i] = hs.eval(zz[i]);
    }
    auto meta = base_meta(p, "h-profile");
    meta.emplace_back("Lz", format_double(Lz));
    write_curve_csv(opath(cfg, "h_profile.csv"), "z", "h", zz, hh, meta);
    log << "h-profile: Lz = " << format_double(Lz) << "\n";
    return 0;
}

int cmd_region(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    const auto hs = HSolution::build(p);
    const double Lz = hs.period();
    const double f0_min = cfg.get("region", "f0_min", 0.0);
    const double f0_max = cfg.get("region", "f0_max", 1.0);
    const double z_min = cfg.get("region", "z_min", 0.0);
    const double z_max = cfg.get("region", "z_max", std::isfinite(Lz) ? 3.0 * Lz : 10.0);
    const int nf0 = cfg.get_int("region", "nf0", 400);
    const int nz = cfg.get_int("region", "nz", 400);
    const auto conv = cfg.get_str("region", "gamma2", "consistent") == "printed"
                          ? Gamma2Convention::as_printed
                          : Gamma2Convention::consistent;
    const auto reg = admissible_region(p, f0_min, f0_max, z_min, z_max, nf0, nz, conv);

    auto meta = base_meta(p, "region");
    meta.emplace_back("Lz", format_double(Lz));
    meta.emplace_back("gamma2", conv == Gamma2Convention::as_printed ? "printed" : "consistent");
    {
        std::ofstream out(opath(cfg, "region.csv"), std::ios::binary);
        out << "# ellipnls " << kVersion << "\n";
        for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
        out << "f0,z,flag\n";
        for (std::size_t j = 0; j < reg.z_grid.size(); ++j)
            for (std::size_t i = 0; i < reg.f0_grid.size(); ++i)
                out << format_double(reg.f0_grid[i]) << ',' << format_double(reg.z_grid[j]) << ','
                    << int(reg.mask[reg.index(j, i)]) << '\n';
    }
    {
        std::ofstream out(opath(cfg, "region_signs.csv"), std::ios::binary);
        out << "# ellipnls " << kVersion << "\n";
        out << "f0,z,flag_plus,flag_minus\n";
        for (std::size_t j = 0; j < reg.z_grid.size(); ++j)
            for (std::size_t i = 0; i < reg.f0_grid.size(); ++i)
                out << format_double(reg.f0_grid[i]) << ',' << format_double(reg.z_grid[j]) << ','
                    << int(reg.mask_plus[reg.index(j, i)]) << ','
                    << int(reg.mask_minus[reg.index(j, i)]) << '\n';
    }
    {
        std::ofstream out(opath(cfg, "region_boundary.csv"), std::ios::binary);
        out << "# ellipnls " << kVersion << "\n";
        out << "f0,z\n";
        for (const auto& [f0v, zv] : reg.boundary)
            out << format_double(f0v) << ',' << format_double(zv) << '\n';
    }
    std::size_t count = 0;
    for (auto m : reg.mask) count += m;
    log << "region: " << count << "/" << reg.mask.size() << " admissible cells, "
        << reg.boundary.size() << " boundary points\n";
    return 0;
}

int cmd_surface(const RunConfig& cfg, std::ostream& log) {
    auto p = cfg.params();
    const std::string suffix = cfg.get_str("surface", "suffix", "");
    if (cfg.has("surface", "f0")) p.f0 = cfg.get("surface", "f0", p.f0);
    auto fam = build_family(p);
    const double Lz = fam.hs->period();
    const double Lt0 = fam.fs->period_t(0.0);
    const double t_max = cfg.get("surface", "t_max", Lt0);
    const double z_max = cfg.get("surface", "z_max", std::isfinite(Lz) ? 2.0 * Lz : 10.0);
    const int nt = cfg.get_int("surface", "nt", 121);
    const int nz = cfg.get_int("surface", "nz", 121);

    SampledField f_field, psi_field, int_field;
    f_field.is_complex = false;
    int_field.is_complex = false;
    f_field.t_grid.resize(nt);
    f_field.z_grid.resize(nz);
    for (int i = 0; i < nt; ++i) f_field.t_grid[i] = -t_max + 2.0 * t_max * i / (nt - 1);
    for (int j = 0; j < nz; ++j) f_field.z_grid[j] = z_max * j / (nz - 1);
    psi_field.t_grid = int_field.t_grid = f_field.t_grid;
    psi_field.z_grid = int_field.z_grid = f_field.z_grid;
    f_field.values.resize(static_cast<std::size_t>(nt) * nz);
    psi_field.values.resize(f_field.values.size());
    int_field.values.resize(f_field.values.size());

    const double dnan = std::nan("");
    long failed = 0;
    for (int j = 0; j < nz; ++j) {
        const double z = f_field.z_grid[j];
        for (int i = 0; i < nt; ++i) {
            const double t = f_field.t_grid[i];
            const std::size_t k = static_cast<std::size_t>(j) * nt + i;
            try {
                const auto v = psi_eval(t, z, *fam.hs, *fam.ps, *fam.fs);
                f_field.values[k] = fam.fs->eval(t, z);
                psi_field.values[k] = v.psi;
                int_field.values[k] = v.intensity;
            } catch (const Error&) {
                f_field.values[k] = psi_field.values[k] = int_field.values[k] = dnan;
                ++failed;
            }
        }
    }
    auto meta = base_meta(p, "surface");
    meta.emplace_back("Lz", format_double(Lz));
    meta.emplace_back("Lt0", format_double(Lt0));
    meta.emplace_back("failed_cells", std::to_string(failed));
    f_field.meta = psi_field.meta = int_field.meta = meta;
    f_field.write_csv(opath(cfg, "surface_f" + suffix + ".csv"));
    psi_field.write_csv(opath(cfg, "surface_psi" + suffix + ".csv"));
    int_field.write_csv(opath(cfg, "surface_psi2" + suffix + ".csv"));
    log << "surface: " << nt << "x" << nz << " grid, " << failed
        << " cells outside the physical domain\n";
    return 0;
}

int cmd_period_t(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    const auto hs = HSolution::build(p);
    const double Lz = hs.period();
    const double z_max = cfg.get("period-t", "z_max", std::isfinite(Lz) ? 2.0 * Lz : 10.0);
    const int n = cfg.get_int("period-t", "n", 513);
    std::vector<double> zz(n), lt(n), ltp(n);
    for (int i = 0; i < n; ++i) {
        zz[i] = z_max * i / (n - 1);
        lt[i] = periods(hs, zz[i]).Lt.value();
        ltp[i] = periods(hs, zz[i], Gamma2Convention::as_printed).Lt.value();
    }
    auto meta = base_meta(p, "period-t");
    meta.emplace_back("Lz", format_double(Lz));
    write_curve_csv(opath(cfg, "period_t.csv"), "z", "Lt", zz, lt, meta);
    write_curve_csv(opath(cfg, "period_t_printed_gamma2.csv"), "z", "Lt", zz, ltp, meta);
    log << "period-t: Lt(0) = " << format_double(lt.front()) << "\n";
    return 0;
}

int cmd_phase(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    auto fam = build_family(p);
    const double Lz = fam.hs->period();
    const double z_max = cfg.get("phase", "z_max", std::isfinite(Lz) ? 2.0 * Lz : 10.0);
    const int n = cfg.get_int("phase", "n", 513);
    std::vector<double> zz(n), ph(n);
    for (int i = 0; i < n; ++i) {
        zz[i] = z_max * i / (n - 1);
        ph[i] = fam.ps->eval(zz[i]);
    }
    write_curve_csv(opath(cfg, "phase.csv"), "z", "phi", zz, ph, base_meta(p, "phase"));
    log << "phase: phi(" << format_double(zz.back()) << ") = " << format_double(ph.back())
        << "\n";
    return 0;
}

struct ResidualBundle {
    ResidualReport h, f0r, phase, riccati;
    CnlseResidual cnlse;
};

ResidualBundle compute_residuals(const Family& fam, const RunConfig& cfg) {
    const auto& hs = *fam.hs;
    const double Lz = hs.period();
    const double span = std::isfinite(Lz) ? Lz : 5.0;
    ResidualBundle out;
    out.h = residual_h(hs, {0.02 * span, 1.98 * span, cfg.get_int("residuals", "nh", 400)});
    const double z_lo = 0.15 * span, z_hi = 0.42 * span;
    const double Lt_mid = fam.fs->period_t(0.285 * span);
    // keep the t-windows inside the pole-free core of every z column used
    double t_cap = 0.3 * Lt_mid;
    for (int j = 0; j <= 16; ++j) {
        const double z = z_lo + (z_hi - z_lo) * j / 16.0;
        t_cap = std::min(t_cap, 0.7 * fam.fs->nearest_pole_t(z));
    }
    out.f0r = residual_f(*fam.fs, 0.285 * span,
                         {-t_cap, t_cap, cfg.get_int("residuals", "nf", 301)});
    out.phase = residual_phase(*fam.ps, hs,
                               {0.05 * span, 0.95 * span, cfg.get_int("residuals", "nphi", 101)});
    out.riccati = residual_riccati(*fam.fs, hs, {-t_cap, t_cap, 17},
                                   {z_lo, z_hi, 17}, out.f0r.max_abs);

    // CNLSE residual on a fine interior window (steps <= 1e-3 of both periods),
    // kept inside the admissible z band of the f0 = 0 row
    const double t_hi = std::min(2.0, t_cap);
    const int nz = std::max(31, static_cast<int>(std::ceil((z_hi - z_lo) / (1e-3 * span))) | 1);
    const int nt =
        std::max(31, static_cast<int>(std::ceil(2 * t_hi / (1e-3 * Lt_mid))) | 1);
    std::vector<double> tg(nt), zg(nz);
    for (int i = 0; i < nt; ++i) tg[i] = -t_hi + 2 * t_hi * i / (nt - 1);
    for (int j = 0; j < nz; ++j) zg[j] = z_lo + (z_hi - z_lo) * j / (nz - 1);
    std::vector<Complex> psi(static_cast<std::size_t>(nt) * nz);
    std::vector<double> phis(nz);
    for (int j = 0; j < nz; ++j) {
        phis[j] = fam.ps->eval(zg[j]);
        for (int i = 0; i < nt; ++i)
            psi[static_cast<std::size_t>(j) * nt + i] =
                psi_eval(tg[i], zg[j], *fam.hs, *fam.ps, *fam.fs).psi;
    }
    out.cnlse = residual_cnlse(tg, zg, psi, hs.params().a, phis, 1.0);
    return out;
}

MetaRows residual_rows(const ResidualBundle& b) {
    const auto add = [](MetaRows& rows, const std::string& name, const ResidualReport& r) {
        rows.emplace_back(name + ".max_abs", format_double(r.max_abs));
        rows.emplace_back(name + ".max_rel", format_double(r.max_rel));
        rows.emplace_back(name + ".floor", format_double(r.construction_error_floor));
        rows.emplace_back(name + ".loc_t", format_double(r.loc_t));
        rows.emplace_back(name + ".loc_z", format_double(r.loc_z));
        rows.emplace_back(name + ".skipped", std::to_string(r.skipped_cells));
    };
    MetaRows rows;
    add(rows, "eq4", b.h);
    add(rows, "eq5", b.f0r);
    add(rows, "eq6", b.phase);
    add(rows, "eq28", b.riccati);
    add(rows, "cnlse_re", b.cnlse.real_part);
    add(rows, "cnlse_im", b.cnlse.imag_part);
    return rows;
}

int cmd_residuals(const RunConfig& cfg, std::ostream& log) {
    const auto p = cfg.params();
    auto fam = build_family(p);
    const auto b = compute_residuals(fam, cfg);
    write_report_csv(opath(cfg, "residuals.csv"), residual_rows(b), base_meta(p, "residuals"));
    log << "residuals: eq4 " << format_double(b.h.max_rel) << ", eq5 "
        << format_double(b.f0r.max_rel) << ", eq6 " << format_double(b.phase.max_abs)
        << ", eq28 " << format_double(b.riccati.max_abs) << " (floor "
        << format_double(b.riccati.construction_error_floor) << "), cnlse re/im "
        << format_double(b.cnlse.real_part.max_abs) << "/"
        << format_double(b.cnlse.imag_part.max_abs) << "\n";
    return 0;
}

int cmd_ssfm_check(const RunConfig& cfg, std::ostream& log) {
    const double a = cfg.get("ssfm-check", "a", 1.0);
    const int n = cfg.get_int("ssfm-check", "n_modes", 256);
    const double window = cfg.get("ssfm-check", "window", 12.566370614359172);
    const double dz = cfg.get("ssfm-check", "dz", 1e-4);

    MetaRows rows;
    bool ok = true;

    // plane wave exactness: Psi = e^{i a z}
    {
        SpectralConfig sc{window, n, dz, 1.0, 0};
        std::vector<Complex> init(n, Complex(1.0, 0.0));
        const auto field = propagate(init, sc, a);
        const Complex expect = std::exp(Complex(0.0, a * field.z_grid.back()));
        double err = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            err = std::max(err, std::abs(field.at(i, field.z_grid.size() - 1) - expect));
        rows.emplace_back("plane_wave_error", format_double(err));
        ok = ok && err <= 1e-8;
    }
    // power conservation per unit z and time reversal
    {
        SpectralConfig sc{window, n, dz, 1.0, 0};
        std::vector<Complex> init(n);
        for (int i = 0; i < n; ++i) {
            const double t = -window / 2 + window * i / n;
            init[i] = Complex(1.0 + 0.3 * std::cos(2 * 3.14159265358979 * t / window), 0.0);
        }
        const auto field = propagate(init, sc, a);
        const auto p0 = conserved_quantities(init, window, a);
        std::vector<Complex> last(n);
        for (int i = 0; i < n; ++i) last[i] = field.at(i, field.z_grid.size() - 1);
        const auto p1 = conserved_quantities(last, window, a);
        const double drift = std::abs(p1.power - p0.power) / (p0.power * field.z_grid.back());
        rows.emplace_back("power_drift_per_z", format_double(drift));
        ok = ok && drift <= 1e-10;

        // backward propagation via conjugation: conj(Psi) solves the z -> -z equation
        std::vector<Complex> rev(n);
        for (int i = 0; i < n; ++i) rev[i] = std::conj(last[i]);
        SpectralConfig fwd{window, n, dz, 1.0, 0};
        const auto fieldb = propagate(rev, fwd, a);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err,
                           std::abs(std::conj(fieldb.at(i, fieldb.z_grid.size() - 1)) - init[i]));
        rows.emplace_back("time_reversal_error", format_double(err));
        ok = ok && err <= 1e-7;
    }
    write_report_csv(opath(cfg, "ssfm_report.csv"), rows, {{ "version", kVersion }});
    log << "ssfm-check: " << (ok ? "all self-tests passed" : "TOLERANCES EXCEEDED") << "\n";
    return ok ? 0 : 2;
}

int cmd_search(const RunConfig& cfg, std::ostream& log) {
    SearchRanges r;
    r.a_lo = cfg.get("search", "a_lo", -1.2);
    r.a_hi = cfg.get("search", "a_hi", -0.8);
    r.c1_lo = cfg.get("search", "c1_lo", -2.4);
    r.c1_hi = cfg.get("search", "c1_hi", -1.6);
    r.c2_lo = cfg.get("search", "c2_lo", 0.2);
    r.c2_hi = cfg.get("search", "c2_hi", 0.6);
    r.c3_lo = cfg.get("search", "c3_lo", 0.05);
    r.c3_hi = cfg.get("search", "c3_hi", 0.3);
    r.h0_lo = cfg.get("search", "h0_lo", 0.0);
    r.h0_hi = cfg.get("search", "h0_hi", 0.0);
    r.f0_lo = cfg.get("search", "f0_lo", -0.5);
    r.f0_hi = cfg.get("search", "f0_hi", 0.5);
    const int budget = cfg.get_int("search", "budget", 60);
    const auto seed = static_cast<std::uint64_t>(cfg.get("search", "seed", 1.0));
    const auto res = consistency_search(r, budget, seed);
    MetaRows rows = {{"found", res.found ? "1" : "0"},
                     {"evaluated", std::to_string(res.evaluated)},
                     {"rejected", std::to_string(res.rejected)}};
    if (res.found) {
        rows.emplace_back("best_residual", format_double(res.best_residual));
        rows.emplace_back("best.a", format_double(res.best.a));
        rows.emplace_back("best.c1", format_double(res.best.c1));
        rows.emplace_back("best.c2", format_double(res.best.c2));
        rows.emplace_back("best.c3", format_double(res.best.c3));
        rows.emplace_back("best.h0", format_double(res.best.h0));
        rows.emplace_back("best.f0", format_double(res.best.f0));
    }
    for (const auto& [k, v] : res.trace)
        rows.emplace_back("trace_" + std::to_string(k), format_double(v));
    write_report_csv(opath(cfg, "search_report.csv"), rows, {{ "version", kVersion }});
    log << "search: evaluated " << res.evaluated << ", best residual "
        << (res.found ? format_double(res.best_residual) : std::string("n/a")) << "\n";
    return 0;
}

int cmd_reproduce_appendix(const RunConfig& cfg_in, std::ostream& log) {
    RunConfig cfg = cfg_in;  // appendix parameters unless explicitly overridden
    for (const auto& [k, v] : std::initializer_list<std::pair<const char*, const char*>>{
             {"a", "-1"}, {"c1", "-2"}, {"c2", "0.4"}, {"c3", "0.13"}, {"h0", "0"},
             {"f0", "0"}, {"phi0", "0"}})
        if (!cfg_in.has("global", k)) cfg.set("global", k, v);

    const auto p = cfg.params();
    std::vector<std::string> discrepancies;
    MetaRows summary;
    const auto note = [&](const std::string& key, const std::string& val) {
        summary.emplace_back(key, val);
    };

    // coefficient table and invariants under both Eq.(8) readings
    const auto q1 = r1_coefficients(p);
    note("r1.alpha", format_double(q1.alpha));
    note("r1.beta", format_double(q1.beta));
    note("r1.gamma", format_double(q1.gamma));
    note("r1.delta", format_double(q1.delta));
    note("r1.epsilon", format_double(q1.epsilon));
    const auto inv = invariants_from_quartic(q1);
    const double g2_printed = 3 * q1.gamma * q1.gamma - 4 * q1.beta * q1.gamma;
    const double d_printed = std::pow(g2_printed, 3) - 27 * inv.g3 * inv.g3;
    note("g2z.corrected", format_double(inv.g2));
    note("g2z.printed_eq8", format_double(g2_printed));
    note("g3z", format_double(inv.g3));
    note("delta_z.corrected", format_double(inv.delta));
    note("delta_z.printed_eq8", format_double(d_printed));
    if (inv.delta <= 0.0)
        discrepancies.push_back(
            "paper assumes Delta_z > 0; corrected invariants give Delta_z = " +
            format_double(inv.delta));

    auto fam = build_family(p);
    const double Lz = fam.hs->period();
    const auto lat_printed = lattice_from_invariants(EllipticInvariants::from(g2_printed, inv.g3));
    const double Lz_printed = 2.0 * lat_printed.omega;
    note("Lz.corrected", format_double(Lz));
    note("Lz.printed_eq8", format_double(Lz_printed));
    note("Lz.paper", "2.85");
    const double lz_relerr = std::abs(Lz - 2.85) / 2.85;
    note("Lz.rel_diff_vs_paper", format_double(lz_relerr));
    if (lz_relerr > 0.02)
        discrepancies.push_back("computed Lz = " + format_double(Lz) +
                                " differs from the paper's 2.85 by " +
                                format_double(100 * lz_relerr) + "% (printed-Eq.8 reading: " +
                                format_double(Lz_printed) + ")");

    // independent period oracle: 2 int dh / sqrt(R1) over the oscillation interval
    {
        const auto pd = pdc_classify(q1);
        double lo = 0.0, hi = 0.0;
        for (const auto& iv : pd.positivity_intervals)
            if (std::isfinite(iv.hi) && iv.hi > iv.lo) {
                lo = iv.lo;
                hi = iv.hi;
                break;
            }
        note("pd.interval_lo", format_double(lo));
        note("pd.interval_hi", format_double(hi));
        if (hi > lo) {
            const double quad = oscillation_period(
                {q1.alpha, 4 * q1.beta, 6 * q1.gamma, 4 * q1.delta, q1.epsilon}, lo, hi);
            note("Lz.quadrature_oracle", format_double(quad));
            if (std::abs(quad - Lz) > 1e-3 * Lz)
                discrepancies.push_back("internal inconsistency: quadrature period " +
                                        format_double(quad) + " vs 2 omega " + format_double(Lz));
        }
        // the paper's PD figure suggests 0 <= h0 <= 0.08
        if (std::abs(hi - 0.08) > 0.02)
            discrepancies.push_back("computed positivity interval [0, " + format_double(hi) +
                                    "] does not match the figure's 0 <= h0 <= 0.08 range");
    }

    // physicality
    const auto hrep = check_h(p);
    note("check_h.case", hrep.h_case == HCase::zero_root
                             ? "zero-root"
                             : (hrep.h_case == HCase::interior ? "interior" : "simple-root"));
    note("check_h.satisfied", hrep.satisfied ? "1" : "0");
    note("check_h.e1", format_double(hrep.e1));
    note("check_h.threshold", format_double(hrep.threshold));
    if (!hrep.satisfied) discrepancies.push_back("check_h failed: " + hrep.detail);

    // figure-data commands; Fig. 3's data is reproduced under the paper's own
    // gamma2 reading (the consistent-region statistics go into the summary)
    cmd_coeffs(cfg, log);
    cmd_phase_diagram(cfg, log);
    cmd_h_profile(cfg, log);
    if (!cfg_in.has("region", "gamma2")) cfg.set("region", "gamma2", "printed");
    cmd_region(cfg, log);
    cmd_surface(cfg, log);
    {
        RunConfig cfg08 = cfg;  // Fig. 4c: unstable |Psi|^2 at f0 = 0.8
        cfg08.set("surface", "f0", "0.8");
        cfg08.set("surface", "suffix", "_f08");
        cmd_surface(cfg08, log);
    }
    cmd_period_t(cfg, log);
    cmd_phase(cfg, log);

    // region claims: the paper's Fig. 3 was computed with its printed gamma2
    // (missing the factor a), so the reproduction scan uses that convention;
    // the consistent-gamma2 region is emitted alongside
    {
        const int nf0 = cfg.get_int("region", "nf0", 400);
        const int nz = cfg.get_int("region", "nz", 400);
        const auto reg = admissible_region(p, 0.0, 1.0, 0.0, 3.0 * Lz, nf0, nz,
                                           Gamma2Convention::as_printed);
        std::size_t f0_row_ok = 0, f08_changes = 0;
        std::size_t i0 = 0, i8 = 0;
        for (std::size_t i = 1; i < reg.f0_grid.size(); ++i) {
            if (std::abs(reg.f0_grid[i]) < std::abs(reg.f0_grid[i0])) i0 = i;
            if (std::abs(reg.f0_grid[i] - 0.8) < std::abs(reg.f0_grid[i8] - 0.8)) i8 = i;
        }
        for (std::size_t j = 0; j < reg.z_grid.size(); ++j) {
            f0_row_ok += reg.mask[reg.index(j, i0)];
            if (j > 0 && reg.mask[reg.index(j, i8)] != reg.mask[reg.index(j - 1, i8)])
                ++f08_changes;
        }
        note("region.printed_gamma2.f0_zero_admissible_fraction",
             format_double(double(f0_row_ok) / reg.z_grid.size()));
        note("region.printed_gamma2.f0_08_boundary_crossings", std::to_string(f08_changes));
        if (f0_row_ok != reg.z_grid.size())
            discrepancies.push_back(
                "f0 = 0 row is admissible on only " + std::to_string(f0_row_ok) + "/" +
                std::to_string(reg.z_grid.size()) +
                " z samples even under the paper's own gamma2 reading (paper: consistent with "
                "(25),(27) for \"all\" z; fails in windows around h = 0 and h = h_max)");
        if (f08_changes == 0)
            discrepancies.push_back("f0 = 0.8 row never crosses the region boundary");

        const auto regc = admissible_region(p, 0.0, 1.0, 0.0, 3.0 * Lz,
                                            std::min(nf0, 96), std::min(nz, 96),
                                            Gamma2Convention::consistent);
        std::size_t adm = 0;
        for (auto m : regc.mask) adm += m;
        note("region.consistent_gamma2.admissible_fraction",
             format_double(double(adm) / regc.mask.size()));
        if (adm * 10 < regc.mask.size())
            discrepancies.push_back(
                "under the ansatz-consistent gamma2 = (c1 - 3 a h)/6 the admissible region is "
                "(nearly) empty: f(t, z) of the defocusing Appendix family has real t-poles");
    }

    // residuals incl. the paper's section-IV claim
    {
        const auto b = compute_residuals(fam, cfg);
        auto rows = residual_rows(b);
        for (auto& kv : rows) summary.push_back(kv);
        write_report_csv(opath(cfg, "residuals.csv"), rows, base_meta(p, "residuals"));
        if (b.h.max_rel > 1e-8)
            discrepancies.push_back("construction residual eq4 above 1e-8");
        if (b.f0r.max_rel > 1e-6)
            discrepancies.push_back("construction residual eq5 above 1e-6");
        if (b.phase.max_abs > 1e-6)
            discrepancies.push_back("phase residual eq6 above 1e-6");
        const double ratio = b.riccati.max_abs /
                             std::max(b.riccati.construction_error_floor, 1e-300);
        note("riccati_over_floor", format_double(ratio));
        if (ratio < 1e3)
            discrepancies.push_back(
                "Riccati residual does NOT exceed 1e3 x construction floor (conflicts with the "
                "paper's negative finding)");
    }

    if (cmd_ssfm_check(cfg, log) != 0)
        discrepancies.push_back("split-step self-tests exceeded their tolerances");
    cmd_search(cfg, log);

    // Lt periodicity (both gamma2 readings; the consistent one is z-constant)
    {
        double worst = 0.0, worstp = 0.0, var = 0.0;
        for (double z : {0.31 * Lz, 0.57 * Lz, 0.83 * Lz}) {
            const double a1 = periods(*fam.hs, z).Lt.value();
            const double a2 = periods(*fam.hs, z + Lz).Lt.value();
            const double p1 = periods(*fam.hs, z, Gamma2Convention::as_printed).Lt.value();
            const double p2 = periods(*fam.hs, z + Lz, Gamma2Convention::as_printed).Lt.value();
            worst = std::max(worst, std::abs(a1 - a2));
            worstp = std::max(worstp, std::abs(p1 - p2));
            var = std::max(var, std::abs(a1 - periods(*fam.hs, 0.0).Lt.value()));
        }
        note("Lt.periodicity_defect", format_double(worst));
        note("Lt.periodicity_defect_printed_gamma2", format_double(worstp));
        note("Lt.z_variation_consistent_gamma2", format_double(var));
        if (worst > 1e-8 || worstp > 1e-8)
            discrepancies.push_back("Lt(z) is not Lz-periodic to 1e-8");
        if (var < 1e-8)
            discrepancies.push_back(
                "under consistent gamma2 the t-lattice invariants are z-independent, so Lt is "
                "constant (paper Fig. 5 shows z-variation; that variation follows from the "
                "printed gamma2 only)");
    }

    note("discrepancy_count", std::to_string(discrepancies.size()));
    for (std::size_t i = 0; i < discrepancies.size(); ++i)
        summary.emplace_back("discrepancy_" + std::to_string(i), discrepancies[i]);
    write_report_csv(opath(cfg, "summary.csv"), summary, base_meta(p, "reproduce-appendix"));

    log << "reproduce-appendix: " << discrepancies.size() << " documented discrepancies\n";
    for (const auto& d : discrepancies) log << "  - " << d << "\n";
    return discrepancies.empty() ? 0 : 2;
}

}  // namespace

std::vector<std::string> command_names() {
    return {"coeffs",   "phase-diagram", "h-profile",  "region",   "surface",
            "period-t", "phase",         "residuals",  "ssfm-check", "search",
            "reproduce-appendix"};
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
    if (command == "coeffs") return cmd_coeffs(cfg, log);
    if (command == "phase-diagram") return cmd_phase_diagram(cfg, log);
    if (command == "h-profile") return cmd_h_profile(cfg, log);
    if (command == "region") return cmd_region(cfg, log);
    if (command == "surface") return cmd_surface(cfg, log);
    if (command == "period-t") return cmd_period_t(cfg, log);
    if (command == "phase") return cmd_phase(cfg, log);
    if (command == "residuals") return cmd_residuals(cfg, log);
    if (command == "ssfm-check") return cmd_ssfm_check(cfg, log);
    if (command == "search") return cmd_search(cfg, log);
    if (command == "reproduce-appendix") return cmd_reproduce_appendix(cfg, log);
    throw InvalidInputError("unknown command: " + command);
}

}  // namespace ellipnls
