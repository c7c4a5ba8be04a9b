#include "ellipnls/physicality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace ellipnls {

namespace {

// minimize a sampled function over [lo, hi]: coarse scan + golden-section refinement
double sampled_min(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double best = std::numeric_limits<double>::infinity();
    double xbest = lo;
    for (int i = 0; i <= samples; ++i) {
        const double x = lo + (hi - lo) * i / samples;
        const double v = f(x);
        if (v < best) {
            best = v;
            xbest = x;
        }
    }
    const double w = (hi - lo) / samples;
    double a = std::max(lo, xbest - w), b = std::min(hi, xbest + w);
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * (1.0 + std::abs(xbest)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::min({best, fc, fd});
}

int worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("ELLIPNLS_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return static_cast<int>(n);
}

// largest real root of 4 j^3 - g2 j - g3 via the lattice machinery's cubic
double largest_real_root(const EllipticInvariants& inv) {
    const auto lat = lattice_from_invariants(inv);
    return lat.e1;
}

}  // namespace

HBehavior classify_behavior(const EllipticInvariants& inv) {
    if (inv.cls != DiscriminantClass::zero) return HBehavior::periodic;
    if (inv.g2 > 0.0 && inv.g3 > 0.0) return HBehavior::periodic;
    if (inv.g2 >= 0.0 && inv.g3 <= 0.0) return HBehavior::solitary_like;
    return HBehavior::unclassified;
}

HPhysicalityReport check_h(const SolutionParams& p) {
    HPhysicalityReport rep;
    try {
        p.validate();
    } catch (const Error& e) {
        rep.detail = e.what();
        return rep;
    }
    const auto q1 = r1_coefficients(p);
    const auto inv = invariants_from_quartic(q1);
    rep.behavior = classify_behavior(inv);
    rep.r1_at_h0 = evaluate(q1, p.h0);
    rep.delta1 = q1.delta;
    rep.e1 = largest_real_root(inv);
    const double scale = std::max(1.0, coefficient_scale(q1));
    const bool r1_zero = std::abs(rep.r1_at_h0) <= 1e-12 * scale;

    if (p.h0 == 0.0) {
        // Eq. (23): e1 > gamma1/2 and delta1 > 0
        rep.h_case = HCase::zero_root;
        rep.threshold = q1.gamma / 2.0;
        rep.satisfied = (rep.e1 > rep.threshold) && (q1.delta > 0.0);
        if (!rep.satisfied)
            rep.detail = q1.delta > 0.0 ? "e1 <= gamma1/2" : "delta1 <= 0";
        return rep;
    }

    const auto numerator_min = [&](double slope) {
        // N1 >= 0 iff h >= 0 (the denominator is positive); sample h over one period
        const auto hs = HSolution::build(p, slope);
        const double Lz = hs.period();
        const double span = std::isfinite(Lz) ? Lz : 10.0;
        return sampled_min([&](double z) { return hs.eval(z); }, 0.0, span, 512);
    };

    if (r1_zero) {
        // Eq. (24): e1 > (gamma1 + 2 beta1 h0 + alpha1 h0^2)/2 and N1 >= 0
        rep.h_case = HCase::simple_root;
        rep.threshold = (q1.gamma + 2.0 * q1.beta * p.h0 + q1.alpha * p.h0 * p.h0) / 2.0;
        if (rep.e1 <= rep.threshold) {
            rep.satisfied = false;
            rep.detail = "e1 <= (gamma1 + 2 beta1 h0 + alpha1 h0^2)/2";
            return rep;
        }
        try {
            rep.numerator_min = numerator_min(+1.0);
        } catch (const Error& e) {
            rep.satisfied = false;
            rep.detail = e.what();
            return rep;
        }
        rep.satisfied = rep.numerator_min >= -1e-10 * std::max(1.0, std::abs(p.h0));
        if (!rep.satisfied) rep.detail = "numerator N1 attains negative values";
        return rep;
    }

    // Eq. (22): R1(h0) > 0, h0 > 0, with nonnegative numerator
    rep.h_case = HCase::interior;
    rep.threshold = 0.0;
    if (rep.r1_at_h0 <= 0.0) {
        rep.satisfied = false;
        rep.detail = "R1(h0) < 0: h not real at h0";
        return rep;
    }
    try {
        rep.numerator_min = numerator_min(+1.0);
    } catch (const Error& e) {
        rep.satisfied = false;
        rep.detail = e.what();
        return rep;
    }
    rep.satisfied = rep.numerator_min >= -1e-10 * std::max(1.0, std::abs(p.h0));
    if (!rep.satisfied) rep.detail = "numerator N1 attains negative values";
    return rep;
}

AdmissibleRegion admissible_region(const SolutionParams& p, double f0_min, double f0_max,
                                   double z_min, double z_max, int nf0, int nz,
                                   Gamma2Convention conv) {
    if (nf0 < 8 || nz < 8) throw InvalidInputError("region resolution must be >= 8");
    AdmissibleRegion reg;
    reg.f0_grid.resize(nf0);
    reg.z_grid.resize(nz);
    for (int i = 0; i < nf0; ++i)
        reg.f0_grid[i] = f0_min + (f0_max - f0_min) * i / (nf0 - 1);
    for (int j = 0; j < nz; ++j) reg.z_grid[j] = z_min + (z_max - z_min) * j / (nz - 1);
    reg.mask.assign(static_cast<std::size_t>(nf0) * nz, 0);
    reg.mask_plus.assign(reg.mask.size(), 0);
    reg.mask_minus.assign(reg.mask.size(), 0);

    const auto hs = HSolution::build(p);

    struct ColumnData {
        QuarticCoefficients q2;
        double e1t;
        bool valid;
    };
    std::vector<ColumnData> cols(nz);

    // per-z constructions are independent; partition columns across workers
    const int nworkers = worker_count();
    std::atomic<int> next{0};
    auto column_job = [&]() {
        int j;
        while ((j = next.fetch_add(1)) < nz) {
            try {
                double h, hz;
                hs.eval_both(reg.z_grid[j], h, hz);
                if (h < 0.0 && h > -1e-10) h = 0.0;
                ColumnData cd;
                cd.q2 = r2_coefficients(p, h, hz, +1.0, conv);
                cd.e1t = largest_real_root(invariants_from_quartic(cd.q2));
                cd.valid = true;
                cols[j] = cd;
            } catch (const Error&) {
                cols[j] = {QuarticCoefficients{}, 0.0, false};
            }
        }
    };
    {
        std::vector<std::thread> pool;
        for (int w = 1; w < nworkers; ++w) pool.emplace_back(column_job);
        column_job();
        for (auto& th : pool) th.join();
    }

    // margins per sign; admissible iff R2 >= -tol and the e1t inequality holds.
    // For a > 0 strict R2 > 0 suffices (alpha2 < 0 bounds the oscillation);
    // the e1t bound only applies on the R2 = 0 boundary itself.
    const auto margins = [&p](const QuarticCoefficients& q2, double e1t, double f0,
                              double& r2v, double& mplus, double& mminus) {
        r2v = evaluate(q2, f0);
        const double tol = 1e-12 * std::max(1.0, coefficient_scale(q2));
        const double base = q2.gamma + q2.alpha * f0 * f0;
        if (p.a > 0.0) {
            if (r2v > tol)
                mplus = mminus = r2v;
            else
                mplus = mminus = e1t - base / 2.0;  // Eq. (26)
        } else {
            const double s = q2.alpha * r2v > 0.0 ? std::sqrt(q2.alpha * r2v) : 0.0;
            mplus = e1t - (base + s) / 2.0;   // Eq. (27), + sign
            mminus = e1t - (base - s) / 2.0;  // Eq. (27), - sign
        }
    };

    for (int j = 0; j < nz; ++j) {
        if (!cols[j].valid) continue;
        for (int i = 0; i < nf0; ++i) {
            double r2v, mp, mm;
            margins(cols[j].q2, cols[j].e1t, reg.f0_grid[i], r2v, mp, mm);
            const double tol = 1e-12 * std::max(1.0, coefficient_scale(cols[j].q2));
            const bool r2ok = r2v >= -tol;
            const std::size_t k = reg.index(j, i);
            reg.mask_plus[k] = r2ok && mp > 0.0;
            reg.mask_minus[k] = r2ok && mm > 0.0;
            reg.mask[k] = reg.mask_plus[k] && reg.mask_minus[k];
        }
    }

    // boundary: straddling cell pairs refined by bisection on the overall margin
    const auto margin_at = [&](double f0, double z) {
        try {
            double h, hz;
            hs.eval_both(z, h, hz);
            if (h < 0.0 && h > -1e-10) h = 0.0;
            const auto q2 = r2_coefficients(p, h, hz, +1.0, conv);
            const double e1t = largest_real_root(invariants_from_quartic(q2));
            double r2v, mp, mm;
            margins(q2, e1t, f0, r2v, mp, mm);
            return std::min({r2v, mp, mm});
        } catch (const Error&) {
            return -1.0;
        }
    };
    for (int j = 0; j < nz; ++j) {
        for (int i = 0; i < nf0; ++i) {
            const std::size_t k = reg.index(j, i);
            // look right and up for flips
            for (int d = 0; d < 2; ++d) {
                const int i2 = d == 0 ? i + 1 : i;
                const int j2 = d == 0 ? j : j + 1;
                if (i2 >= nf0 || j2 >= nz) continue;
                const std::size_t k2 = reg.index(j2, i2);
                if (reg.mask[k] == reg.mask[k2]) continue;
                double fa = reg.f0_grid[i], za = reg.z_grid[j];
                double fb = reg.f0_grid[i2], zb = reg.z_grid[j2];
                double ma = margin_at(fa, za);
                for (int it = 0; it < 60; ++it) {
                    const double fm = 0.5 * (fa + fb), zm = 0.5 * (za + zb);
                    const double mmid = margin_at(fm, zm);
                    if (std::abs(mmid) <= 1e-6) {
                        fa = fm;
                        za = zm;
                        break;
                    }
                    if ((ma > 0) == (mmid > 0)) {
                        fa = fm;
                        za = zm;
                        ma = mmid;
                    } else {
                        fb = fm;
                        zb = zm;
                    }
                }
                reg.boundary.emplace_back(0.5 * (fa + fb), 0.5 * (za + zb));
            }
        }
    }
    return reg;
}

}  // namespace ellipnls
