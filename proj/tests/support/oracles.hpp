#pragma once

// Test-side oracles, kept independent of the library evaluation paths they check:
// sign-scan bisection root counting, endpoint-aware quadrature of period
// integrals, and a tiny deterministic RNG for property sweeps.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// xorshift-based deterministic generator; avoids platform differences in <random>
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform(double lo, double hi) {
        state_ ^= state_ << 13;
        state_ ^= state_ >> 7;
        state_ ^= state_ << 17;
        const double u = static_cast<double>(state_ >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

private:
    std::uint64_t state_;
};

// roots of f on [lo, hi] by sign scan + bisection
inline std::vector<double> bisection_roots(const std::function<double(double)>& f, double lo,
                                           double hi, int scan_points = 2000) {
    std::vector<double> roots;
    double xprev = lo, fprev = f(lo);
    for (int i = 1; i <= scan_points; ++i) {
        const double x = lo + (hi - lo) * i / scan_points;
        const double fx = f(x);
        if (fprev == 0.0) roots.push_back(xprev);
        if (fprev * fx < 0.0) {
            double a = xprev, b = x, fa = fprev;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        xprev = x;
        fprev = fx;
    }
    return roots;
}

// integral over (a, b) with integrable endpoint singularities by a single-pass
// tanh-sinh rule. The integrand receives (x, da, db) where da = x - a and
// db = b - x are computed without cancellation, so 1/sqrt(endpoint) behavior
// can be evaluated accurately arbitrarily close to the ends.
inline double tanh_sinh_integral(const std::function<double(double, double, double)>& g,
                                 double a, double b, double step = 1.0 / 64.0) {
    constexpr double kHalfPi = 1.57079632679489661923;
    const double d = 0.5 * (b - a);
    double s = 0.0;
    for (int k = 0;; ++k) {
        const double t = step * k;
        const double u = kHalfPi * std::sinh(t);
        const double w = kHalfPi * std::cosh(t) / std::pow(std::cosh(u), 2);
        // 1 -/+ tanh(u) without cancellation
        const double em = 2.0 / (std::exp(2.0 * u) + 1.0);   // 1 - tanh(u)
        const double ep = 2.0 - em;                          // 1 + tanh(u)
        if (w < 1e-280 || em == 0.0) break;
        double term;
        if (k == 0) {
            term = w * g(a + d, d, d);
        } else {
            const double xr = b - d * em;  // node near b
            const double xl = a + d * em;  // node near a
            term = w * (g(xr, d * ep, d * em) + g(xl, d * em, d * ep));
        }
        if (std::isfinite(term)) s += term;
        if (t > 6.8) break;
    }
    return d * step * s;
}

}  // namespace oracle
