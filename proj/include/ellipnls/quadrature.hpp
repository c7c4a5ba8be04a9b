#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "ellipnls/errors.hpp"

namespace ellipnls {

/// Adaptive Simpson integration to an absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int max_depth = 40) {
    struct Rec {
        static double go(const std::function<double(double)>& f, double a, double b, double fa,
                         double fm, double fb, double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0) throw NumericFailureError("adaptive_simpson depth exhausted");
            if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
            return go(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
                   go(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
        }
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::go(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Period of the oscillation of (y')^2 = R(y) between two simple roots lo < hi
/// of the quartic with expanded coefficients c[0..4] (highest degree first):
///   2 * int_lo^hi dy / sqrt(R(y)).
/// The substitution y = mid - half*cos(phi) absorbs the sqrt singularities; the
/// root factors are divided out by synthetic division, leaving a smooth
/// integrand for the composite Simpson rule.
inline double oscillation_period(const std::array<double, 5>& c, double lo, double hi,
                                 int n = 4096) {
    // deflate by (y - lo) then (y - hi): rest(y) = R(y) / ((y - lo)(y - hi))
    std::array<double, 4> q1{};
    q1[0] = c[0];
    for (int i = 1; i < 4; ++i) q1[i] = c[i] + lo * q1[i - 1];
    std::array<double, 3> q2{};
    q2[0] = q1[0];
    for (int i = 1; i < 3; ++i) q2[i] = q1[i] + hi * q2[i - 1];
    // R(y) = (y-lo)(y-hi) * q2(y); on (lo,hi) the first factor is negative, so
    // R >= 0 requires q2 <= 0 and R/((y-lo)(hi-y)) = -q2(y)
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    constexpr double kPi = 3.14159265358979323846;
    auto g = [&](double phi) {
        const double y = mid - half * std::cos(phi);
        const double rest = -((q2[0] * y + q2[1]) * y + q2[2]);
        if (!(rest > 0.0))
            throw NumericFailureError("oscillation_period: interior root between the endpoints");
        return 2.0 / std::sqrt(rest);
    };
    if (n % 2) ++n;
    const double h = kPi / n;
    double s = g(0.0) + g(kPi);
    for (int i = 1; i < n; ++i) s += g(i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace ellipnls
