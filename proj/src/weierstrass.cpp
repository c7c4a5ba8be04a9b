#include "ellipnls/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ellipnls {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool nearly_real(Complex v, double tol) { return std::abs(v.imag()) <= tol * (1.0 + std::abs(v.real())); }

// roots of 4 j^3 - g2 j - g3 = 0 by Cardano/trigonometric form (depressed cubic
// j^3 + p j + q with p = -g2/4, q = -g3/4)
std::array<Complex, 3> cubic_roots(double g2, double g3) {
    const double p = -g2 / 4.0;
    const double q = -g3 / 4.0;
    std::array<Complex, 3> r;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (p == 0.0 && q == 0.0) {
        r = {Complex(0), Complex(0), Complex(0)};
    } else if (disc >= 0.0) {
        // three real roots
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            r[k] = Complex(m * std::cos(theta - 2.0 * kPi * k / 3.0), 0.0);
    } else {
        // one real root, complex conjugate pair
        double t;
        if (p < 0.0) {
            const double m = 2.0 * std::sqrt(-p / 3.0);
            const double x = 3.0 * std::abs(q) / (p * m);  // |x| >= 1 up to rounding
            t = -m * std::cosh(std::acosh(std::max(1.0, -x)) / 3.0);
            if (q < 0.0) t = -t;
        } else {
            const double m = 2.0 * std::sqrt(p / 3.0);
            t = -m * std::sinh(std::asinh(3.0 * q / (p * m)) / 3.0);
        }
        // deflate: j^2 + t j + (t^2 + p) has the conjugate pair
        const double b = t, c = t * t + p;
        const double d = b * b - 4.0 * c;  // negative
        r[0] = Complex(t, 0.0);
        r[1] = Complex(-b / 2.0, std::sqrt(-d) / 2.0);
        r[2] = Complex(-b / 2.0, -std::sqrt(-d) / 2.0);
    }
    // Newton polish on 4j^3 - g2 j - g3; near-double roots are ill-conditioned,
    // so only well-contained steps are applied
    for (auto& x : r) {
        for (int it = 0; it < 4; ++it) {
            const Complex f = 4.0 * x * x * x - g2 * x - g3;
            const Complex df = 12.0 * x * x - g2;
            if (std::abs(df) < 1e-300) break;
            const Complex step = f / df;
            if (std::abs(step) > 0.05 * (1.0 + std::abs(x))) break;
            x -= step;
        }
        if (nearly_real(x, 1e-13)) x = Complex(x.real(), 0.0);
    }
    std::sort(r.begin(), r.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return r;
}

void laurent_coefficients(double g2, double g3, std::array<double, LatticeData::kSeriesTerms + 1>& c) {
    c.fill(0.0);
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for (int k = 4; k <= LatticeData::kSeriesTerms; ++k) {
        double s = 0.0;
        for (int m = 2; m <= k - 2; ++m) s += c[m] * c[k - m];
        c[k] = 3.0 * s / ((2 * k + 1) * (k - 3));
    }
}

struct SeriesValue {
    Complex p, dp, sigma, zeta;
};

SeriesValue series_eval(const LatticeData& lat, Complex z) {
    const Complex z2 = z * z;
    Complex p = 1.0 / z2;
    Complex dp = -2.0 / (z2 * z);
    Complex zeta = 1.0 / z;
    Complex logs = 0.0;  // log(sigma/z)
    Complex zpow = z;    // z^{2k-3} running power, starts at k=2 -> z
    for (int k = 2; k <= LatticeData::kSeriesTerms; ++k) {
        const double ck = lat.laurent[k];
        dp += (2 * k - 2) * ck * zpow;
        const Complex zp2 = zpow * z;  // z^{2k-2}
        p += ck * zp2;
        const Complex zp3 = zp2 * z;  // z^{2k-1}
        zeta -= ck * zp3 / static_cast<double>(2 * k - 1);
        logs -= ck * zp3 * z / static_cast<double>((2 * k - 1) * (2 * k));
        zpow = zp3;
    }
    return {p, dp, z * std::exp(logs), zeta};
}

// duplication step for (p, dp, sigma, zeta) from z to 2z
void duplicate(double g2, SeriesValue& v) {
    const Complex ppp = 6.0 * v.p * v.p - g2 / 2.0;   // p''
    const Complex pppp = 12.0 * v.p * v.dp;           // p'''
    const Complex lam = ppp / (2.0 * v.dp);
    const Complex lamp = (pppp * v.dp - ppp * ppp) / (2.0 * v.dp * v.dp);
    const Complex p2 = -2.0 * v.p + lam * lam;
    const Complex dp2 = -v.dp + lam * lamp;
    const Complex s2 = -(v.sigma * v.sigma) * (v.sigma * v.sigma) * v.dp;
    const Complex z2 = 2.0 * v.zeta + lam;
    v = {p2, dp2, s2, z2};
}

SeriesValue cell_eval(const LatticeData& lat, Complex z) {
    // |z| is assumed at most ~ the covering radius of the reduced cell
    const double thresh = 0.3 * lat.min_lattice_dist;
    int k = 0;
    while (std::abs(z) > thresh && k < 40) {
        z *= 0.5;
        ++k;
    }
    SeriesValue v = series_eval(lat, z);
    for (int i = 0; i < k; ++i) duplicate(lat.inv.g2, v);
    return v;
}

// degenerate closed forms: double root c, simple root -2c
//   c > 0:  p = c + 3c/sinh^2(kz),  k = sqrt(3c)   (solitary)
//   c < 0:  p = c - 3c/sin^2(kz),   k = sqrt(-3c)  (trigonometric)
//   c = 0:  p = 1/z^2
SeriesValue degenerate_eval(const LatticeData& lat, Complex z) {
    const double c = lat.dbl_root;
    if (c == 0.0) {
        const Complex z2 = z * z;
        return {1.0 / z2, -2.0 / (z2 * z), z, 1.0 / z};
    }
    if (c > 0.0) {
        const double k = std::sqrt(3.0 * c);
        const Complex s = std::sinh(k * z), co = std::cosh(k * z);
        const Complex p = c + 3.0 * c / (s * s);
        const Complex dp = -6.0 * c * k * co / (s * s * s);
        const Complex zeta = -c * z + k * co / s;
        const Complex sigma = std::exp(-c * z * z / 2.0) * s / k;
        return {p, dp, sigma, zeta};
    }
    const double k = std::sqrt(-3.0 * c);
    const Complex s = std::sin(k * z), co = std::cos(k * z);
    const Complex p = c - 3.0 * c / (s * s);
    const Complex dp = 6.0 * c * k * co / (s * s * s);
    const Complex zeta = -c * z + k * co / s;
    const Complex sigma = std::exp(-c * z * z / 2.0) * s / k;
    return {p, dp, sigma, zeta};
}

bool use_degenerate(const LatticeData& lat) { return lat.degenerate; }

SeriesValue eval_reduced(const LatticeData& lat, Complex z) {
    return use_degenerate(lat) ? degenerate_eval(lat, z) : cell_eval(lat, z);
}

}  // namespace

EllipticInvariants EllipticInvariants::from(double g2, double g3) {
    if (!std::isfinite(g2) || !std::isfinite(g3)) throw InvalidInputError("non-finite invariants");
    EllipticInvariants inv;
    inv.g2 = g2;
    inv.g3 = g3;
    inv.delta = g2 * g2 * g2 - 27.0 * g3 * g3;
    const double tol = 1e-12 * std::max({1.0, std::abs(g2 * g2 * g2), 27.0 * g3 * g3});
    if (std::abs(inv.delta) <= tol)
        inv.cls = DiscriminantClass::zero;
    else
        inv.cls = inv.delta > 0 ? DiscriminantClass::positive : DiscriminantClass::negative;
    return inv;
}

EllipticInvariants invariants_from_quartic(const QuarticCoefficients& q) {
    for (double c : {q.alpha, q.beta, q.gamma, q.delta, q.epsilon})
        if (!std::isfinite(c)) throw InvalidInputError("non-finite quartic coefficient");
    const double g2 = q.alpha * q.epsilon - 4.0 * q.beta * q.delta + 3.0 * q.gamma * q.gamma;
    const double g3 = q.alpha * q.gamma * q.epsilon + 2.0 * q.beta * q.gamma * q.delta -
                      q.alpha * q.delta * q.delta - q.gamma * q.gamma * q.gamma -
                      q.beta * q.beta * q.epsilon;
    return EllipticInvariants::from(g2, g3);
}

LatticeData lattice_from_invariants(const EllipticInvariants& inv) {
    LatticeData lat;
    lat.inv = inv;
    lat.e_roots = cubic_roots(inv.g2, inv.g3);
    laurent_coefficients(inv.g2, inv.g3, lat.laurent);

    double e1 = -std::numeric_limits<double>::infinity();
    for (auto r : lat.e_roots)
        if (r.imag() == 0.0) e1 = std::max(e1, r.real());
    if (!std::isfinite(e1))
        throw InternalError("no real cubic root for real invariants");  // cannot occur
    lat.e1 = e1;

    if (inv.cls == DiscriminantClass::zero) {
        lat.degenerate = true;
        // double root c, simple -2c: c = -g3/... pick from the root list (two closest roots)
        if (inv.g2 == 0.0 && inv.g3 == 0.0) {
            lat.dbl_root = 0.0;
            lat.omega = std::numeric_limits<double>::infinity();
            lat.eta = 0.0;
            lat.gen1 = lat.gen2 = 0.0;
            lat.min_lattice_dist = std::numeric_limits<double>::infinity();
            return lat;
        }
        // roots are {c, c, -2c}; at delta = 0 the double root has the closed form
        // c = -3 g3 / (2 g2), exact and stable (root-pair averaging is not)
        const double c = -3.0 * inv.g3 / (2.0 * inv.g2);
        lat.dbl_root = c;
        lat.e_roots = c > 0 ? std::array<Complex, 3>{Complex(c, 0), Complex(c, 0),
                                                     Complex(-2 * c, 0)}
                            : std::array<Complex, 3>{Complex(-2 * c, 0), Complex(c, 0),
                                                     Complex(c, 0)};
        lat.e1 = std::max(c, -2.0 * c);
        if (c > 0.0) {
            // solitary: p = c + 3c/sinh^2, no real period
            lat.omega = std::numeric_limits<double>::infinity();
            lat.eta = 0.0;
            lat.gen1 = lat.gen2 = 0.0;
            lat.min_lattice_dist = std::numeric_limits<double>::infinity();
        } else {
            const double k = std::sqrt(-3.0 * c);
            lat.omega = kPi / (2.0 * k);
            // zeta(omega) = -c omega (cot term vanishes at k z = pi/2)
            lat.eta = -c * lat.omega;
            lat.gen1 = Complex(2.0 * lat.omega, 0.0);
            lat.gen2 = 0.0;  // second period degenerates to i*inf
            lat.eta1 = Complex(2.0 * lat.eta, 0.0);
            lat.min_lattice_dist = 2.0 * lat.omega;
        }
        return lat;
    }

    // real half-period from the largest real root via Carlson R_F
    const auto partners_of_largest_real = [](const std::array<Complex, 3>& roots,
                                             double largest) {
        std::array<Complex, 2> others;
        int idx = 0;
        bool skipped = false;
        for (auto r : roots) {
            if (!skipped && r.imag() == 0.0 && r.real() == largest) {
                skipped = true;
                continue;
            }
            others[idx++] = r;
        }
        return others;
    };
    const auto others = partners_of_largest_real(lat.e_roots, e1);
    const Complex om = carlson_rf(0.0, Complex(e1, 0) - others[0], Complex(e1, 0) - others[1]);
    lat.omega = om.real();
    if (!(lat.omega > 0.0) || !std::isfinite(lat.omega))
        throw NumericFailureError("half-period computation failed");

    // imaginary-direction half-period via p(iz; g2, g3) = -p(z; g2, -g3)
    const auto flip_roots = cubic_roots(inv.g2, -inv.g3);
    double e1f = -std::numeric_limits<double>::infinity();
    for (auto r : flip_roots)
        if (r.imag() == 0.0) e1f = std::max(e1f, r.real());
    const auto of = partners_of_largest_real(flip_roots, e1f);
    const double b = carlson_rf(0.0, Complex(e1f, 0) - of[0], Complex(e1f, 0) - of[1]).real();

    if (inv.cls == DiscriminantClass::positive) {
        lat.gen1 = Complex(2.0 * lat.omega, 0.0);
        lat.gen2 = Complex(0.0, 2.0 * b);
    } else {
        // rhombic: generators p, conj(p) with p = omega + i b
        lat.gen1 = Complex(lat.omega, b);
        lat.gen2 = Complex(lat.omega, -b);
    }
    {
        double md = std::numeric_limits<double>::infinity();
        for (int m = -1; m <= 1; ++m)
            for (int n = -1; n <= 1; ++n) {
                if (m == 0 && n == 0) continue;
                md = std::min(md, std::abs(static_cast<double>(m) * lat.gen1 +
                                           static_cast<double>(n) * lat.gen2));
            }
        lat.min_lattice_dist = md;
    }

    lat.eta1 = 2.0 * cell_eval(lat, lat.gen1 / 2.0).zeta;
    lat.eta2 = 2.0 * cell_eval(lat, lat.gen2 / 2.0).zeta;
    // eta = zeta(omega): omega = gen1/2 (rectangular) or (gen1+gen2)/2 (rhombic)
    if (inv.cls == DiscriminantClass::positive)
        lat.eta = (lat.eta1 / 2.0).real();
    else
        lat.eta = ((lat.eta1 + lat.eta2) / 2.0).real();
    return lat;
}

Complex lattice_reduce(Complex z, const LatticeData& lat, long& m, long& n) {
    m = n = 0;
    if (lat.degenerate) {
        if (lat.dbl_root < 0.0) {
            // only the real period survives
            const double per = lat.gen1.real();
            const double k = std::floor(z.real() / per + 0.5);
            m = static_cast<long>(k);
            return z - k * per;
        }
        return z;
    }
    // solve z = alpha gen1 + beta gen2 (real 2x2 system)
    const double a11 = lat.gen1.real(), a12 = lat.gen2.real();
    const double a21 = lat.gen1.imag(), a22 = lat.gen2.imag();
    const double det = a11 * a22 - a12 * a21;
    const double alpha = (z.real() * a22 - z.imag() * a12) / det;
    const double beta = (a11 * z.imag() - a21 * z.real()) / det;
    long m0 = static_cast<long>(std::floor(alpha + 0.5));
    long n0 = static_cast<long>(std::floor(beta + 0.5));
    // pick the neighbor translate minimizing |z_red|
    double best = std::numeric_limits<double>::infinity();
    Complex zbest = z;
    for (long dm = -1; dm <= 1; ++dm)
        for (long dn = -1; dn <= 1; ++dn) {
            const Complex cand = z - static_cast<double>(m0 + dm) * lat.gen1 -
                                 static_cast<double>(n0 + dn) * lat.gen2;
            if (std::abs(cand) < best) {
                best = std::abs(cand);
                zbest = cand;
                m = m0 + dm;
                n = n0 + dn;
            }
        }
    return zbest;
}

WpValue wp_raw(Complex z, const LatticeData& lat) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidInputError("non-finite argument");
    long m, n;
    const Complex zr = lattice_reduce(z, lat, m, n);
    if (zr == Complex(0.0, 0.0)) {
        const double inf = std::numeric_limits<double>::infinity();
        return {Complex(inf, 0), Complex(inf, 0)};
    }
    const auto v = eval_reduced(lat, zr);
    return {v.p, v.dp};
}

WpValue wp(Complex z, const LatticeData& lat, double pole_eps) {
    long m, n;
    const Complex zr = lattice_reduce(z, lat, m, n);
    const double scale = std::isfinite(lat.min_lattice_dist) ? lat.min_lattice_dist : 1.0;
    if (std::abs(zr) < pole_eps * scale) {
        const Complex nearest = z - zr;
        throw PoleProximityError("wp argument within pole-proximity epsilon of a lattice point",
                                 nearest);
    }
    return wp_raw(z, lat);
}

SigmaZeta sigma_zeta(Complex z, const LatticeData& lat) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidInputError("non-finite argument");
    long m, n;
    const Complex zr = lattice_reduce(z, lat, m, n);
    if (zr == Complex(0.0, 0.0)) {
        const double inf = std::numeric_limits<double>::infinity();
        return {Complex(0.0, 0.0), Complex(inf, inf)};
    }
    auto v = eval_reduced(lat, zr);
    if (m == 0 && n == 0) return {v.sigma, v.zeta};
    if (lat.degenerate) {
        // only the trigonometric case reduces (real period 2w, eta from lat)
        // sigma(z + 2w m) = (-1)^m sigma(z) exp(2 m eta (z_r + m w))
        const double w = lat.gen1.real() / 2.0;
        const double dm = static_cast<double>(m);
        const Complex factor = std::exp(2.0 * dm * lat.eta * (zr + dm * w));
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        return {sign * v.sigma * factor, v.zeta + 2.0 * dm * lat.eta};
    }
    const double dm = static_cast<double>(m), dn = static_cast<double>(n);
    const Complex omega_mn = dm * lat.gen1 + dn * lat.gen2;
    const Complex eta_mn = dm * lat.eta1 + dn * lat.eta2;
    const double sign = ((m + n + m * n) % 2 == 0) ? 1.0 : -1.0;
    const Complex sigma = sign * v.sigma * std::exp(eta_mn * (zr + omega_mn / 2.0));
    return {sigma, v.zeta + eta_mn};
}

Complex carlson_rf(Complex x, Complex y, Complex z) {
    // Carlson's duplication algorithm (Numerical Computation of Real or Complex
    // Elliptic Integrals, 1995) with principal square roots
    const Complex A0 = (x + y + z) / 3.0;
    Complex A = A0, X = x, Y = y, Z = z;
    const double q0 = std::max({std::abs(A0 - x), std::abs(A0 - y), std::abs(A0 - z)});
    const double Q = std::pow(3.0 * 1e-18, -1.0 / 6.0) * q0;
    double fourm = 1.0;
    int it = 0;
    while (Q > fourm * std::abs(A) && it < 80) {
        const Complex sx = std::sqrt(X), sy = std::sqrt(Y), sz = std::sqrt(Z);
        const Complex lam = sx * sy + sy * sz + sz * sx;
        A = (A + lam) / 4.0;
        X = (X + lam) / 4.0;
        Y = (Y + lam) / 4.0;
        Z = (Z + lam) / 4.0;
        fourm *= 4.0;
        ++it;
    }
    const Complex ex = (A0 - x) / (fourm * A);
    const Complex ey = (A0 - y) / (fourm * A);
    const Complex ez = -(ex + ey);
    const Complex e2 = ex * ey - ez * ez;
    const Complex e3 = ex * ey * ez;
    const Complex series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0;
    return series / std::sqrt(A);
}

Complex wp_inverse(Complex w, const LatticeData& lat) {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw InvalidInputError("non-finite argument");
    if (lat.degenerate && !std::isfinite(lat.min_lattice_dist) && lat.dbl_root == 0.0) {
        // p = 1/z^2
        return 1.0 / std::sqrt(w);
    }
    Complex v = carlson_rf(w - lat.e_roots[0], w - lat.e_roots[1], w - lat.e_roots[2]);
    // Newton polish against our own evaluation
    double best = std::numeric_limits<double>::infinity();
    Complex vbest = v;
    for (int it = 0; it < 60; ++it) {
        const auto pv = wp_raw(v, lat);
        const double err = std::abs(pv.p - w);
        if (err < best) {
            best = err;
            vbest = v;
        }
        if (err <= 1e-14 * (1.0 + std::abs(w))) break;
        if (std::abs(pv.dp) < 1e-140) break;
        Complex step = (pv.p - w) / pv.dp;
        // damp huge steps (near the branch points)
        const double cap = 0.25 * (std::isfinite(lat.min_lattice_dist) ? lat.min_lattice_dist : 1.0);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        v -= step;
    }
    {
        const auto pv = wp_raw(vbest, lat);
        if (std::abs(pv.p - w) > 1e-8 * (1.0 + std::abs(w)))
            throw NumericFailureError("wp_inverse failed to converge",
                                      "target |P(v)-w| above tolerance");
    }
    long m, n;
    Complex vr = lattice_reduce(vbest, lat, m, n);
    // principal determination: representative with Im >= 0, and Re >= 0 at Im == 0
    if (vr.imag() < 0.0 || (vr.imag() == 0.0 && vr.real() < 0.0)) vr = -vr;
    return vr;
}

}  // namespace ellipnls
