#include "doctest.h"

#include <cmath>
#include <complex>

#include "ellipnls/weierstrass.hpp"
#include "support/oracles.hpp"

using namespace ellipnls;

namespace {

LatticeData make_lattice(double g2, double g3) {
    return lattice_from_invariants(EllipticInvariants::from(g2, g3));
}

double ode_residual(const LatticeData& lat, Complex z) {
    const auto v = wp_raw(z, lat);
    const Complex lhs = v.dp * v.dp;
    const Complex rhs = 4.0 * v.p * v.p * v.p - lat.inv.g2 * v.p - lat.inv.g3;
    return std::abs(lhs - rhs) / (1.0 + std::pow(std::abs(v.p), 3));
}

}  // namespace

TEST_CASE("invariants from quartic: gamma-only case") {
    const auto inv = invariants_from_quartic({0, 0, 1, 0, 0});
    CHECK(inv.g2 == doctest::Approx(3.0));
    CHECK(inv.g3 == doctest::Approx(-1.0));
}

TEST_CASE("invariants from quartic: beta = 0 reduces to the paper's t-lattice form") {
    const QuarticCoefficients q{0.5, 0.0, -1.0 / 3.0, 0.2549, 0.8};
    const auto inv = invariants_from_quartic(q);
    CHECK(inv.g2 == doctest::Approx(q.alpha * q.epsilon + 3 * q.gamma * q.gamma).epsilon(1e-15));
    CHECK(inv.g3 == doctest::Approx(q.alpha * q.gamma * q.epsilon - q.alpha * q.delta * q.delta -
                                    std::pow(q.gamma, 3)).epsilon(1e-15));
}

TEST_CASE("invariants from quartic: appendix R1 with corrected g2 map") {
    const auto inv = invariants_from_quartic({-16, 8, -1.6, 0.26, 0});
    CHECK(inv.g2 == doctest::Approx(-0.64).epsilon(1e-14));
    CHECK(inv.g3 == doctest::Approx(-1.4784).epsilon(1e-14));
    CHECK(inv.delta == doctest::Approx(std::pow(-0.64, 3) - 27 * 1.4784 * 1.4784));
    CHECK(inv.cls == DiscriminantClass::negative);
    CHECK_THROWS_AS(invariants_from_quartic({std::nan(""), 0, 0, 0, 0}), InvalidInputError);
}

TEST_CASE("lattice: lemniscatic half-period equals the period-integral oracle") {
    const auto lat = make_lattice(4.0, 0.0);
    CHECK(lat.e1 == doctest::Approx(1.0).epsilon(1e-12));
    // oracle: omega = int_{e1}^inf dt / sqrt(4t^3 - g2 t), substituted t = e1 + u^2/(1-u) style
    // handled by tanh-sinh on a finite reparameterization t = e1 + s/(1-s), s in (0,1)
    // s in (0,1) reparameterizes t = 1 + s/(1-s); da/db are the accurate
    // distances from the endpoints, so t-1 = da/db is cancellation-free
    const double om_oracle = oracle::tanh_sinh_integral(
        [&](double, double da, double db) {
            const double t = 1.0 + da / db;
            const double jac = 1.0 / (db * db);
            return jac / std::sqrt(4.0 * t * (t + 1.0) * (da / db));
        },
        0.0, 1.0, 1.0 / 128.0);
    CHECK(om_oracle == doctest::Approx(1.3110287771460599).epsilon(1e-12));
    CHECK(lat.omega == doctest::Approx(om_oracle).epsilon(1e-11));
    // p(omega) = e1
    const auto v = wp(Complex(lat.omega, 0), lat);
    CHECK(std::abs(v.p - Complex(lat.e1, 0)) <= 1e-10);
}

TEST_CASE("lattice: equianharmonic-like double root case g2=12, g3=-8") {
    const auto inv = EllipticInvariants::from(12.0, -8.0);
    CHECK(inv.cls == DiscriminantClass::zero);
    const auto lat = lattice_from_invariants(inv);
    // roots {1 (double), -2}
    CHECK(lat.e_roots[0].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lat.e_roots[1].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lat.e_roots[2].real() == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(lat.degenerate);
    CHECK(lat.dbl_root == doctest::Approx(1.0));
    CHECK(std::isinf(lat.omega));  // solitary degeneration has no real period
}

TEST_CASE("lattice invariants hold across random invariant pairs") {
    oracle::Rng rng(2024);
    for (int i = 0; i < 60; ++i) {
        const double g2 = rng.uniform(-10, 10), g3 = rng.uniform(-10, 10);
        const auto lat = make_lattice(g2, g3);
        double sum_re = 0, sum_im = 0;
        for (auto r : lat.e_roots) {
            const Complex res = 4.0 * r * r * r - g2 * r - g3;
            CHECK(std::abs(res) <= 1e-12 * std::max({1.0, std::abs(g2), std::abs(g3)}) * 50);
            sum_re += r.real();
            sum_im += r.imag();
        }
        CHECK(std::abs(sum_re) <= 1e-12 * (1 + std::abs(g2) + std::abs(g3)));
        CHECK(std::abs(sum_im) <= 1e-12);
        if (!lat.degenerate) {
            CHECK(lat.omega > 0.0);
            CHECK(std::isfinite(lat.omega));
        }
    }
}

TEST_CASE("wp satisfies its differential equation across discriminant classes") {
    oracle::Rng rng(99);
    int tested = 0;
    for (int i = 0; i < 200; ++i) {
        double g2 = rng.uniform(-10, 10), g3 = rng.uniform(-10, 10);
        if (i % 10 == 0) {
            // force near-degenerate: g3 = +/- sqrt(g2^3/27) + tiny
            if (g2 < 0.3) g2 = 0.3 + std::abs(g2);
            g3 = std::sqrt(g2 * g2 * g2 / 27.0) + rng.uniform(-1e-10, 1e-10);
        }
        const auto lat = make_lattice(g2, g3);
        if (lat.degenerate || !std::isfinite(lat.omega)) continue;
        ++tested;
        for (double frac : {0.05, 0.37, 0.95, 1.55, 1.95}) {
            const double res = ode_residual(lat, Complex(frac * lat.omega, 0.0));
            CHECK(res <= 1e-9);
        }
        // complex arguments too
        const double res = ode_residual(lat, Complex(0.4 * lat.omega, 0.3 * lat.omega));
        CHECK(res <= 1e-9);
    }
    CHECK(tested > 150);
}

TEST_CASE("wp near-origin Laurent asymptotics") {
    const auto lat = make_lattice(2.3, -1.1);
    const Complex z(1e-3, 0.0);
    const auto v = wp_raw(z, lat);
    CHECK(std::abs(z * z * v.p - 1.0) <= 1e-6);
}

TEST_CASE("degenerate closed form: g2=12, g3=-8 equals 1 + 3/sinh^2(sqrt3 z)") {
    const auto lat = make_lattice(12.0, -8.0);
    for (double z = 0.1; z <= 3.0; z += 0.13) {
        const auto v = wp_raw(Complex(z, 0), lat);
        const double ref = 1.0 + 3.0 / std::pow(std::sinh(std::sqrt(3.0) * z), 2);
        CHECK(std::abs(v.p - Complex(ref, 0)) <= 1e-9 * (1 + std::abs(ref)));
    }
}

TEST_CASE("degenerate reduction holds for random positive double roots") {
    oracle::Rng rng(314159);
    for (int trial = 0; trial < 20; ++trial) {
        const double c = rng.uniform(0.05, 4.0);
        const auto lat = make_lattice(12.0 * c * c, -8.0 * c * c * c);
        REQUIRE(lat.degenerate);
        const double k = std::sqrt(3.0 * c);
        for (double z = 0.1; z <= 3.0; z += 0.29) {
            const auto v = wp_raw(Complex(z, 0), lat);
            const double ref = c + 3.0 * c / std::pow(std::sinh(k * z), 2);
            CHECK(std::abs(v.p.real() - ref) <= 1e-9 * (1.0 + std::abs(ref)));
        }
    }
}

TEST_CASE("trigonometric degeneration (double root negative) evaluates and is periodic") {
    // c = -1: g2 = 12, g3 = +8; p = c - 3c/sin^2(kz), k = sqrt3
    const auto lat = make_lattice(12.0, 8.0);
    CHECK(lat.degenerate);
    CHECK(lat.dbl_root == doctest::Approx(-1.0));
    CHECK(lat.omega == doctest::Approx(3.14159265358979 / (2 * std::sqrt(3.0))).epsilon(1e-12));
    const auto a = wp_raw(Complex(0.4, 0), lat);
    const auto b = wp_raw(Complex(0.4 + 2 * lat.omega, 0), lat);
    CHECK(std::abs(a.p - b.p) <= 1e-10 * (1 + std::abs(a.p)));
    const double ref = -1.0 + 3.0 / std::pow(std::sin(std::sqrt(3.0) * 0.4), 2);
    CHECK(a.p.real() == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("lattice periodicity: p(z + 2 omega) = p(z)") {
    for (auto [g2, g3] : {std::pair{4.0, 0.0}, std::pair{-0.64, -1.4784}, std::pair{5.0, -3.0}}) {
        const auto lat = make_lattice(g2, g3);
        for (double f : {0.21, 0.77, 1.31}) {
            const auto a = wp_raw(Complex(f * lat.omega, 0), lat);
            const auto b = wp_raw(Complex(f * lat.omega + 2 * lat.omega, 0), lat);
            CHECK(std::abs(a.p - b.p) <= 1e-8 * (1 + std::abs(a.p)));
        }
        // both generators are periods
        const Complex z0(0.37 * lat.omega, 0.11 * lat.omega);
        for (const Complex gen : {lat.gen1, lat.gen2}) {
            const auto a = wp_raw(z0, lat);
            const auto b = wp_raw(z0 + gen, lat);
            CHECK(std::abs(a.p - b.p) <= 1e-8 * (1 + std::abs(a.p)));
        }
    }
}

TEST_CASE("real-axis reality of p and p'") {
    for (auto [g2, g3] : {std::pair{3.7, 1.9}, std::pair{-0.64, -1.4784}}) {
        const auto lat = make_lattice(g2, g3);
        for (double f : {0.11, 0.5, 0.93, 1.49}) {
            const auto v = wp_raw(Complex(f * lat.omega, 0), lat);
            CHECK(std::abs(v.p.imag()) <= 1e-12 * (1 + std::abs(v.p)));
            CHECK(std::abs(v.dp.imag()) <= 1e-12 * (1 + std::abs(v.dp)));
        }
    }
}

TEST_CASE("addition-free duplication consistency") {
    const auto lat = make_lattice(1.7, 0.9);
    for (double f : {0.31, 0.67, 1.13}) {
        const Complex z(f * lat.omega, 0.0);
        const auto direct = wp_raw(z, lat);
        const auto half = wp_raw(z / 2.0, lat);
        // duplicate (p, p') from z/2 by the algebraic rule
        const Complex ppp = 6.0 * half.p * half.p - lat.inv.g2 / 2.0;
        const Complex lam = ppp / (2.0 * half.dp);
        const Complex p2 = -2.0 * half.p + lam * lam;
        CHECK(std::abs(p2 - direct.p) <= 1e-10 * (1 + std::abs(direct.p)));
    }
}

TEST_CASE("sigma and zeta: small-argument forms, parity, derivatives") {
    const auto lat = make_lattice(2.2, 0.7);
    const Complex zs(1e-4, 0.0);
    const auto sv = sigma_zeta(zs, lat);
    CHECK(std::abs(sv.sigma / zs - 1.0) <= 1e-6);
    CHECK(std::abs(sv.zeta * zs - 1.0) <= 1e-6);

    const Complex z(0.4 * lat.omega, 0.2 * lat.omega);
    const auto plus = sigma_zeta(z, lat);
    const auto minus = sigma_zeta(-z, lat);
    CHECK(std::abs(plus.sigma + minus.sigma) <= 1e-14 * std::abs(plus.sigma));
    CHECK(std::abs(plus.zeta + minus.zeta) <= 1e-14 * std::abs(plus.zeta));

    // zeta' = -p and sigma'/sigma = zeta by central differences
    const double h = 1e-6;
    const auto zp = sigma_zeta(z + h, lat);
    const auto zm = sigma_zeta(z - h, lat);
    const auto pv = wp_raw(z, lat);
    const Complex dzeta = (zp.zeta - zm.zeta) / (2 * h);
    CHECK(std::abs(dzeta + pv.p) <= 1e-6 * (1 + std::abs(pv.p)));
    const Complex dlogsigma = (zp.sigma - zm.sigma) / (2 * h) / plus.sigma;
    CHECK(std::abs(dlogsigma - plus.zeta) <= 1e-6 * (1 + std::abs(plus.zeta)));
}

TEST_CASE("zeta quasi-periodicity: zeta(z + 2 omega) = zeta(z) + 2 eta") {
    for (auto [g2, g3] : {std::pair{4.0, 0.0}, std::pair{-0.64, -1.4784}}) {
        const auto lat = make_lattice(g2, g3);
        const Complex z(0.41 * lat.omega, 0.0);
        const auto a = sigma_zeta(z, lat);
        const auto b = sigma_zeta(z + 2 * lat.omega, lat);
        CHECK(std::abs(b.zeta - a.zeta - 2.0 * lat.eta) <= 1e-8 * (1 + std::abs(a.zeta)));
    }
}

TEST_CASE("sigma quasi-periodicity law") {
    const auto lat = make_lattice(3.0, 0.7);
    const Complex z(0.3 * lat.omega, 0.12 * lat.omega);
    const auto a = sigma_zeta(z, lat);
    const auto b = sigma_zeta(z + lat.gen1, lat);
    const Complex expected = -a.sigma * std::exp(lat.eta1 * (z + lat.gen1 / 2.0));
    CHECK(std::abs(b.sigma - expected) <= 1e-9 * (1 + std::abs(expected)));
}

TEST_CASE("legendre-type relation between quasi-period constants") {
    const auto lat = make_lattice(2.9, -1.4);
    // eta1 * gen2/2 - eta2 * gen1/2 = +/- i pi
    const Complex rel = lat.eta1 * lat.gen2 / 2.0 - lat.eta2 * lat.gen1 / 2.0;
    CHECK(std::abs(std::abs(rel.imag()) - 3.14159265358979323846) <= 1e-9);
    CHECK(std::abs(rel.real()) <= 1e-9);
}

TEST_CASE("wp pole guard") {
    const auto lat = make_lattice(4.0, 0.0);
    CHECK_THROWS_AS(wp(Complex(1e-12, 0), lat), PoleProximityError);
    try {
        wp(Complex(2 * lat.omega + 1e-12, 1e-13), lat);
        CHECK(false);
    } catch (const PoleProximityError& e) {
        CHECK(std::abs(e.nearest - Complex(2 * lat.omega, 0)) <= 1e-9);
    }
    CHECK_THROWS_AS(wp(Complex(std::nan(""), 0), lat), InvalidInputError);
}

TEST_CASE("wp_inverse: principal determination and round trips") {
    const auto lat = make_lattice(4.0, 0.0);
    // w = e1 -> v = omega
    const Complex v1 = wp_inverse(Complex(lat.e1, 0), lat);
    CHECK(std::abs(v1 - Complex(lat.omega, 0)) <= 1e-9 * lat.omega);
    // round trip at 0.7 omega
    const Complex z0(0.7 * lat.omega, 0.0);
    const auto pv = wp_raw(z0, lat);
    const Complex v = wp_inverse(pv.p, lat);
    const auto back = wp_raw(v, lat);
    CHECK(std::abs(back.p - pv.p) <= 1e-9 * (1 + std::abs(pv.p)));

    // appendix lattice, r3 = gamma1/2 below e1 -> complex v, round trip holds
    const auto lat2 = make_lattice(-0.64, -1.4784);
    const Complex w(-0.8, 0.0);
    const Complex vc = wp_inverse(w, lat2);
    const auto rt = wp_raw(vc, lat2);
    CHECK(std::abs(rt.p - w) <= 1e-9);
}
