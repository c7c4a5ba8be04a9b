#include "doctest.h"

#include <cmath>

#include "ellipnls/spectral.hpp"

using namespace ellipnls;

namespace {
constexpr double kTwoPi = 6.283185307179586476925;
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(SpectralConfig({-1.0, 256, 1e-3, 1.0, 0}).validate(), InvalidInputError);
    CHECK_THROWS_AS(SpectralConfig({10.0, 100, 1e-3, 1.0, 0}).validate(), InvalidInputError);
    CHECK_THROWS_AS(SpectralConfig({10.0, 32, 1e-3, 1.0, 0}).validate(), InvalidInputError);
    CHECK_THROWS_AS(SpectralConfig({10.0, 256, 0.0, 1.0, 0}).validate(), InvalidInputError);
    SpectralConfig ok{10.0, 256, 1e-3, 1.0, 0};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("plane wave is exact: Psi(t, z) = e^{i a A^2 z} Psi(t, 0)") {
    const double a = 1.0;
    const int n = 256;
    SpectralConfig cfg{12.0, n, 1e-4, 1.0, 0};
    std::vector<Complex> init(n, Complex(1.0, 0.0));
    const auto field = propagate(init, cfg, a);
    const Complex expect = std::exp(Complex(0.0, field.z_grid.back()));
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(field.at(i, field.z_grid.size() - 1) - expect));
    CHECK(err <= 1e-8);
}

TEST_CASE("power conservation and hamiltonian drift") {
    const double a = 1.0, W = 4.0 * kTwoPi;
    const int n = 256;
    SpectralConfig cfg{W, n, 1e-4, 1.0, 0};
    std::vector<Complex> init(n);
    for (int i = 0; i < n; ++i) {
        const double t = -W / 2 + W * i / n;
        init[i] = Complex(1.0 + 0.4 * std::cos(kTwoPi * t / W), 0.1 * std::sin(kTwoPi * t / W));
    }
    const auto field = propagate(init, cfg, a);
    const auto c0 = conserved_quantities(init, W, a);
    std::vector<Complex> last(n);
    for (int i = 0; i < n; ++i) last[i] = field.at(i, field.z_grid.size() - 1);
    const auto c1 = conserved_quantities(last, W, a);
    CHECK(std::abs(c1.power - c0.power) / c0.power <= 1e-10 * field.z_grid.back());
    CHECK(std::abs(c1.hamiltonian - c0.hamiltonian) /
              (1.0 + std::abs(c0.hamiltonian)) <= 1e-6);
}

TEST_CASE("time reversal returns the initial line") {
    const double a = -1.0, W = 20.0;
    const int n = 256;
    SpectralConfig cfg{W, n, 1e-4, 0.5, 0};
    std::vector<Complex> init(n);
    for (int i = 0; i < n; ++i) {
        const double t = -W / 2 + W * i / n;
        init[i] = Complex(0.9 * std::exp(-0.2 * t * t) + 0.5, 0.0);
    }
    const auto fwd = propagate(init, cfg, a);
    std::vector<Complex> rev(n);
    for (int i = 0; i < n; ++i)
        rev[i] = std::conj(fwd.at(i, fwd.z_grid.size() - 1));
    const auto back = propagate(rev, cfg, a);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(std::conj(back.at(i, back.z_grid.size() - 1)) - init[i]));
    CHECK(err <= 1e-7);
}

TEST_CASE("second-order convergence in dz (step halving)") {
    const double a = 1.0, W = 4.0 * kTwoPi;
    const int n = 128;
    std::vector<Complex> init(n);
    for (int i = 0; i < n; ++i) {
        const double t = -W / 2 + W * i / n;
        init[i] = Complex(1.0 + 0.3 * std::cos(kTwoPi * t / W), 0.0);
    }
    // reference at a very fine step
    const auto fine = propagate(init, {W, n, 1.25e-5, 0.4, 0}, a);
    const auto err_at = [&](double dz) {
        const auto f = propagate(init, {W, n, dz, 0.4, 0}, a);
        double e = 0.0;
        for (int i = 0; i < n; ++i)
            e = std::max(e, std::abs(f.at(i, f.z_grid.size() - 1) -
                                     fine.at(i, fine.z_grid.size() - 1)));
        return e;
    };
    const double e1 = err_at(8e-4);
    const double e2 = err_at(4e-4);
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
}

TEST_CASE("spectral derivative is exact on band-limited fixtures") {
    const double W = 2.0 * kTwoPi;
    const int n = 128;
    std::vector<Complex> line(n);
    for (int i = 0; i < n; ++i) {
        const double t = W * i / n;
        line[i] = Complex(std::sin(3.0 * t) + 0.5 * std::cos(7.0 * t), 0.0);
    }
    const auto d = spectral_derivative(line, W);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = W * i / n;
        const double exact = 3.0 * std::cos(3.0 * t) - 3.5 * std::sin(7.0 * t);
        err = std::max(err, std::abs(d[i] - Complex(exact, 0.0)));
    }
    CHECK(err <= 1e-12);
}

TEST_CASE("conserved quantities on simple fixtures") {
    const double W = 10.0;
    const int n = 128;
    std::vector<Complex> plane(n, Complex(2.0, 0.0));
    const auto c = conserved_quantities(plane, W, 1.0);
    CHECK(c.power == doctest::Approx(4.0 * W).epsilon(1e-12));
    std::vector<Complex> zero(n, Complex(0.0, 0.0));
    const auto cz = conserved_quantities(zero, W, 1.0);
    CHECK(cz.power == 0.0);
    CHECK(cz.hamiltonian == 0.0);
}
