#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "ellipnls/errors.hpp"

namespace ellipnls {

/// Adaptive Dormand-Prince 5(4) integrator for small fixed-dimension systems,
/// with cubic-Hermite dense output on accepted steps.
template <int N>
class Dopri5 {
public:
    using State = std::array<double, N>;
    using Rhs = std::function<void(double, const State&, State&)>;

    struct Step {
        double x0, x1;
        State y0, y1, f0, f1;  // endpoint values and derivatives for Hermite interpolation
    };

    Dopri5(Rhs rhs, double rtol = 1e-10, double atol = 1e-12)
        : rhs_(std::move(rhs)), rtol_(rtol), atol_(atol) {}

    /// integrate from (x0, y0) to x_end, recording accepted steps
    std::vector<Step> integrate(double x0, State y0, double x_end) {
        std::vector<Step> steps;
        const double dir = x_end >= x0 ? 1.0 : -1.0;
        double h = dir * std::max(1e-8, std::abs(x_end - x0) / 1000.0);
        double x = x0;
        State y = y0, f;
        rhs_(x, y, f);
        int rejects_in_a_row = 0;
        while (dir * (x_end - x) > 1e-14 * (1.0 + std::abs(x))) {
            if (dir * (x + h - x_end) > 0.0) h = x_end - x;
            State ynew, fnew;
            double err;
            step(x, y, f, h, ynew, fnew, err);
            if (err <= 1.0) {
                steps.push_back({x, x + h, y, ynew, f, fnew});
                x += h;
                y = ynew;
                f = fnew;  // FSAL
                rejects_in_a_row = 0;
            } else if (++rejects_in_a_row > 200) {
                throw NumericFailureError("dopri5: repeated step rejection (stiffness?)");
            }
            const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
            h *= fac;
            if (std::abs(h) < 1e-15 * (1.0 + std::abs(x)))
                throw NumericFailureError("dopri5: step underflow");
            if (steps.size() > 4000000) throw NumericFailureError("dopri5: step budget exhausted");
        }
        return steps;
    }

    /// Hermite interpolation inside an accepted step
    static State interpolate(const Step& s, double x) {
        const double h = s.x1 - s.x0;
        const double t = (x - s.x0) / h;
        const double t2 = t * t, t3 = t2 * t;
        State out;
        for (int i = 0; i < N; ++i) {
            const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
            const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
            out[i] = h00 * s.y0[i] + h10 * h * s.f0[i] + h01 * s.y1[i] + h11 * h * s.f1[i];
        }
        return out;
    }

private:
    void step(double x, const State& y, const State& f0, double h, State& ynew, State& fnew,
              double& err) {
        // Dormand-Prince coefficients
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        State k2, k3, k4, k5, k6, yt;
        auto axpy = [&](const std::initializer_list<std::pair<double, const State*>>& terms,
                        State& out) {
            for (int i = 0; i < N; ++i) {
                double s = y[i];
                for (const auto& [a, v] : terms) s += h * a * (*v)[i];
                out[i] = s;
            }
        };
        axpy({{a21, &f0}}, yt);
        rhs_(x + c2 * h, yt, k2);
        axpy({{a31, &f0}, {a32, &k2}}, yt);
        rhs_(x + c3 * h, yt, k3);
        axpy({{a41, &f0}, {a42, &k2}, {a43, &k3}}, yt);
        rhs_(x + c4 * h, yt, k4);
        axpy({{a51, &f0}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, yt);
        rhs_(x + c5 * h, yt, k5);
        axpy({{a61, &f0}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, yt);
        rhs_(x + h, yt, k6);
        axpy({{b1, &f0}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, ynew);
        rhs_(x + h, ynew, fnew);
        err = 0.0;
        for (int i = 0; i < N; ++i) {
            const double e = h * (e1 * f0[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * fnew[i]);
            const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e / sc));
        }
    }

    Rhs rhs_;
    double rtol_, atol_;
};

}  // namespace ellipnls
