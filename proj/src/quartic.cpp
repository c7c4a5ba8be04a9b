#include "ellipnls/quartic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ellipnls {

void SolutionParams::validate() const {
    for (double v : {a, c1, c2, c3, h0, f0, phi0}) {
        if (!std::isfinite(v)) throw InvalidInputError("non-finite solution parameter");
    }
    if (a == 0.0) throw InvalidInputError("parameter a must be nonzero");
    if (h0 < 0.0) throw InvalidInputError("boundary value h0 must be >= 0");
}

double evaluate(const QuarticCoefficients& q, double x) {
    return (((q.alpha * x + 4 * q.beta) * x + 6 * q.gamma) * x + 4 * q.delta) * x + q.epsilon;
}

std::complex<double> evaluate(const QuarticCoefficients& q, std::complex<double> x) {
    return (((q.alpha * x + 4 * q.beta) * x + 6 * q.gamma) * x + 4 * q.delta) * x + q.epsilon;
}

double derivative(const QuarticCoefficients& q, double x) {
    return ((4 * q.alpha * x + 12 * q.beta) * x + 12 * q.gamma) * x + 4 * q.delta;
}

double second_derivative(const QuarticCoefficients& q, double x) {
    return (12 * q.alpha * x + 24 * q.beta) * x + 12 * q.gamma;
}

double coefficient_scale(const QuarticCoefficients& q) {
    return std::max({std::abs(q.alpha), std::abs(4 * q.beta), std::abs(6 * q.gamma),
                     std::abs(4 * q.delta), std::abs(q.epsilon)});
}

QuarticCoefficients r1_coefficients(const SolutionParams& p) {
    p.validate();
    QuarticCoefficients q;
    q.alpha = -16.0 * p.a * p.a;
    q.beta = 4.0 * p.a * p.c1;
    q.gamma = -(2.0 * p.c1 * p.c1 + 8.0 * p.a * p.c2) / 3.0;
    q.delta = 2.0 * p.c3;
    q.epsilon = 0.0;
    return q;
}

QuarticCoefficients r2_coefficients(const SolutionParams& p, double h, double hz, double hz_side,
                                    Gamma2Convention conv) {
    if (!std::isfinite(h) || !std::isfinite(hz)) throw InvalidInputError("non-finite (h, hz)");
    if (h < 0.0) throw InvalidInputError("h must be >= 0 in r2_coefficients");
    QuarticCoefficients q;
    q.alpha = -p.a / 2.0;
    q.beta = 0.0;
    q.gamma = (conv == Gamma2Convention::consistent ? (p.c1 - 3.0 * p.a * h)
                                                    : (p.c1 - 3.0 * h)) /
              6.0;
    if (h == 0.0) {
        // hz^2 = 4 delta1 h + O(h^2) near a simple root at h = 0 forces |delta2| -> sqrt(delta1)/2
        const double d1 = 2.0 * p.c3;
        q.delta = (hz_side < 0 ? -1.0 : 1.0) * (d1 > 0 ? std::sqrt(d1) / 2.0 : 0.0);
    } else {
        q.delta = hz / (4.0 * std::sqrt(h));
    }
    q.epsilon = 2.0 * p.c2 + 1.5 * p.a * h * h - p.c1 * h;
    return q;
}

namespace {

// expanded coefficients, highest degree first
std::array<double, 5> expanded(const QuarticCoefficients& q) {
    return {q.alpha, 4 * q.beta, 6 * q.gamma, 4 * q.delta, q.epsilon};
}

double poly_eval(const std::vector<double>& c, double x) {
    double v = 0;
    for (double ci : c) v = v * x + ci;
    return v;
}

}  // namespace

RealRoots real_roots(const QuarticCoefficients& q, double mult_tol) {
    auto c5 = expanded(q);
    for (double c : c5)
        if (!std::isfinite(c)) throw InvalidInputError("non-finite quartic coefficient");
    const double scale = coefficient_scale(q);
    if (scale == 0.0) throw InvalidInputError("identically zero quartic");

    // strip (numerically) vanishing leading coefficients
    std::vector<double> c(c5.begin(), c5.end());
    while (c.size() > 1 && std::abs(c.front()) <= 1e-14 * scale) c.erase(c.begin());
    const int deg = static_cast<int>(c.size()) - 1;
    if (deg == 0) return {};

    std::vector<std::complex<double>> croots;
    if (deg == 1) {
        croots = {{-c[1] / c[0], 0.0}};
    } else {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 0; i < deg; ++i) comp(0, i) = -c[i + 1] / c[0];
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
        for (int i = 0; i < deg; ++i) croots.push_back(es.eigenvalues()[i]);
    }

    // Newton polish, then keep roots with negligible imaginary part
    std::vector<double> dc(deg);
    for (int i = 0; i < deg; ++i) dc[i] = c[i] * (deg - i);
    std::vector<double> rr;
    for (auto r : croots) {
        if (std::abs(r.imag()) > mult_tol * (1.0 + std::abs(r.real()))) continue;
        double x = r.real();
        for (int it = 0; it < 8; ++it) {
            const double f = poly_eval(c, x);
            const double df = poly_eval(dc, x);
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step)) break;
            if (std::abs(step) > 1.0 + std::abs(x)) break;  // multiple root, Newton unreliable
            x -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(x))) break;
        }
        rr.push_back(x);
    }
    std::sort(rr.begin(), rr.end());

    RealRoots out;
    for (std::size_t i = 0; i < rr.size();) {
        std::size_t j = i + 1;
        double sum = rr[i];
        while (j < rr.size() && std::abs(rr[j] - rr[i]) <= mult_tol * (1.0 + std::abs(rr[i]))) {
            sum += rr[j];
            ++j;
        }
        out.roots.push_back(sum / static_cast<double>(j - i));
        out.multiplicities.push_back(static_cast<int>(j - i));
        i = j;
    }
    return out;
}

PhaseDiagramReport pdc_classify(const QuarticCoefficients& q) {
    PhaseDiagramReport rep;
    rep.all_roots = real_roots(q);

    const auto c5 = expanded(q);
    int prev_sign = 0;
    for (double c : c5) {
        if (c == 0.0) continue;
        const int s = c > 0 ? 1 : -1;
        if (prev_sign != 0 && s != prev_sign) ++rep.sign_changes;
        prev_sign = s;
    }

    for (std::size_t i = 0; i < rep.all_roots.roots.size(); ++i) {
        const double r = rep.all_roots.roots[i];
        if (r >= -1e-12 * (1.0 + std::abs(r))) {
            rep.pdc_roots.push_back(std::max(r, 0.0));
            rep.pdc_multiplicities.push_back(rep.all_roots.multiplicities[i]);
        }
    }

    // positivity intervals of R over [0, inf): split at nonnegative roots, test midpoints
    std::vector<double> cuts{0.0};
    for (double r : rep.pdc_roots)
        if (r > 0.0) cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 <= cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = (i + 1 < cuts.size()) ? cuts[i + 1] : inf;
        const double mid = std::isinf(hi) ? lo + std::max(1.0, std::abs(lo)) : 0.5 * (lo + hi);
        if (evaluate(q, mid) >= 0.0) {
            if (!rep.positivity_intervals.empty() && rep.positivity_intervals.back().hi == lo)
                rep.positivity_intervals.back().hi = hi;  // merge across a tangent root
            else
                rep.positivity_intervals.push_back({lo, hi});
        }
    }
    // an isolated nonnegative double root with R<0 around it still counts as a
    // degenerate positivity point; represent as [r, r]
    for (double r : rep.pdc_roots) {
        bool covered = false;
        for (auto& iv : rep.positivity_intervals)
            if (r >= iv.lo - 1e-15 && r <= iv.hi) covered = true;
        if (!covered) rep.positivity_intervals.push_back({r, r});
    }
    std::sort(rep.positivity_intervals.begin(), rep.positivity_intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return rep;
}

}  // namespace ellipnls
