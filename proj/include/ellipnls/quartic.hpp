#pragma once

#include <complex>
#include <vector>

#include "ellipnls/errors.hpp"

namespace ellipnls {

/// Free parameters of one member of the solution family.
struct SolutionParams {
    double a = 1.0;     // nonlinearity (a>0 focusing, a<0 defocusing)
    double c1 = 0.0;    // integration constants
    double c2 = 0.0;
    double c3 = 0.0;
    double h0 = 0.0;    // boundary value h(0), >= 0
    double f0 = 0.0;    // initial value f(0,0)
    double phi0 = 0.0;  // phase constant phi(0)

    void validate() const;
};

/// Quartic in the normalization R(x) = alpha x^4 + 4 beta x^3 + 6 gamma x^2 + 4 delta x + epsilon.
struct QuarticCoefficients {
    double alpha = 0, beta = 0, gamma = 0, delta = 0, epsilon = 0;
};

double evaluate(const QuarticCoefficients& q, double x);
std::complex<double> evaluate(const QuarticCoefficients& q, std::complex<double> x);
double derivative(const QuarticCoefficients& q, double x);   // R'(x)
double second_derivative(const QuarticCoefficients& q, double x);
double coefficient_scale(const QuarticCoefficients& q);      // max expanded |coefficient|

/// R1 coefficients of the z-quartic (h_z)^2 = R1(h).
QuarticCoefficients r1_coefficients(const SolutionParams& p);

/// Which gamma2 to use in R2. The printed form (c1 - 3h)/6 is what the paper
/// shows; substituting the ansatz into the wave equation forces (c1 - 3 a h)/6
/// (they coincide at a = 1). `consistent` keeps the construction an exact
/// solution of the t-equation; `as_printed` reproduces the paper's figures.
enum class Gamma2Convention { consistent, as_printed };

/// R2 coefficients of the t-quartic (f_t)^2 = R2(f, z) at given (h, h_z).
/// At h = 0 the 0/0 term delta2 = h_z/(4 sqrt h) is replaced by its limit
/// sign(hz_side) * sqrt(delta1)/2, with hz_side selecting the approach side.
QuarticCoefficients r2_coefficients(const SolutionParams& p, double h, double hz,
                                    double hz_side = +1.0,
                                    Gamma2Convention conv = Gamma2Convention::consistent);

struct RealRoots {
    std::vector<double> roots;        // ascending, distinct after clustering
    std::vector<int> multiplicities;  // same length
};

/// All real roots, companion-matrix eigenvalues + Newton polish; roots closer
/// than mult_tol are merged into one root with summed multiplicity.
RealRoots real_roots(const QuarticCoefficients& q, double mult_tol = 1e-7);

struct Interval {
    double lo, hi;  // hi may be +inf
};

struct PhaseDiagramReport {
    RealRoots all_roots;
    std::vector<double> pdc_roots;  // roots in [0, inf)
    std::vector<int> pdc_multiplicities;
    int sign_changes = 0;                       // Descartes count on (alpha,4beta,6gamma,4delta,epsilon)
    std::vector<Interval> positivity_intervals; // subsets of [0, inf) where R >= 0
};

PhaseDiagramReport pdc_classify(const QuarticCoefficients& q);

}  // namespace ellipnls
