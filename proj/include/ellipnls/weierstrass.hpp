#pragma once

#include <array>
#include <complex>

#include "ellipnls/quartic.hpp"

namespace ellipnls {

using Complex = std::complex<double>;

enum class DiscriminantClass { positive, negative, zero };

struct EllipticInvariants {
    double g2 = 0, g3 = 0;
    double delta = 0;  // g2^3 - 27 g3^2
    DiscriminantClass cls = DiscriminantClass::zero;

    static EllipticInvariants from(double g2, double g3);
};

/// General quartic-to-Weierstrass invariant map
///   g2 = alpha epsilon - 4 beta delta + 3 gamma^2
///   g3 = alpha gamma epsilon + 2 beta gamma delta - alpha delta^2 - gamma^3 - beta^2 epsilon
EllipticInvariants invariants_from_quartic(const QuarticCoefficients& q);

/// Lattice data for real invariants: cubic roots, real half-period, quasi-period
/// constant, and the period basis used for argument reduction.
struct LatticeData {
    EllipticInvariants inv;
    std::array<Complex, 3> e_roots{};  // sorted by descending real part
    double e1 = 0;                     // largest real root of 4j^3 - g2 j - g3
    double omega = 0;                  // real half-period (+inf in the solitary degeneration)
    double eta = 0;                    // zeta(omega)

    // full-period basis (gen1 real when a rectangular lattice, conjugate pair when rhombic)
    Complex gen1{}, gen2{};
    Complex eta1{}, eta2{};  // 2 zeta(gen/2), quasi-period increments per basis vector
    double min_lattice_dist = 0;

    // degenerate (|delta| ~ 0) closed-form evaluation data
    bool degenerate = false;
    double dbl_root = 0;  // double root c of the cubic; 0 when g2=g3=0

    static constexpr int kSeriesTerms = 22;
    std::array<double, kSeriesTerms + 1> laurent{};  // c_k, k=2..kSeriesTerms
};

LatticeData lattice_from_invariants(const EllipticInvariants& inv);

struct WpValue {
    Complex p, dp;
};

struct SigmaZeta {
    Complex sigma, zeta;
};

/// Weierstrass P and P'; throws PoleProximityError when z is within
/// pole_eps * min lattice distance of a lattice point.
WpValue wp(Complex z, const LatticeData& lat, double pole_eps = 1e-8);

/// As wp but without the pole guard; values blow up smoothly toward lattice points.
WpValue wp_raw(Complex z, const LatticeData& lat);

/// Weierstrass sigma (entire) and zeta; zeta is +/-inf at exact lattice points.
SigmaZeta sigma_zeta(Complex z, const LatticeData& lat);

/// Principal inverse: v in the fundamental cell with P(v) = w, via Carlson R_F
/// plus Newton polish.
Complex wp_inverse(Complex w, const LatticeData& lat);

/// Carlson symmetric elliptic integral R_F (principal branches).
Complex carlson_rf(Complex x, Complex y, Complex z);

/// Reduce z modulo the period lattice to the representative nearest the origin.
/// m, n receive the subtracted basis multiples.
Complex lattice_reduce(Complex z, const LatticeData& lat, long& m, long& n);

}  // namespace ellipnls
