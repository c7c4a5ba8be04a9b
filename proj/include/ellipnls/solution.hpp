#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ellipnls/weierstrass.hpp"

namespace ellipnls {

enum class HForm { general, simple_root, zero_root };

/// Closed-form h(z): the Weierstrass solution of (h_z)^2 = R1(h) with h(0) = h0.
/// slope_sign selects the square-root branch; h'(0+) = -slope_sign * sqrt(R1(h0)).
class HSolution {
public:
    static HSolution build(const SolutionParams& p, double slope_sign = +1.0);

    double eval(double z) const;    // h(z)
    double deriv(double z) const;   // h_z(z), analytic chain rule through P'
    double period() const;          // Lz = 2 omega(g2z, g3z); +inf when solitary

    const SolutionParams& params() const { return params_; }
    const QuarticCoefficients& q1() const { return q1_; }
    const EllipticInvariants& inv_z() const { return lat_.inv; }
    const LatticeData& lattice() const { return lat_; }
    double r1_at_h0() const { return r1_at_h0_; }
    HForm form() const { return form_; }
    double slope_sign() const { return slope_sign_; }

    /// value and derivative together (one lattice evaluation)
    void eval_both(double z, double& h, double& hz) const;

private:
    SolutionParams params_;
    QuarticCoefficients q1_;
    LatticeData lat_;
    double r1_at_h0_ = 0;
    HForm form_ = HForm::general;
    double slope_sign_ = 1.0;
    // cached Biermann-Weierstrass constants at h0
    double c_mid_ = 0;    // R1''(h0)/24
    double rp_ = 0;       // R1'(h0)
    double rppp24_ = 0;   // R1'''(h0)/24
    double sqrt_r0_ = 0;  // sqrt(R1(h0))
};

/// Phase phi(z) from the sigma/zeta/log closed form, with incremental branch
/// unwrapping along the real z axis. Not safe for concurrent use (walk cache).
class PhiSolution {
public:
    static PhiSolution build(const HSolution& hs);

    double eval(double z) const;  // phi(z), real, phi(0) = phi0

    Complex r1() const { return r_[0]; }
    Complex r2() const { return r_[1]; }
    Complex r3() const { return r_[2]; }
    Complex r4() const { return r_[3]; }
    Complex v1() const { return v1_; }
    Complex v2() const { return v2_; }
    double const_term() const { return phi0_; }

private:
    enum class Case { zero_root, general, confluent, constant };

    struct LogTerm {
        Complex v;        // P(v) = pole location in P
        Complex dpv;      // P'(v)
        Complex zeta_v;   // zeta(v)
        Complex coef;     // partial-fraction coefficient
    };

    struct WalkState {
        double z = 0;
        std::vector<double> args;  // unwrapped argument per tracked log
    };

    // tracked complex values whose arguments are unwrapped along the walk
    std::vector<Complex> tracked_values(double z) const;
    double assemble(double z, const std::vector<double>& args) const;
    WalkState advance(WalkState from, double z_to, int depth = 0) const;

    const HSolution* hs_ = nullptr;
    Case case_ = Case::general;
    double phi0_ = 0;
    double drift_ = 0;  // coefficient of the explicit z term
    std::array<Complex, 4> r_{};
    Complex v1_{}, v2_{};
    std::vector<LogTerm> terms_;
    // confluent-case extras
    Complex ppp_v_{};  // P''(v)
    Complex b1_{}, b2_{};
    mutable std::map<double, WalkState> anchors_;
    mutable std::vector<double> anchor_args_;  // unwrapped args at z = 0
};

/// f(t, z): per-z Weierstrass solution of (f_t)^2 = R2(f, z) with f(0, z) = f0.
class FSolution {
public:
    struct ZSlice {
        double h = 0, hz = 0;
        QuarticCoefficients q2;
        LatticeData lat_t;
        double r2_at_f0 = 0;
        double c_mid = 0, rp = 0, rppp24 = 0, sqrt_r0 = 0;
    };

    static FSolution build(std::shared_ptr<const HSolution> hs, double slope_sign = +1.0,
                           Gamma2Convention conv = Gamma2Convention::consistent);

    double eval(double t, double z) const;
    double deriv_t(double t, double z) const;  // f_t, analytic
    const ZSlice& slice(double z) const;       // cached per-z construction
    double period_t(double z) const;           // Lt(z)
    /// distance from t = 0 to the nearest real pole of f(., z); +inf when the
    /// denominator cannot vanish on the real axis
    double nearest_pole_t(double z) const;
    const HSolution& h_solution() const { return *hs_; }
    Gamma2Convention convention() const { return conv_; }

private:
    std::shared_ptr<const HSolution> hs_;
    double slope_sign_ = 1.0;
    Gamma2Convention conv_ = Gamma2Convention::consistent;
    mutable std::map<double, ZSlice> cache_;
};

struct PsiValue {
    Complex psi;
    double intensity;  // |psi|^2 = f^2 + h
};

/// Assemble Psi = (f + i sqrt(h)) e^{i phi}.
PsiValue psi_eval(double t, double z, const HSolution& hs, const PhiSolution& ps,
                  const FSolution& fs);

struct Periods {
    double Lz;
    std::optional<double> Lt;  // present when z was supplied
};

Periods periods(const HSolution& hs, std::optional<double> z = std::nullopt,
                Gamma2Convention conv = Gamma2Convention::consistent);

}  // namespace ellipnls
