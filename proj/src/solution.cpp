#include "ellipnls/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ellipnls {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct BwConstants {
    double c_mid, rp, rppp24, sqrt_r0;
};

BwConstants bw_constants(const QuarticCoefficients& q, double y0, double r0) {
    BwConstants k;
    k.c_mid = (q.alpha * y0 * y0 + 2.0 * q.beta * y0 + q.gamma) / 2.0;  // R''(y0)/24
    k.rp = derivative(q, y0);
    k.rppp24 = q.alpha * y0 + q.beta;  // R'''(y0)/24
    k.sqrt_r0 = r0 > 0.0 ? std::sqrt(r0) : 0.0;
    return k;
}

// Biermann-Weierstrass evaluation of y(x) = y0 + N/D and dy/dx, with
//   N = s sqrt(R0) P' + (R'/2)(P - c) + R0 R'''/24
//   D = 2 (P - c)^2 - (alpha/2) R0
// Near lattice points (P -> inf) the Taylor limit y = y0 - s sqrt(R0) u + (R'/4) u^2
// takes over; the formula cancels the pole analytically.
void bw_eval(const QuarticCoefficients& q, double y0, double r0, const BwConstants& k,
             double slope_sign, const LatticeData& lat, double x, double& y, double& dy) {
    long m, n;
    const Complex u = lattice_reduce(Complex(x, 0.0), lat, m, n);
    const double cell = std::isfinite(lat.min_lattice_dist) ? lat.min_lattice_dist : 1.0;
    if (std::abs(u) <= 1e-5 * cell) {
        const double ur = u.real();
        y = y0 - slope_sign * k.sqrt_r0 * ur + 0.25 * k.rp * ur * ur;
        dy = -slope_sign * k.sqrt_r0 + 0.5 * k.rp * ur;
        return;
    }
    const auto w = wp_raw(Complex(x, 0.0), lat);
    const Complex P = w.p, Pp = w.dp;
    const Complex Ppp = 6.0 * P * P - lat.inv.g2 / 2.0;
    const Complex pc = P - k.c_mid;
    const Complex N = slope_sign * k.sqrt_r0 * Pp + 0.5 * k.rp * pc + r0 * k.rppp24;
    const Complex D = 2.0 * pc * pc - 0.5 * q.alpha * r0;
    if (std::abs(D) < 1e-12 * (1.0 + std::abs(P) * std::abs(P)))
        throw SingularityError("solution denominator vanished (violated boundedness constraint)");
    const Complex Np = slope_sign * k.sqrt_r0 * Ppp + 0.5 * k.rp * Pp;
    const Complex Dp = 4.0 * pc * Pp;
    const Complex val = N / D;
    const Complex der = (Np * D - N * Dp) / (D * D);
    y = y0 + val.real();
    dy = der.real();
}

}  // namespace

HSolution HSolution::build(const SolutionParams& p, double slope_sign) {
    p.validate();
    HSolution hs;
    hs.params_ = p;
    hs.q1_ = r1_coefficients(p);
    hs.lat_ = lattice_from_invariants(invariants_from_quartic(hs.q1_));
    hs.r1_at_h0_ = evaluate(hs.q1_, p.h0);
    hs.slope_sign_ = slope_sign;
    const double scale = std::max(1.0, coefficient_scale(hs.q1_));
    if (hs.r1_at_h0_ < -1e-12 * scale)
        throw InvalidInputError("R1(h0) < 0: h(z) is not real at the boundary value");
    double r0 = std::max(hs.r1_at_h0_, 0.0);
    if (std::abs(hs.r1_at_h0_) <= 1e-12 * scale) {
        r0 = 0.0;
        hs.r1_at_h0_ = 0.0;
        hs.form_ = (p.h0 == 0.0) ? HForm::zero_root : HForm::simple_root;
    } else {
        hs.form_ = HForm::general;
    }
    const auto k = bw_constants(hs.q1_, p.h0, r0);
    hs.c_mid_ = k.c_mid;
    hs.rp_ = k.rp;
    hs.rppp24_ = k.rppp24;
    hs.sqrt_r0_ = k.sqrt_r0;
    return hs;
}

void HSolution::eval_both(double z, double& h, double& hz) const {
    const auto& p = params_;
    switch (form_) {
        case HForm::zero_root: {
            // h = delta1 / (P - gamma1/2)
            long m, n;
            const Complex u = lattice_reduce(Complex(z, 0.0), lat_, m, n);
            const double cell = std::isfinite(lat_.min_lattice_dist) ? lat_.min_lattice_dist : 1.0;
            if (std::abs(u) <= 1e-5 * cell) {
                const double ur = u.real();
                h = q1_.delta * ur * ur;  // R1'(0)/4 = delta1
                hz = 2.0 * q1_.delta * ur;
                return;
            }
            const auto w = wp_raw(Complex(z, 0.0), lat_);
            const Complex den = w.p - q1_.gamma / 2.0;
            if (std::abs(den) < 1e-12 * (1.0 + std::abs(w.p)))
                throw SingularityError("h(z) denominator vanished (e1 <= gamma1/2)");
            h = (q1_.delta / den).real();
            hz = (-q1_.delta * w.dp / (den * den)).real();
            return;
        }
        case HForm::simple_root: {
            // h = h0 + R1'(h0) / (4 (P - c))
            long m, n;
            const Complex u = lattice_reduce(Complex(z, 0.0), lat_, m, n);
            const double cell = std::isfinite(lat_.min_lattice_dist) ? lat_.min_lattice_dist : 1.0;
            if (std::abs(u) <= 1e-5 * cell) {
                const double ur = u.real();
                h = p.h0 + 0.25 * rp_ * ur * ur;
                hz = 0.5 * rp_ * ur;
                return;
            }
            const auto w = wp_raw(Complex(z, 0.0), lat_);
            const Complex den = w.p - c_mid_;
            if (std::abs(den) < 1e-12 * (1.0 + std::abs(w.p)))
                throw SingularityError("h(z) denominator vanished (violated constraint)");
            h = p.h0 + (0.25 * rp_ / den).real();
            hz = (-0.25 * rp_ * w.dp / (den * den)).real();
            return;
        }
        case HForm::general: {
            const BwConstants k{c_mid_, rp_, rppp24_, sqrt_r0_};
            bw_eval(q1_, p.h0, r1_at_h0_, k, slope_sign_, lat_, z, h, hz);
            return;
        }
    }
    throw InternalError("unreachable h form");
}

double HSolution::eval(double z) const {
    double h, hz;
    eval_both(z, h, hz);
    return h;
}

double HSolution::deriv(double z) const {
    double h, hz;
    eval_both(z, h, hz);
    return hz;
}

double HSolution::period() const { return 2.0 * lat_.omega; }

// ---------------------------------------------------------------------------
// PhiSolution

PhiSolution PhiSolution::build(const HSolution& hs) {
    PhiSolution ps;
    ps.hs_ = &hs;
    const auto& p = hs.params();
    const auto& q = hs.q1();
    const auto& lat = hs.lattice();
    ps.phi0_ = p.phi0;
    const double a1 = q.alpha, b1 = q.beta, g1 = q.gamma, d1 = q.delta;
    const double h0 = p.h0;
    const double r0 = hs.r1_at_h0();

    if (h0 == 0.0 && d1 == 0.0) {
        // h == 0 identically: phi = phi0 + c1 z
        ps.case_ = Case::constant;
        ps.drift_ = p.c1;
        return ps;
    }

    if (hs.form() == HForm::zero_root) {
        // phi = phi0 + c1 z - 2 a delta1 * I(v), P(v) = gamma1/2
        ps.case_ = Case::zero_root;
        ps.drift_ = p.c1;
        const Complex rr(g1 / 2.0, 0.0);
        ps.r_ = {rr, rr, rr, rr};
        ps.v1_ = ps.v2_ = wp_inverse(rr, lat);
        const auto wv = wp_raw(ps.v1_, lat);
        const auto sv = sigma_zeta(ps.v1_, lat);
        ps.terms_.push_back({ps.v1_, wv.dp, sv.zeta, Complex(-2.0 * p.a * d1, 0.0)});
        return ps;
    }

    // numerator roots r1, r2 (finite h0 > 0 here)
    const double rad2 = b1 * b1 * std::pow(h0, 4) + (6 * b1 * g1 - 2 * a1 * d1) * std::pow(h0, 3) +
                        (9 * g1 * g1 - 2 * b1 * d1) * h0 * h0 + 6 * g1 * d1 * h0 + d1 * d1;
    const Complex rad = std::sqrt(Complex(rad2, 0.0));
    const Complex base(d1 + 2 * g1 * h0 + b1 * h0 * h0, 0.0);
    const Complex r1v = -(base - rad) / (2.0 * h0);
    const Complex r2v = -(base + rad) / (2.0 * h0);
    const double cmid = (g1 + 2 * b1 * h0 + a1 * h0 * h0) / 2.0;

    if (hs.form() == HForm::simple_root) {
        // confluent double pole at P = cmid
        ps.case_ = Case::confluent;
        ps.drift_ = p.c1 - 2.0 * p.a * h0;
        const Complex rr(cmid, 0.0);
        ps.r_ = {r1v, r2v, rr, rr};
        ps.v1_ = ps.v2_ = wp_inverse(rr, lat);
        const auto wv = wp_raw(ps.v1_, lat);
        const auto sv = sigma_zeta(ps.v1_, lat);
        ps.ppp_v_ = 6.0 * wv.p * wv.p - lat.inv.g2 / 2.0;
        ps.b1_ = h0 * (2.0 * rr - r1v - r2v);
        ps.b2_ = h0 * (rr - r1v) * (rr - r2v);
        ps.terms_.push_back({ps.v1_, wv.dp, sv.zeta, Complex(-2.0 * p.a, 0.0)});
        return ps;
    }

    // general interior case: simple poles at r3, r4 plus the P'-term log quotient
    ps.case_ = Case::general;
    ps.drift_ = p.c1 - 2.0 * p.a * h0;
    const Complex s = std::sqrt(Complex(a1 * r0, 0.0));
    const Complex r3v = Complex(cmid, 0.0) - s / 2.0;
    const Complex r4v = Complex(cmid, 0.0) + s / 2.0;
    ps.r_ = {r1v, r2v, r3v, r4v};
    ps.v1_ = wp_inverse(r3v, lat);
    ps.v2_ = wp_inverse(r4v, lat);
    const auto w3 = wp_raw(ps.v1_, lat);
    const auto w4 = wp_raw(ps.v2_, lat);
    const auto s3 = sigma_zeta(ps.v1_, lat);
    const auto s4 = sigma_zeta(ps.v2_, lat);
    const Complex A3 = h0 * (r3v - r1v) * (r3v - r2v) / (r3v - r4v);
    const Complex A4 = h0 * (r4v - r1v) * (r4v - r2v) / (r4v - r3v);
    ps.terms_.push_back({ps.v1_, w3.dp, s3.zeta, -2.0 * p.a * A3});
    ps.terms_.push_back({ps.v2_, w4.dp, s4.zeta, -2.0 * p.a * A4});
    return ps;
}

std::vector<Complex> PhiSolution::tracked_values(double z) const {
    // complex quantities whose continuous arguments the walk maintains:
    //   per log term: sigma(z - v), sigma(z + v)
    //   general case: P(z) - r3, P(z) - r4
    const auto& lat = hs_->lattice();
    std::vector<Complex> vals;
    for (const auto& t : terms_) {
        vals.push_back(sigma_zeta(Complex(z, 0.0) - t.v, lat).sigma);
        vals.push_back(sigma_zeta(Complex(z, 0.0) + t.v, lat).sigma);
    }
    if (case_ == Case::general) {
        const auto w = wp_raw(Complex(z, 0.0), lat);
        vals.push_back(w.p - r_[2]);
        vals.push_back(w.p - r_[3]);
    }
    if (case_ == Case::confluent) {
        // zeta(z -/+ v) appear linearly (no logs); nothing extra to track
    }
    return vals;
}

PhiSolution::WalkState PhiSolution::advance(WalkState from, double z_to, int depth) const {
    if (depth > 48) throw StepRefinementError("phase unwrapping needs a finer walk");
    const auto target = tracked_values(z_to);
    WalkState next;
    next.z = z_to;
    next.args.resize(target.size());
    bool ok = true;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double a_prev = from.args[i];
        const double raw = std::arg(target[i]);
        // choose the branch of raw closest to the previous unwrapped value
        const double k = std::floor((a_prev - raw) / (2.0 * kPi) + 0.5);
        const double unwrapped = raw + 2.0 * kPi * k;
        if (std::abs(unwrapped - a_prev) > 0.5 * kPi) ok = false;
        next.args[i] = unwrapped;
    }
    if (!ok) {
        const double zm = 0.5 * (from.z + z_to);
        if (zm == from.z || zm == z_to)
            throw StepRefinementError("phase unwrapping step underflow");
        const auto mid = advance(from, zm, depth + 1);
        return advance(mid, z_to, depth + 1);
    }
    return next;
}

double PhiSolution::assemble(double z, const std::vector<double>& args) const {
    // anchor_args_ hold the unwrapped arguments at z = 0; the definite integral
    // F(z) - F(0) uses them, which fixes every log branch consistently
    const auto& lat = hs_->lattice();
    Complex acc(0.0, 0.0);
    std::size_t ai = 0;

    // sigma-log bracket L(z) = log sigma(z-v) - log sigma(z+v) + 2 z zeta(v), minus L(0)
    const auto bracket = [&](const LogTerm& t, std::size_t idx) {
        const Complex sm = sigma_zeta(Complex(z, 0.0) - t.v, lat).sigma;
        const Complex sp = sigma_zeta(Complex(z, 0.0) + t.v, lat).sigma;
        // |sigma(-v)| = |sigma(v)| so the anchor modulus part cancels exactly
        const Complex logq(std::log(std::abs(sm)) - std::log(std::abs(sp)),
                           args[idx] - args[idx + 1] -
                               (anchor_args_[idx] - anchor_args_[idx + 1]));
        return logq + 2.0 * z * t.zeta_v;
    };

    if (case_ == Case::confluent) {
        const auto& t = terms_[0];
        const Complex L = bracket(t, 0);
        const Complex I1 = L / t.dpv;
        const Complex zm = sigma_zeta(Complex(z, 0.0) - t.v, lat).zeta;
        const Complex zp = sigma_zeta(Complex(z, 0.0) + t.v, lat).zeta;
        const Complex Pv = r_[2];
        const Complex dpv2 = t.dpv * t.dpv;
        const Complex I2 = -(ppp_v_ / (dpv2 * t.dpv)) * L +
                           (-zm - zp - 2.0 * z * Pv) / dpv2 -
                           (-sigma_zeta(-t.v, lat).zeta - sigma_zeta(t.v, lat).zeta) / dpv2;
        acc = -2.0 * hs_->params().a * (b1_ * I1 + b2_ * I2);
    } else {
        for (const auto& t : terms_) {
            acc += t.coef * (bracket(t, ai) / t.dpv);
            ai += 2;
        }
        if (case_ == Case::general) {
            const auto w = wp_raw(Complex(z, 0.0), lat);
            const Complex q3 = w.p - r_[2], q4 = w.p - r_[3];
            // [log((P-r3)/(P-r4))]_0^z ; the quotient -> 1 at z -> 0
            const Complex logq(std::log(std::abs(q3)) - std::log(std::abs(q4)),
                               args[ai] - args[ai + 1] -
                                   (anchor_args_[ai] - anchor_args_[ai + 1]));
            const Complex coef =
                -2.0 * hs_->params().a *
                (hs_->slope_sign() * std::sqrt(std::max(hs_->r1_at_h0(), 0.0)) / 2.0) /
                (r_[2] - r_[3]);
            acc += coef * logq;
        }
    }
    if (std::abs(acc.imag()) > 1e-6 * (1.0 + std::abs(acc.real())))
        throw NumericFailureError("phase lost reality", "imaginary residue in phi assembly");
    return phi0_ + drift_ * z + acc.real();
}

double PhiSolution::eval(double z) const {
    if (case_ == Case::constant) return phi0_ + drift_ * z;
    if (z == 0.0) return phi0_;

    // find the nearest anchor at or before |z| along the walk direction
    if (anchors_.empty()) {
        WalkState origin;
        origin.z = 0.0;
        const auto vals = tracked_values(0.0);
        origin.args.resize(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) origin.args[i] = std::arg(vals[i]);
        anchor_args_ = origin.args;
        anchors_[0.0] = origin;
    }
    auto it = anchors_.upper_bound(z);
    WalkState state;
    if (it == anchors_.begin()) {
        state = anchors_.begin()->second;
    } else {
        state = std::prev(it)->second;
    }
    // walk from the anchor to z in bounded steps
    const double Lz = hs_->period();
    const double step0 = std::isfinite(Lz) ? Lz / 64.0 : 0.1;
    double zc = state.z;
    while (zc != z) {
        double znext = (z > zc) ? std::min(z, zc + step0) : std::max(z, zc - step0);
        state = advance(state, znext);
        zc = state.z;
        // drop an anchor every few steps to make future walks cheap
        anchors_[state.z] = state;
        if (anchors_.size() > 4096) anchors_.erase(std::prev(anchors_.end()));
    }
    return assemble(z, state.args);
}

// ---------------------------------------------------------------------------
// FSolution

FSolution FSolution::build(std::shared_ptr<const HSolution> hs, double slope_sign,
                           Gamma2Convention conv) {
    FSolution fs;
    fs.hs_ = std::move(hs);
    fs.slope_sign_ = slope_sign;
    fs.conv_ = conv;
    return fs;
}

const FSolution::ZSlice& FSolution::slice(double z) const {
    auto it = cache_.find(z);
    if (it != cache_.end()) return it->second;
    ZSlice s;
    hs_->eval_both(z, s.h, s.hz);
    if (s.h < 0.0 && s.h > -1e-12) s.h = 0.0;
    const auto& p = hs_->params();
    s.q2 = r2_coefficients(p, s.h, s.hz, +1.0, conv_);
    s.lat_t = lattice_from_invariants(invariants_from_quartic(s.q2));
    s.r2_at_f0 = evaluate(s.q2, p.f0);
    const double scale = std::max(1.0, coefficient_scale(s.q2));
    if (s.r2_at_f0 < -1e-12 * scale)
        throw ConstraintViolationError("R2(f0, z) < 0: f(t, z) is not real here",
                                       "R2(f0,z) >= 0 (Eq. 25)");
    const double r0 = std::max(s.r2_at_f0, 0.0);
    const auto k = bw_constants(s.q2, p.f0, r0);
    s.c_mid = k.c_mid;
    s.rp = k.rp;
    s.rppp24 = k.rppp24;
    s.sqrt_r0 = k.sqrt_r0;
    return cache_.emplace(z, std::move(s)).first->second;
}

double FSolution::eval(double t, double z) const {
    const auto& s = slice(z);
    double f, ft;
    const BwConstants k{s.c_mid, s.rp, s.rppp24, s.sqrt_r0};
    bw_eval(s.q2, hs_->params().f0, std::max(s.r2_at_f0, 0.0), k, slope_sign_, s.lat_t, t, f, ft);
    return f;
}

double FSolution::deriv_t(double t, double z) const {
    const auto& s = slice(z);
    double f, ft;
    const BwConstants k{s.c_mid, s.rp, s.rppp24, s.sqrt_r0};
    bw_eval(s.q2, hs_->params().f0, std::max(s.r2_at_f0, 0.0), k, slope_sign_, s.lat_t, t, f, ft);
    return ft;
}

double FSolution::period_t(double z) const {
    // Lt is f0-independent (the invariants depend on (h, hz) only), so do not
    // require R2(f0, z) >= 0 here
    return periods(*hs_, z, conv_).Lt.value();
}

double FSolution::nearest_pole_t(double z) const {
    const auto& s = slice(z);
    // denominator zeros sit at P(t) = c_mid +/- sqrt(alpha2 R0)/2; real poles
    // require a real level above the real-axis minimum e1 of P
    const double disc = s.q2.alpha * std::max(s.r2_at_f0, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    if (disc < 0.0) return inf;
    const double rho = s.c_mid + 0.5 * std::sqrt(disc);  // hit first as P falls from +inf
    if (!(rho > s.lat_t.e1 + 1e-12 * (1.0 + std::abs(s.lat_t.e1)))) return inf;
    const Complex v = carlson_rf(Complex(rho, 0) - s.lat_t.e_roots[0],
                                 Complex(rho, 0) - s.lat_t.e_roots[1],
                                 Complex(rho, 0) - s.lat_t.e_roots[2]);
    return std::abs(v.real());
}

// ---------------------------------------------------------------------------

PsiValue psi_eval(double t, double z, const HSolution& hs, const PhiSolution& ps,
                  const FSolution& fs) {
    const double h = hs.eval(z);
    const double f = fs.eval(t, z);
    const double phi = ps.eval(z);
    const double d = std::sqrt(std::max(h, 0.0));  // d = +sqrt(h)
    const Complex rot(std::cos(phi), std::sin(phi));
    PsiValue out;
    out.psi = Complex(f, d) * rot;
    out.intensity = f * f + h;
    return out;
}

Periods periods(const HSolution& hs, std::optional<double> z, Gamma2Convention conv) {
    Periods out{hs.period(), std::nullopt};
    if (z) {
        // Lt is f0-independent: invariants depend on (h, hz) only
        double h, hz;
        hs.eval_both(*z, h, hz);
        if (h < 0.0 && h > -1e-12) h = 0.0;
        const auto q2 = r2_coefficients(hs.params(), h, hz, +1.0, conv);
        const auto lat_t = lattice_from_invariants(invariants_from_quartic(q2));
        out.Lt = 2.0 * lat_t.omega;
    }
    return out;
}

}  // namespace ellipnls
