#pragma once

#include <string>
#include <vector>

#include "ellipnls/solution.hpp"

namespace ellipnls {

enum class HCase { interior, zero_root, simple_root };
enum class HBehavior { periodic, solitary_like, unclassified };

struct HPhysicalityReport {
    HCase h_case = HCase::interior;
    bool satisfied = false;
    HBehavior behavior = HBehavior::unclassified;
    // evaluated inequality values
    double r1_at_h0 = 0;
    double e1 = 0;
    double threshold = 0;       // the bound e1 must exceed (case-dependent)
    double delta1 = 0;
    double numerator_min = 0;   // min of N1 over one period (interior / simple-root)
    std::string detail;
};

/// Reality/boundedness status of h via constraints (22)-(24); reports, never throws.
HPhysicalityReport check_h(const SolutionParams& p);

/// Periodic vs solitary-like classification by the z-discriminant sign pattern.
HBehavior classify_behavior(const EllipticInvariants& inv_z);

struct AdmissibleRegion {
    std::vector<double> f0_grid;
    std::vector<double> z_grid;
    std::vector<std::uint8_t> mask;        // row-major [iz * nf + if0], conjunction over signs
    std::vector<std::uint8_t> mask_plus;   // e1t > (gamma2 + alpha2 f0^2 + sqrt(alpha2 R2))/2
    std::vector<std::uint8_t> mask_minus;  // same with the - sign
    std::vector<std::pair<double, double>> boundary;  // (f0, z) near-equality points
    std::size_t index(std::size_t iz, std::size_t if0) const { return iz * f0_grid.size() + if0; }
};

/// Scan the {f0, z} plane for the constraints (25)-(27). For a > 0 only strict
/// R2 > 0 is needed; for a < 0 the +/- inequality is evaluated for both signs
/// and the conjunction reported in `mask`.
AdmissibleRegion admissible_region(const SolutionParams& p, double f0_min, double f0_max,
                                   double z_min, double z_max, int nf0, int nz,
                                   Gamma2Convention conv = Gamma2Convention::consistent);

}  // namespace ellipnls
