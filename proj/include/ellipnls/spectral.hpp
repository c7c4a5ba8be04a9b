#pragma once

#include <vector>

#include "ellipnls/field.hpp"

namespace ellipnls {

struct SpectralConfig {
    double window = 0;   // periodic t-domain width
    int n_modes = 0;     // power of two, >= 64
    double dz = 0;
    double z_span = 0;
    int snapshot_stride = 0;  // 0 = choose automatically (~<= 512 snapshots)

    void validate() const;
};

/// Symmetric (Strang) split-step Fourier propagation of
/// i Psi_z + Psi_tt + a Psi |Psi|^2 = 0 on a periodic window.
SampledField propagate(const std::vector<Complex>& initial, const SpectralConfig& cfg, double a);

struct Conserved {
    double power;        // int |Psi|^2 dt
    double hamiltonian;  // int (|Psi_t|^2 - (a/2) |Psi|^4) dt
};

Conserved conserved_quantities(const std::vector<Complex>& line, double window, double a);

/// Spectral derivative of a periodic line (used by the Hamiltonian and tests).
std::vector<Complex> spectral_derivative(const std::vector<Complex>& line, double window);

}  // namespace ellipnls
