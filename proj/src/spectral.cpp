#include "ellipnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace ellipnls {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

class Fft {
public:
    explicit Fft(int n) : n_(n) {
        buf_ = fftw_alloc_complex(n);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void load(const std::vector<Complex>& v) {
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = v[i].real();
            buf_[i][1] = v[i].imag();
        }
    }
    void store(std::vector<Complex>& v, double scale = 1.0) const {
        for (int i = 0; i < n_; ++i) v[i] = Complex(buf_[i][0] * scale, buf_[i][1] * scale);
    }
    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }
    fftw_complex* data() { return buf_; }

private:
    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_, bwd_;
};

}  // namespace

void SpectralConfig::validate() const {
    if (!(window > 0.0)) throw InvalidInputError("spectral window must be positive");
    if (n_modes < 64 || (n_modes & (n_modes - 1)) != 0)
        throw InvalidInputError("n_modes must be a power of two >= 64");
    if (!(dz > 0.0)) throw InvalidInputError("dz must be positive");
    if (!(z_span > 0.0)) throw InvalidInputError("z_span must be positive");
}

SampledField propagate(const std::vector<Complex>& initial, const SpectralConfig& cfg, double a) {
    cfg.validate();
    if (static_cast<int>(initial.size()) != cfg.n_modes)
        throw InvalidInputError("initial line length != n_modes");

    const int n = cfg.n_modes;
    const long nsteps = std::lround(cfg.z_span / cfg.dz);
    if (nsteps < 1) throw InvalidInputError("z_span shorter than one step");
    int stride = cfg.snapshot_stride;
    if (stride <= 0) stride = static_cast<int>(std::max<long>(1, nsteps / 512));

    std::vector<double> k2(n);
    for (int i = 0; i < n; ++i) {
        const int m = (i <= n / 2) ? i : i - n;
        const double k = kTwoPi * m / cfg.window;
        k2[i] = k * k;
    }

    double max0 = 0.0;
    for (const auto& v : initial) max0 = std::max(max0, std::abs(v));
    const double blowup_cap = 1e6 * std::max(max0, 1e-300);

    Fft fft(n);
    std::vector<Complex> cur = initial;
    SampledField out;
    out.t_grid.resize(n);
    for (int i = 0; i < n; ++i) out.t_grid[i] = -cfg.window / 2.0 + cfg.window * i / n;
    out.meta = {{"kind", "ssfm"},
                {"a", format_double(a)},
                {"window", format_double(cfg.window)},
                {"dz", format_double(cfg.dz)}};

    auto snapshot = [&](double z) {
        out.z_grid.push_back(z);
        out.values.insert(out.values.end(), cur.begin(), cur.end());
    };
    snapshot(0.0);

    const auto nonlinear_half = [&](double tau) {
        for (auto& v : cur) {
            const double I = std::norm(v);
            v *= Complex(std::cos(a * I * tau), std::sin(a * I * tau));
        }
    };

    for (long s = 1; s <= nsteps; ++s) {
        nonlinear_half(cfg.dz / 2.0);
        fft.load(cur);
        fft.forward();
        auto* b = fft.data();
        for (int i = 0; i < n; ++i) {
            const double ph = -k2[i] * cfg.dz;
            const double c = std::cos(ph), si = std::sin(ph);
            const double re = b[i][0], im = b[i][1];
            b[i][0] = re * c - im * si;
            b[i][1] = re * si + im * c;
        }
        fft.backward();
        fft.store(cur, 1.0 / n);
        nonlinear_half(cfg.dz / 2.0);

        double mx = 0.0;
        for (const auto& v : cur) mx = std::max(mx, std::abs(v));
        if (mx > blowup_cap)
            throw InstabilityError("split-step blow-up detected", s * cfg.dz);
        if (s % stride == 0 || s == nsteps) snapshot(s * cfg.dz);
    }
    out.check_shape();
    return out;
}

std::vector<Complex> spectral_derivative(const std::vector<Complex>& line, double window) {
    const int n = static_cast<int>(line.size());
    Fft fft(n);
    fft.load(line);
    fft.forward();
    auto* b = fft.data();
    for (int i = 0; i < n; ++i) {
        const int m = (i < n / 2) ? i : (i == n / 2 ? 0 : i - n);  // zero the Nyquist mode
        const double k = kTwoPi * m / window;
        const double re = b[i][0], im = b[i][1];
        b[i][0] = -k * im;  // multiply by ik
        b[i][1] = k * re;
    }
    fft.backward();
    std::vector<Complex> out(n);
    fft.store(out, 1.0 / n);
    return out;
}

Conserved conserved_quantities(const std::vector<Complex>& line, double window, double a) {
    if (line.empty()) return {0.0, 0.0};
    const double dt = window / line.size();
    const auto dpsi = spectral_derivative(line, window);
    double power = 0.0, ham = 0.0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const double I = std::norm(line[i]);
        power += I;
        ham += std::norm(dpsi[i]) - 0.5 * a * I * I;
    }
    return {power * dt, ham * dt};
}

}  // namespace ellipnls
