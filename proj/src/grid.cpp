#include "preshock/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace preshock {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW plan creation is not thread-safe; execution on distinct arrays is.
// Plans are cached per transform size and reused via fftw_execute_dft_r2c,
// which requires the new arrays to have the same alignment as the ones the
// plan was created with; we always allocate through fftw_malloc.
struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        double* re = fftw_alloc_real(n);
        fftw_complex* cx = fftw_alloc_complex(n / 2 + 1);
        PlanPair p;
        p.r2c = fftw_plan_dft_r2c_1d(n, re, cx, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_1d(n, cx, re, FFTW_ESTIMATE);
        fftw_free(re);
        fftw_free(cx);
        plans_[n] = p;
        return p;
    }

private:
    std::mutex mutex_;
    std::map<int, PlanPair> plans_;
};

struct RealBuf {
    double* p;
    explicit RealBuf(int n) : p(fftw_alloc_real(n)) {}
    ~RealBuf() { fftw_free(p); }
};
struct ComplexBuf {
    fftw_complex* p;
    explicit ComplexBuf(int n) : p(fftw_alloc_complex(n)) {}
    ~ComplexBuf() { fftw_free(p); }
};

// Synthesize a spectrum onto m >= n_grid uniform nodes -pi + j*(2*pi/m).
std::vector<double> synth_on(const Spectrum& s, int m) {
    PlanPair plans = PlanCache::instance().get(m);
    ComplexBuf cx(m / 2 + 1);
    RealBuf re(m);
    const int kmax = s.max_mode();
    for (int k = 0; k <= m / 2; ++k) {
        // nodes start at -pi: e^{ik theta_j} = (-1)^k e^{2 pi i jk/m}
        std::complex<double> v =
            (k <= kmax) ? s.c[k] * ((k % 2 == 0) ? 1.0 : -1.0) : 0.0;
        cx.p[k][0] = v.real();
        cx.p[k][1] = v.imag();
    }
    fftw_execute_dft_c2r(plans.c2r, cx.p, re.p);
    return std::vector<double>(re.p, re.p + m);
}

}  // namespace

SpectralGrid::SpectralGrid(int n) : n_(n), dx_(kTwoPi / n), nodes_(n) {
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("SpectralGrid: n must be even and >= 8");
    for (int i = 0; i < n; ++i) nodes_[i] = -kPi + i * dx_;
}

Spectrum SpectralGrid::analyze(std::span<const double> f) const {
    if (static_cast<int>(f.size()) != n_) throw std::invalid_argument("analyze: length mismatch");
    PlanPair plans = PlanCache::instance().get(n_);
    RealBuf re(n_);
    ComplexBuf cx(n_ / 2 + 1);
    std::copy(f.begin(), f.end(), re.p);
    fftw_execute_dft_r2c(plans.r2c, re.p, cx.p);
    Spectrum s;
    s.n_grid = n_;
    s.c.resize(n_ / 2 + 1);
    const double scale = 1.0 / n_;
    for (int k = 0; k <= n_ / 2; ++k) {
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s.c[k] = std::complex<double>(cx.p[k][0], cx.p[k][1]) * (scale * sign);
    }
    s.c[n_ / 2] = 0.0;  // drop Nyquist; all calculus here treats it as absent
    return s;
}

std::vector<double> SpectralGrid::synthesize(const Spectrum& s) const {
    return synth_on(s, n_);
}

std::vector<double> SpectralGrid::derivative(std::span<const double> f, int order) const {
    Spectrum s = analyze(f);
    for (int k = 0; k <= s.max_mode(); ++k) {
        std::complex<double> ik(0.0, static_cast<double>(k));
        std::complex<double> mult = 1.0;
        for (int j = 0; j < order; ++j) mult *= ik;
        s.c[k] *= mult;
    }
    return synthesize(s);
}

std::vector<double> SpectralGrid::antiderivative(std::span<const double> f, double mean) const {
    Spectrum s = analyze(f);
    s.c[0] = 0.0;
    for (int k = 1; k <= s.max_mode(); ++k) {
        s.c[k] /= std::complex<double>(0.0, static_cast<double>(k));
    }
    std::vector<double> out = synthesize(s);
    double m0 = 0.0;
    for (double v : out) m0 += v;
    m0 /= n_;
    for (double& v : out) v += mean - m0;
    return out;
}

std::vector<double> SpectralGrid::truncated(std::span<const double> f, int kmax) const {
    Spectrum s = analyze(f);
    for (int k = kmax + 1; k <= s.max_mode(); ++k) s.c[k] = 0.0;
    return synthesize(s);
}

std::vector<double> SpectralGrid::shifted(std::span<const double> f, double delta) const {
    Spectrum s = analyze(f);
    for (int k = 0; k <= s.max_mode(); ++k) {
        s.c[k] *= std::exp(std::complex<double>(0.0, -k * delta));
    }
    return synthesize(s);
}

double SpectralGrid::eval_direct(const Spectrum& s, double theta) {
    // Horner-style recurrence on e^{i theta}.
    const std::complex<double> rot = std::exp(std::complex<double>(0.0, theta));
    std::complex<double> e = 1.0;
    double acc = s.c[0].real();
    for (int k = 1; k <= s.max_mode(); ++k) {
        e *= rot;
        acc += 2.0 * (s.c[k].real() * e.real() - s.c[k].imag() * e.imag());
    }
    return acc;
}

FineInterpolant SpectralGrid::interpolant(std::span<const double> f, int oversample,
                                          int order) const {
    Spectrum s = analyze(f);
    return FineInterpolant(synth_on(s, n_ * oversample), order);
}

FineInterpolant::FineInterpolant(std::vector<double> fine, int order)
    : fine_(std::move(fine)), order_(order) {
    if (order_ < 2 || order_ % 2 != 0) throw std::invalid_argument("FineInterpolant: order must be even >= 2");
    inv_dx_ = fine_.size() / kTwoPi;
    // Lagrange denominators on uniform nodes 0..order-1: prod_{m!=j} (j-m).
    inv_denom_.resize(order_);
    for (int j = 0; j < order_; ++j) {
        double d = 1.0;
        for (int m = 0; m < order_; ++m) {
            if (m != j) d *= static_cast<double>(j - m);
        }
        inv_denom_[j] = 1.0 / d;
    }
}

double FineInterpolant::operator()(double theta) const {
    const int m = static_cast<int>(fine_.size());
    double s = (theta + kPi) * inv_dx_;  // fine-grid coordinate
    s -= std::floor(s / m) * m;          // wrap into [0, m)
    const int i0 = static_cast<int>(std::floor(s));
    const int half = order_ / 2;
    const double u = s - i0 + (half - 1);  // position in stencil coords

    // prefix[j] = prod_{m<j}(u-m), suffix[j] = prod_{m>j}(u-m)
    double prefix[32], suffix[32];
    prefix[0] = 1.0;
    for (int j = 1; j < order_; ++j) prefix[j] = prefix[j - 1] * (u - (j - 1));
    suffix[order_ - 1] = 1.0;
    for (int j = order_ - 2; j >= 0; --j) suffix[j] = suffix[j + 1] * (u - (j + 1));

    double acc = 0.0;
    int base = i0 - (half - 1);
    for (int j = 0; j < order_; ++j) {
        int idx = base + j;
        idx %= m;
        if (idx < 0) idx += m;
        acc += fine_[idx] * prefix[j] * suffix[j] * inv_denom_[j];
    }
    return acc;
}

void FineInterpolant::eval(std::span<const double> thetas, std::span<double> out) const {
    for (size_t i = 0; i < thetas.size(); ++i) out[i] = (*this)(thetas[i]);
}

std::vector<double> random_band_limited(const SpectralGrid& grid, int max_mode,
                                        double amplitude, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spectrum s;
    s.n_grid = grid.size();
    s.c.assign(grid.size() / 2 + 1, 0.0);
    for (int k = 1; k <= std::min(max_mode, s.max_mode()); ++k) {
        s.c[k] = std::complex<double>(gauss(rng), gauss(rng));
    }
    std::vector<double> f = grid.synthesize(s);
    double mx = 0.0;
    for (double v : f) mx = std::max(mx, std::abs(v));
    if (mx > 0.0 && amplitude > 0.0) {
        for (double& v : f) v *= amplitude / mx;
    } else if (amplitude == 0.0) {
        std::fill(f.begin(), f.end(), 0.0);
    }
    return f;
}

}  // namespace preshock
