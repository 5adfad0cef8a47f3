#pragma once

#include <complex>
#include <span>
#include <vector>

namespace preshock {

/// Fourier coefficients of a real periodic field in the e^{ik theta} basis,
/// k = 0..n/2. Produced by SpectralGrid::analyze; the Nyquist mode is dropped.
struct Spectrum {
    int n_grid = 0;
    std::vector<std::complex<double>> c;

    int max_mode() const { return static_cast<int>(c.size()) - 1; }
};

/// Piecewise-Lagrange interpolant on a zero-padded fine grid. Built once per
/// field, then cheap to evaluate at arbitrary angles (periodic wrap).
/// Accuracy for band-limited fields is set by (oversample, order); the
/// defaults keep the error below 1e-12 of the field amplitude.
class FineInterpolant {
public:
    FineInterpolant() = default;
    FineInterpolant(std::vector<double> fine, int order);

    double operator()(double theta) const;
    void eval(std::span<const double> thetas, std::span<double> out) const;

    bool valid() const { return !fine_.empty(); }

private:
    std::vector<double> fine_;
    int order_ = 0;
    double inv_dx_ = 0.0;
    std::vector<double> inv_denom_;
};

/// Uniform periodic grid theta_i = -pi + i*(2*pi/n) with FFT-backed calculus.
class SpectralGrid {
public:
    explicit SpectralGrid(int n);

    int size() const { return n_; }
    double dx() const { return dx_; }
    const std::vector<double>& nodes() const { return nodes_; }
    /// Index of the node closest to theta = 0 (exact node for even n).
    int origin_index() const { return n_ / 2; }

    Spectrum analyze(std::span<const double> f) const;
    std::vector<double> synthesize(const Spectrum& s) const;

    std::vector<double> derivative(std::span<const double> f, int order = 1) const;
    /// Antiderivative of a zero-mean field; the k=0 coefficient of the result
    /// is set so the output has the requested mean.
    std::vector<double> antiderivative(std::span<const double> f, double mean = 0.0) const;
    /// Zero all modes with |k| > kmax.
    std::vector<double> truncated(std::span<const double> f, int kmax) const;
    /// Samples of f(theta - delta) (circular shift by a real offset).
    std::vector<double> shifted(std::span<const double> f, double delta) const;

    /// Direct trigonometric summation at one angle. O(n) per call; this is
    /// the oracle-grade evaluation that interpolants are tested against.
    static double eval_direct(const Spectrum& s, double theta);

    FineInterpolant interpolant(std::span<const double> f, int oversample = 16,
                                int order = 12) const;

private:
    int n_;
    double dx_;
    std::vector<double> nodes_;
};

/// Random band-limited field: modes 1..max_mode with unit-normal coefficients,
/// rescaled so the max-norm equals `amplitude` exactly (zero mean).
std::vector<double> random_band_limited(const SpectralGrid& grid, int max_mode,
                                        double amplitude, unsigned long long seed);

}  // namespace preshock
