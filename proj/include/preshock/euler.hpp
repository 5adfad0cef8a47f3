#pragma once

#include <span>
#include <tuple>
#include <vector>

#include "preshock/fields.hpp"
#include "preshock/grid.hpp"

namespace preshock {

/// Riemann variables from the azimuthal velocity/sound-speed profiles:
/// w = b + c, z = b - c.
std::pair<std::vector<double>, std::vector<double>> riemann_from_primitive(
    std::span<const double> b, std::span<const double> c);

/// Inverse transform: b = (w+z)/2, c = (w-z)/2.
std::pair<std::vector<double>, std::vector<double>> primitive_from_riemann(
    std::span<const double> w, std::span<const double> z);

struct WaveSpeeds {
    double lambda1, lambda2, lambda3;
};

/// lambda1 = w/3 + z < lambda2 = 2(w+z)/3 < lambda3 = w + z/3 whenever w > z.
inline WaveSpeeds wave_speeds(double w, double z) {
    return {w / 3.0 + z, 2.0 * (w + z) / 3.0, w + z / 3.0};
}

/// Time derivatives of (w, z, k, a) from the rescaled azimuthal system,
/// with spectral differentiation and 2/3-rule dealiasing of the products.
/// Throws on a degenerate state (c <= 0 anywhere), naming the first bad index.
Tendency rhs(const SpectralGrid& grid, const StateField& state);

/// Differentiated Riemann variables q^w = dw - (1/4) c dk, q^z = dz + (1/4) c dk.
std::pair<std::vector<double>, std::vector<double>> diff_riemann(
    const SpectralGrid& grid, const StateField& state);

/// Specific vorticity 4 (w + z - da) c^{-2} e^k. Requires c > 0 everywhere.
std::vector<double> specific_vorticity(const SpectralGrid& grid, const StateField& state);

struct PolarProfiles {
    std::vector<double> u_r, u_theta, sigma, entropy;
};

/// Physical profiles at radius r: u_theta = r b, u_r = r a, sigma = r c, S = k.
PolarProfiles polar_reconstruction(const StateField& state, double r);

}  // namespace preshock
