#include "preshock/euler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace preshock {

std::pair<std::vector<double>, std::vector<double>> riemann_from_primitive(
    std::span<const double> b, std::span<const double> c) {
    if (b.size() != c.size())
        throw std::invalid_argument("riemann_from_primitive: length mismatch");
    std::vector<double> w(b.size()), z(b.size());
    for (size_t i = 0; i < b.size(); ++i) {
        w[i] = b[i] + c[i];
        z[i] = b[i] - c[i];
    }
    return {std::move(w), std::move(z)};
}

std::pair<std::vector<double>, std::vector<double>> primitive_from_riemann(
    std::span<const double> w, std::span<const double> z) {
    if (w.size() != z.size())
        throw std::invalid_argument("primitive_from_riemann: length mismatch");
    std::vector<double> b(w.size()), c(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        b[i] = 0.5 * (w[i] + z[i]);
        c[i] = 0.5 * (w[i] - z[i]);
    }
    return {std::move(b), std::move(c)};
}

Tendency rhs(const SpectralGrid& grid, const StateField& state) {
    const int n = grid.size();
    if (state.size() != n) throw std::invalid_argument("rhs: state/grid size mismatch");
    int bad = state.first_degenerate_index();
    if (bad >= 0)
        throw std::runtime_error("rhs: degenerate state, c <= 0 first at grid index " +
                                 std::to_string(bad));

    const int kd = n / 3;  // 2/3-rule cutoff for the quadratic products
    std::vector<double> dw_t = grid.derivative(state.w);
    std::vector<double> dz_t = grid.derivative(state.z);
    std::vector<double> dk_t = grid.derivative(state.k);
    std::vector<double> da_t = grid.derivative(state.a);

    Tendency out;
    out.dw.resize(n);
    out.dz.resize(n);
    out.dk.resize(n);
    out.da.resize(n);
    for (int i = 0; i < n; ++i) {
        const double w = state.w[i], z = state.z[i], a = state.a[i];
        const WaveSpeeds lam = wave_speeds(w, z);
        const double d = w - z;
        const double s = w + z;
        out.dw[i] = -lam.lambda3 * dw_t[i] - (8.0 / 3.0) * a * w + (1.0 / 24.0) * d * d * dk_t[i];
        out.dz[i] = -lam.lambda1 * dz_t[i] - (8.0 / 3.0) * a * z + (1.0 / 24.0) * d * d * dk_t[i];
        out.dk[i] = -lam.lambda2 * dk_t[i];
        out.da[i] = -lam.lambda2 * da_t[i] - (4.0 / 3.0) * a * a + (1.0 / 3.0) * s * s -
                    (1.0 / 6.0) * d * d;
    }
    out.dw = grid.truncated(out.dw, kd);
    out.dz = grid.truncated(out.dz, kd);
    out.dk = grid.truncated(out.dk, kd);
    out.da = grid.truncated(out.da, kd);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> diff_riemann(const SpectralGrid& grid,
                                                                 const StateField& state) {
    const int n = grid.size();
    std::vector<double> dw = grid.derivative(state.w);
    std::vector<double> dz = grid.derivative(state.z);
    std::vector<double> dk = grid.derivative(state.k);
    std::vector<double> qw(n), qz(n);
    for (int i = 0; i < n; ++i) {
        const double cross = 0.25 * state.sound_speed(i) * dk[i];
        qw[i] = dw[i] - cross;
        qz[i] = dz[i] + cross;
    }
    return {std::move(qw), std::move(qz)};
}

std::vector<double> specific_vorticity(const SpectralGrid& grid, const StateField& state) {
    int bad = state.first_degenerate_index();
    if (bad >= 0)
        throw std::runtime_error("specific_vorticity: c <= 0 first at grid index " +
                                 std::to_string(bad));
    std::vector<double> da = grid.derivative(state.a);
    std::vector<double> out(state.size());
    for (int i = 0; i < state.size(); ++i) {
        const double c = state.sound_speed(i);
        out[i] = 4.0 * (state.w[i] + state.z[i] - da[i]) / (c * c) * std::exp(state.k[i]);
    }
    return out;
}

PolarProfiles polar_reconstruction(const StateField& state, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("polar_reconstruction: r must be positive");
    auto [b, c] = primitive_from_riemann(state.w, state.z);
    PolarProfiles p;
    p.u_r.resize(state.size());
    p.u_theta.resize(state.size());
    p.sigma.resize(state.size());
    p.entropy = state.k;
    for (int i = 0; i < state.size(); ++i) {
        p.u_theta[i] = r * b[i];
        p.u_r[i] = r * state.a[i];
        p.sigma[i] = r * c[i];
    }
    return p;
}

}  // namespace preshock
