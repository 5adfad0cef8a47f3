#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace preshock {

/// Data-class decay exponents for (a0, z0, k0): ||d^j f||_inf <~ eps^{e_j},
/// j = 0..5.
struct ExponentVector {
    std::array<double, 6> alpha{};  // a0
    std::array<double, 6> beta{};   // z0
    std::array<double, 6> gamma{};  // k0

    /// Defaults consistent with the admissibility inequalities for every
    /// eps in (0,1): alpha = (0,0,2mu-1,...), beta = (0,mu-1,...),
    /// gamma = (0,mu,mu-1,...).
    static ExponentVector defaults(double mu);

    /// Throws if the admissibility inequalities fail.
    void check(double mu) const;
};

struct Params {
    double eps = 0.1;
    double mu = 0.25;
    double gamma_law = 2.0;  // only gamma = 2 is accepted
    ExponentVector exponents = ExponentVector::defaults(0.25);
    int n_grid = 2048;

    Params() = default;
    Params(double eps_, double mu_, int n);

    void validate() const;

    /// Grid size heuristic: resolve the eps^{3/2} well of w0' with ~1e-10
    /// spectral tail under the 2/3 rule.
    static int suggest_grid(double eps);
};

/// Periodic samples of (w, z, k, a) on the uniform grid at one time.
struct StateField {
    double t = 0.0;
    std::vector<double> w, z, k, a;

    int size() const { return static_cast<int>(w.size()); }

    /// c = (w - z)/2 at one sample.
    double sound_speed(int i) const { return 0.5 * (w[i] - z[i]); }

    /// Returns the first index where c <= 0, or -1 if hyperbolic everywhere.
    int first_degenerate_index() const;
    bool hyperbolic() const { return first_degenerate_index() < 0; }
};

struct Tendency {
    std::vector<double> dw, dz, dk, da;
};

}  // namespace preshock
