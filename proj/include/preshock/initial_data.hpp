#pragma once

#include <optional>
#include <string>
#include <vector>

#include "preshock/fields.hpp"
#include "preshock/grid.hpp"

namespace preshock {

/// Canonical-family parameters. w0' is a cutoff quartic-flat well of depth
/// -1/eps and width ~eps^{3/2}; z0, k0, a0 are band-limited trig polynomials
/// with derivative norms matching the exponent vector.
struct DataSpec {
    Params params;
    double w_bar = 1.0;       // background level of w0
    double well_kappa = 1.0;  // w0''' = kappa / eps^4 on the core
    double z_seed = 0.3;      // z0 amplitude = z_seed * eps^mu
    double k_seed = 0.3;      // k0 amplitude = k_seed * eps^{mu+1}
    double a_seed = 0.3;      // a0 amplitude = a_seed * eps
    double z_phase = 0.7, k_phase = 1.3, a_phase = 2.1;
    unsigned long long rng_seed = 0;

    void validate() const;
};

struct ConstraintCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0;    // positive = satisfied, by how much (scaled)
    double location = 0.0;  // worst-case angle, when meaningful
};

struct ValidationReport {
    std::vector<ConstraintCheck> checks;
    bool valid() const;
    std::string summary() const;
    const ConstraintCheck* find(const std::string& name) const;
};

/// Build the canonical family at t = -eps and validate it; throws
/// (carrying the report summary) if validation fails.
StateField build_canonical(const DataSpec& spec);

/// Evaluate every data-class constraint with spectral derivatives on a 4x
/// oversampled interpolant. Failures are data, not errors.
ValidationReport validate(const StateField& data, const Params& params);

/// Add a band-limited random perturbation of exact given max-norm to all
/// four fields. amplitude = 0 is the identity.
StateField perturb(const StateField& data, double amplitude, unsigned long long seed);

/// Restore the pointwise normalization after a perturbation: circularly
/// shift so the minimum of spectral w' sits at theta = 0, then rescale all
/// four fields by the symmetry (fields, t) -> (s*fields, t/s) so that
/// min w' = -1/eps exactly. Returns the applied shift and scale.
struct Renormalization {
    double shift = 0.0;
    double scale = 1.0;
};
Renormalization renormalize_min(StateField& data, const Params& params);

/// CSV/JSON data exchange: columns theta,w,z,k,a plus a self-describing
/// JSON header (eps, mu, exponents, grid size).
void save_state(const std::string& csv_path, const std::string& json_path,
                const StateField& data, const Params& params);
std::pair<StateField, Params> load_state(const std::string& csv_path,
                                         const std::string& json_path);

}  // namespace preshock
