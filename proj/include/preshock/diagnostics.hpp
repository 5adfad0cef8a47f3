#pragma once

#include <string>
#include <vector>

#include "preshock/solver.hpp"

namespace preshock {

struct IdentityResidual {
    std::string name;
    std::vector<double> t;
    std::vector<double> sup;  // per-snapshot sup-norm residual
    double max_sup() const;
    double max_relative = 0.0;  // scaled by the identity's right-side magnitude
};

/// Exact-identity residuals evaluated by differencing stored compositions in
/// time (4th-order finite differences on the snapshot times) against
/// spectrally computed right sides. The default subset tracks c and k along
/// the three characteristic families; `full_set` adds the first-derivative
/// variants.
std::vector<IdentityResidual> appendix_identity_residuals(const Trajectory& traj,
                                                          bool full_set = false);

/// Residual of the vorticity evolution along phi and of its integral
/// (integrating-factor) representation.
std::vector<IdentityResidual> vorticity_checks(const Trajectory& traj);

struct EnvelopeCheck {
    std::string name;
    bool pass = false;
    double worst = 0.0;   // worst measured value
    double bound = 0.0;   // configured bound
    double margin = 0.0;  // bound - worst (scaled)
};

struct EnvelopeReport {
    std::vector<EnvelopeCheck> checks;
    bool pass() const;
    std::string summary() const;
};

/// A-priori bounds with configured slack: w ~ 1, c ~ 1, psi_x ~ 1, phi_x ~ 1,
/// eta_x <= 4 + slack, eta_x |q^w.eta| <= 2/eps (1+slack), |q^z| bounded by
/// the initial data, and the along-phi integral bound on |dw|.
EnvelopeReport estimate_envelopes(const Trajectory& traj, const Params& params,
                                  double slack = 4.0);

/// Finite-difference weights for the m-th derivative at x0 from arbitrary
/// nodes (Fornberg's recursion). Exposed for tests.
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

}  // namespace preshock
