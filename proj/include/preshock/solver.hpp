#pragma once

#include <functional>
#include <span>

#include "preshock/flow.hpp"

namespace preshock {

struct SolverConfig {
    double cfl = 0.4;
    double grad_limit = 0.5;       // dt <= grad_limit / ||d lambda3||_inf
    double stop_eta_x = 1e-2;      // min eta_x stop threshold
    double densify_below = 0.1;    // snapshot every step once min eta_x is below
    double tail_rate_frac = 0.25;  // dt <= frac * min_eta_x / |d(min eta_x)/dt|
    double cross_frac = 0.2;       // resolve slow-family crossings of the cusp sliver:
                                   // dt <= frac * eps^{3/2} (min eta_x)^{3/2} / ((4/3) max c)
    double t_cap = 0.0;            // 0: auto (t0 + 4 eps in full mode)
    double snap_interval = 0.0;    // 0: auto (eps/30)
    double resolution_tail = 1e-6; // stop when the driving spectrum tail exceeds this
    double envelope_slack = 4.0;
    bool burgers = false;
    bool check_envelopes = true;
    int oversample = 16;
    int interp_order = 12;
};

/// Custom stop predicate; fires in addition to the built-in rules.
using StopRule = std::function<bool(const MonitorRow&)>;

struct SolverState {
    StateField state;  // w is reconstructed from (eta, comp_w) in full mode
    FlowState flows;
};

/// One RK4 step of the coupled state + flow system. Throws on NaN or a
/// degenerate state, naming the step context.
void step(const SpectralGrid& grid, SolverState& s, double dt, const SolverConfig& cfg);

/// Monitor quantities of the current state (min eta_x and its refined argmin,
/// gradient norms, min c, spectral tails, flow ordering).
MonitorRow monitor_state(const SpectralGrid& grid, const SolverState& s, const SolverConfig& cfg);

/// Integrate from the given data until a stop rule fires. The data's time is
/// the start time (t = -eps for the canonical class; 0 for Burgers mode).
Trajectory evolve_until(const StateField& data, const Params& params, const SolverConfig& cfg,
                        const StopRule& extra_stop = nullptr);

/// Trigonometric interpolation of a periodic field at arbitrary positions.
/// Exact for band-limited fields (tested against direct summation).
std::vector<double> compose(const SpectralGrid& grid, std::span<const double> field,
                            std::span<const double> positions);

/// Closed-form first derivatives of the one/two-characteristic flows from the
/// stored quadratures of a snapshot:
///   psi_x = (c0 / c.psi)^{1/2} exp(int (dz - 4/3 a).psi)
///   phi_x = (c0 / c.phi)^2 exp(-(16/3) int a.phi)
/// `alt_form` evaluates phi_x through the vorticity integrating factor
/// (c0^2 Ifrak^-2 c^-2.phi) instead.
enum class FlowFamily { Psi, Phi };
std::vector<double> flow_derivative_closed_form(const Trajectory& traj, int snapshot_index,
                                                FlowFamily which, bool alt_form = false);

struct ResidualSeries {
    std::string name;
    std::vector<double> t;
    std::vector<double> sup;       // absolute sup-norm residual per snapshot
    std::vector<double> relative;  // sup residual / scale of the identity
    double max_relative() const;
    double max_sup() const;
};

/// Residuals of the three Duhamel identities evaluated on every snapshot:
/// the q^w transport representation, the eta_x integral representation, and
/// the q^z transport representation.
std::vector<ResidualSeries> duhamel_residuals(const Trajectory& traj);

/// Transport residual ||k.phi - k0||_inf per snapshot (spectral composition
/// of the evolved Eulerian k at the stored phi positions).
ResidualSeries transport_residual(const Trajectory& traj);

}  // namespace preshock
