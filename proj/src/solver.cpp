#include "preshock/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace preshock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Parabola-refined location of the minimum of samples on the label grid.
std::pair<double, double> refined_min(const SpectralGrid& grid, std::span<const double> f) {
    const int n = grid.size();
    int i0 = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
    double ym = f[(i0 - 1 + n) % n], y0 = f[i0], yp = f[(i0 + 1) % n];
    double denom = ym - 2.0 * y0 + yp;
    double frac = 0.0, val = y0;
    if (denom > 0.0) {
        frac = 0.5 * (ym - yp) / denom;
        frac = std::clamp(frac, -0.5, 0.5);
        val = y0 - 0.25 * (ym - yp) * frac;
    }
    double loc = grid.nodes()[i0] + frac * grid.dx();
    if (loc > std::numbers::pi) loc -= kTwoPi;
    return {loc, val};
}

/// Energy fraction of the spectrum above mode k_lo (relative to all k >= 1).
double spectral_tail_fraction(const Spectrum& s, int k_lo) {
    double tot = 0.0, tail = 0.0;
    for (int k = 1; k <= s.max_mode(); ++k) {
        double e = std::norm(s.c[k]);
        tot += e;
        if (k > k_lo) tail += e;
    }
    return (tot > 0.0) ? std::sqrt(tail / tot) : 0.0;
}

struct StageTables {
    FineInterpolant z, k, a, dz, dk, da;    // Eulerian fields and derivatives
    FineInterpolant W, Wx, eta_x, eta_disp; // label-side fields
    std::vector<double> zx, kx, ax;         // Eulerian derivatives on the grid
    std::vector<double> Wx_grid;            // dW/dx on the label grid
};

/// Newton inversion of eta (monotone while eta_x > 0): solves
/// g + disp(g) = target per entry, warm-started from g.
void invert_eta(const FineInterpolant& disp, const FineInterpolant& etax,
                std::span<const double> targets, std::vector<double>& g) {
    for (size_t i = 0; i < targets.size(); ++i) {
        double gi = g[i];
        double resid = gi + disp(gi) - targets[i];
        int it = 0;
        while (std::abs(resid) > 1e-12 && it < 80) {
            double slope = etax(gi);
            if (slope < 1e-9) slope = 1e-9;
            double delta = resid / slope;
            delta = std::clamp(delta, -0.5, 0.5);
            gi -= delta;
            resid = gi + disp(gi) - targets[i];
            ++it;
        }
        g[i] = gi;
    }
}

}  // namespace

void FlowIntegrals::resize(int n) {
    for_each([n](std::vector<double>& v) { v.assign(n, 0.0); });
}

std::vector<double> FlowState::integrating_factor() const {
    std::vector<double> out(size());
    for (int i = 0; i < size(); ++i) {
        out[i] = std::exp(comp_k[i] / 8.0 - (8.0 / 3.0) * ints.a_eta[i]);
    }
    return out;
}

std::vector<double> FlowState::ifrak() const {
    std::vector<double> out(size());
    for (int i = 0; i < size(); ++i) out[i] = std::exp((8.0 / 3.0) * ints.a_phi[i]);
    return out;
}

FlowState FlowState::identity(const SpectralGrid& grid, const StateField& data, bool /*burgers*/) {
    FlowState f;
    f.eta = grid.nodes();
    f.psi = grid.nodes();
    f.phi = grid.nodes();
    f.eta_x.assign(grid.size(), 1.0);
    f.comp_w = data.w;
    f.comp_z = data.z;
    f.comp_k = data.k;
    f.comp_a = data.a;
    f.g_psi = grid.nodes();
    f.g_phi = grid.nodes();
    f.inv_grid = grid.nodes();
    f.c0.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) f.c0[i] = 0.5 * (data.w[i] - data.z[i]);
    f.ints.resize(grid.size());
    return f;
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::MinEtaX: return "min-eta-x";
        case StopReason::Resolution: return "resolution";
        case StopReason::TimeCap: return "time-cap";
        case StopReason::EstimateViolation: return "estimate-violation";
        case StopReason::Custom: return "custom";
    }
    return "unknown";
}

namespace {

StageTables build_tables(const SpectralGrid& grid, const SolverState& s, const SolverConfig& cfg,
                         bool burgers) {
    StageTables t;
    const int os = cfg.oversample, p = cfg.interp_order;
    if (burgers) {
        // single field u lives in state.w
        t.zx = grid.derivative(s.state.w);
        t.z = grid.interpolant(s.state.w, os, p);
        t.dz = grid.interpolant(t.zx, os, p);
        return t;
    }
    t.zx = grid.derivative(s.state.z);
    t.kx = grid.derivative(s.state.k);
    t.ax = grid.derivative(s.state.a);
    t.z = grid.interpolant(s.state.z, os, p);
    t.k = grid.interpolant(s.state.k, os, p);
    t.a = grid.interpolant(s.state.a, os, p);
    t.dz = grid.interpolant(t.zx, os, p);
    t.dk = grid.interpolant(t.kx, os, p);
    t.da = grid.interpolant(t.ax, os, p);

    t.Wx_grid = grid.derivative(s.flows.comp_w);
    t.W = grid.interpolant(s.flows.comp_w, os, p);
    t.Wx = grid.interpolant(t.Wx_grid, os, p);
    t.eta_x = grid.interpolant(s.flows.eta_x, os, p);
    std::vector<double> disp(grid.size());
    for (int i = 0; i < grid.size(); ++i) disp[i] = s.flows.eta[i] - grid.nodes()[i];
    t.eta_disp = grid.interpolant(disp, os, p);
    return t;
}

/// Reconstruct the Eulerian w samples through the inverse flow map; updates
/// the warm-start cache in `flows.inv_grid`.
void reconstruct_w(const SpectralGrid& grid, const StageTables& t, FlowState& flows,
                   std::vector<double>& w_out) {
    invert_eta(t.eta_disp, t.eta_x, grid.nodes(), flows.inv_grid);
    w_out.resize(grid.size());
    for (int i = 0; i < grid.size(); ++i) w_out[i] = t.W(flows.inv_grid[i]);
}

/// Stage derivative of the full coupled system. `d` must be sized like `s`.
/// Returns the reconstructed w samples through `s_mutable_w` so callers can
/// keep the state consistent.
void eval_full(const SpectralGrid& grid, SolverState& s, const SolverConfig& cfg,
               SolverState& d) {
    const int n = grid.size();
    const int kd = n / 3;
    StageTables t = build_tables(grid, s, cfg, false);

    reconstruct_w(grid, t, s.flows, s.state.w);
    int bad = s.state.first_degenerate_index();
    if (bad >= 0) {
        throw std::runtime_error("solver: degenerate state (c <= 0) at grid index " +
                                 std::to_string(bad) + ", t = " + std::to_string(s.state.t));
    }

    // Eulerian tendencies for z, k, a (w pointwise, never its theta-derivative)
    for (int i = 0; i < n; ++i) {
        const double w = s.state.w[i], z = s.state.z[i], a = s.state.a[i];
        const double l1 = w / 3.0 + z;
        const double l2 = 2.0 / 3.0 * (w + z);
        const double dd = w - z, ss = w + z;
        d.state.z[i] = -l1 * t.zx[i] - (8.0 / 3.0) * a * z + (1.0 / 24.0) * dd * dd * t.kx[i];
        d.state.k[i] = -l2 * t.kx[i];
        d.state.a[i] = -l2 * t.ax[i] - (4.0 / 3.0) * a * a + (1.0 / 3.0) * ss * ss -
                       (1.0 / 6.0) * dd * dd;
    }
    d.state.z = grid.truncated(d.state.z, kd);
    d.state.k = grid.truncated(d.state.k, kd);
    d.state.a = grid.truncated(d.state.a, kd);

    // inverse-map caches at the psi/phi positions
    invert_eta(t.eta_disp, t.eta_x, s.flows.psi, s.flows.g_psi);
    invert_eta(t.eta_disp, t.eta_x, s.flows.phi, s.flows.g_phi);

    // compositions
    std::vector<double> dz_eta(n), dk_eta(n), da_eta(n);
    t.dz.eval(s.flows.eta, dz_eta);
    t.dk.eval(s.flows.eta, dk_eta);
    t.da.eval(s.flows.eta, da_eta);
    std::vector<double> z_psi(n), a_psi(n), dz_psi(n), dk_psi(n), da_psi(n);
    t.z.eval(s.flows.psi, z_psi);
    t.a.eval(s.flows.psi, a_psi);
    t.dz.eval(s.flows.psi, dz_psi);
    t.dk.eval(s.flows.psi, dk_psi);
    t.da.eval(s.flows.psi, da_psi);
    std::vector<double> z_phi(n), a_phi(n);
    t.z.eval(s.flows.phi, z_phi);
    t.a.eval(s.flows.phi, a_phi);
    std::vector<double> W_gps(n), Wx_gps(n), ex_gps(n);
    t.W.eval(s.flows.g_psi, W_gps);
    t.Wx.eval(s.flows.g_psi, Wx_gps);
    t.eta_x.eval(s.flows.g_psi, ex_gps);
    std::vector<double> Wx_gph(n), ex_gph(n), W_gph(n);
    t.W.eval(s.flows.g_phi, W_gph);
    t.Wx.eval(s.flows.g_phi, Wx_gph);
    t.eta_x.eval(s.flows.g_phi, ex_gph);

    FlowIntegrals& di = d.flows.ints;
    for (int i = 0; i < n; ++i) {
        const double W = s.flows.comp_w[i], Z = s.flows.comp_z[i], K = s.flows.comp_k[i],
                     A = s.flows.comp_a[i];
        const double ex = s.flows.eta_x[i];
        const double c_eta = 0.5 * (W - Z);

        d.flows.eta[i] = W + Z / 3.0;
        d.flows.eta_x[i] = t.Wx_grid[i] + (1.0 / 3.0) * dz_eta[i] * ex;
        // (1/24)(w-z)^2 dk = (1/6) c^2 dk
        const double source = (1.0 / 6.0) * c_eta * c_eta * dk_eta[i];
        d.flows.comp_w[i] = -(8.0 / 3.0) * A * W + source;
        d.flows.comp_z[i] = -(8.0 / 3.0) * A * Z + source + (4.0 / 3.0) * c_eta * dz_eta[i];
        d.flows.comp_k[i] = (2.0 / 3.0) * c_eta * dk_eta[i];
        d.flows.comp_a[i] = -(4.0 / 3.0) * A * A + (1.0 / 3.0) * (W + Z) * (W + Z) -
                            (1.0 / 6.0) * (W - Z) * (W - Z) + (2.0 / 3.0) * c_eta * da_eta[i];

        const double w_psi = W_gps[i];
        const double c_psi = 0.5 * (w_psi - z_psi[i]);
        d.flows.psi[i] = w_psi / 3.0 + z_psi[i];
        const double w_phi = W_gph[i];
        const double c_phi = 0.5 * (w_phi - z_phi[i]);
        d.flows.phi[i] = 2.0 / 3.0 * (w_phi + z_phi[i]);

        const double I = std::exp(K / 8.0 - (8.0 / 3.0) * s.flows.ints.a_eta[i]);
        const double qz_eta = dz_eta[i] + 0.25 * c_eta * dk_eta[i];
        di.a_eta[i] = A;
        di.a_phi[i] = a_phi[i];
        di.zx_psi[i] = dz_psi[i] - (4.0 / 3.0) * a_psi[i];
        di.duh_qz[i] = (1.0 / I) * ex * c_eta * dk_eta[i] * qz_eta;
        di.duh_wa[i] = (1.0 / I) * W * da_eta[i] * ex;
        di.qw_eta[i] = t.Wx_grid[i] - 0.25 * c_eta * dk_eta[i] * ex;
        di.ck_eta[i] = ex * c_eta * dk_eta[i];
        di.zx_eta[i] = ex * dz_eta[i];
        di.damp_psi[i] = (8.0 / 3.0) * a_psi[i] + (1.0 / 12.0) * c_psi * dk_psi[i];
        const double psi_x =
            std::sqrt(s.flows.c0[i] / c_psi) * std::exp(s.flows.ints.zx_psi[i]);
        const double qw_psi = Wx_gps[i] / ex_gps[i] - 0.25 * c_psi * dk_psi[i];
        const double damp = std::exp(s.flows.ints.damp_psi[i]);
        di.duh_qw[i] = damp * psi_x * c_psi * dk_psi[i] * qw_psi;
        di.duh_za[i] = damp * psi_x * z_psi[i] * da_psi[i];
        const double ifrak = std::exp((8.0 / 3.0) * s.flows.ints.a_phi[i]);
        di.vort[i] = ifrak * c_phi * c_phi;
        di.abswx_phi[i] = std::abs(Wx_gph[i] / ex_gph[i]);
    }
}

void eval_burgers(const SpectralGrid& grid, SolverState& s, const SolverConfig& cfg,
                  SolverState& d) {
    const int n = grid.size();
    const int kd = n / 3;
    StageTables t = build_tables(grid, s, cfg, true);
    for (int i = 0; i < n; ++i) d.state.w[i] = -s.state.w[i] * t.zx[i];
    d.state.w = grid.truncated(d.state.w, kd);
    std::vector<double> u_eta(n), du_eta(n);
    t.z.eval(s.flows.eta, u_eta);
    t.dz.eval(s.flows.eta, du_eta);
    for (int i = 0; i < n; ++i) {
        d.flows.eta[i] = u_eta[i];
        d.flows.eta_x[i] = du_eta[i] * s.flows.eta_x[i];
    }
}

template <class F>
void for_each_ode_array(SolverState& s, bool burgers, F&& f) {
    f(s.flows.eta);
    f(s.flows.eta_x);
    if (burgers) {
        f(s.state.w);
        return;
    }
    f(s.state.z);
    f(s.state.k);
    f(s.state.a);
    f(s.flows.psi);
    f(s.flows.phi);
    f(s.flows.comp_w);
    f(s.flows.comp_z);
    f(s.flows.comp_k);
    f(s.flows.comp_a);
    s.flows.ints.for_each(f);
}

template <class F>
void zip_ode_arrays(SolverState& s, SolverState& o, bool burgers, F&& f) {
    f(s.flows.eta, o.flows.eta);
    f(s.flows.eta_x, o.flows.eta_x);
    if (burgers) {
        f(s.state.w, o.state.w);
        return;
    }
    f(s.state.z, o.state.z);
    f(s.state.k, o.state.k);
    f(s.state.a, o.state.a);
    f(s.flows.psi, o.flows.psi);
    f(s.flows.phi, o.flows.phi);
    f(s.flows.comp_w, o.flows.comp_w);
    f(s.flows.comp_z, o.flows.comp_z);
    f(s.flows.comp_k, o.flows.comp_k);
    f(s.flows.comp_a, o.flows.comp_a);
    s.flows.ints.for_each_with(o.flows.ints, f);
}

void eval_stage(const SpectralGrid& grid, SolverState& s, const SolverConfig& cfg,
                SolverState& d) {
    if (cfg.burgers) {
        eval_burgers(grid, s, cfg, d);
    } else {
        eval_full(grid, s, cfg, d);
    }
}

void nan_check(SolverState& s, bool burgers, double t, double dt) {
    bool bad = false;
    for_each_ode_array(s, burgers, [&](std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) bad = true;
        }
    });
    if (bad) {
        throw std::runtime_error("solver: non-finite value after step at t = " +
                                 std::to_string(t) + ", dt = " + std::to_string(dt));
    }
}

}  // namespace

void step(const SpectralGrid& grid, SolverState& s, double dt, const SolverConfig& cfg) {
    const bool bg = cfg.burgers;
    SolverState k1 = s, k2 = s, k3 = s, k4 = s, tmp = s;
    const double t0 = s.state.t;

    auto set_tmp = [&](SolverState& kslot, double coef) {
        zip_ode_arrays(tmp, s, bg, [](std::vector<double>& a, std::vector<double>& b) {
            std::copy(b.begin(), b.end(), a.begin());
        });
        zip_ode_arrays(tmp, kslot, bg, [coef, dt](std::vector<double>& y, std::vector<double>& k) {
            for (size_t i = 0; i < y.size(); ++i) y[i] += coef * dt * k[i];
        });
    };
    auto accumulate = [&](SolverState& kslot, double weight) {
        zip_ode_arrays(s, kslot, bg, [weight, dt](std::vector<double>& y, std::vector<double>& k) {
            for (size_t i = 0; i < y.size(); ++i) y[i] += weight * dt * k[i];
        });
    };

    eval_stage(grid, s, cfg, k1);
    set_tmp(k1, 0.5);
    tmp.state.t = t0 + 0.5 * dt;
    eval_stage(grid, tmp, cfg, k2);
    set_tmp(k2, 0.5);
    tmp.state.t = t0 + 0.5 * dt;
    eval_stage(grid, tmp, cfg, k3);
    set_tmp(k3, 1.0);
    tmp.state.t = t0 + dt;
    eval_stage(grid, tmp, cfg, k4);

    accumulate(k1, 1.0 / 6.0);
    accumulate(k2, 1.0 / 3.0);
    accumulate(k3, 1.0 / 3.0);
    accumulate(k4, 1.0 / 6.0);
    s.state.t = t0 + dt;
    // carry the freshest inverse-map caches as warm starts
    s.flows.g_psi = tmp.flows.g_psi;
    s.flows.g_phi = tmp.flows.g_phi;
    s.flows.inv_grid = tmp.flows.inv_grid;

    nan_check(s, bg, s.state.t, dt);

    // leave the state consistent: reconstruct w and polish the inverse-map
    // caches on the post-step flows
    if (!bg) {
        StageTables t = build_tables(grid, s, cfg, false);
        reconstruct_w(grid, t, s.flows, s.state.w);
        invert_eta(t.eta_disp, t.eta_x, s.flows.psi, s.flows.g_psi);
        invert_eta(t.eta_disp, t.eta_x, s.flows.phi, s.flows.g_phi);
    }
}

MonitorRow monitor_state(const SpectralGrid& grid, const SolverState& s, const SolverConfig& cfg) {
    MonitorRow m;
    m.t = s.state.t;
    auto [loc, val] = refined_min(grid, s.flows.eta_x);
    m.min_eta_x = val;
    m.argmin_label = loc;
    m.max_eta_x = *std::max_element(s.flows.eta_x.begin(), s.flows.eta_x.end());
    if (cfg.burgers) {
        std::vector<double> ux = grid.derivative(s.state.w);
        m.norm_wx = max_abs(ux);
        m.spectral_tail = spectral_tail_fraction(grid.analyze(s.state.w), 3 * (grid.size() / 3) / 4);
        m.min_c = 1.0;
        return m;
    }
    std::vector<double> Wx = grid.derivative(s.flows.comp_w);
    double nw = 0.0;
    for (int i = 0; i < grid.size(); ++i) nw = std::max(nw, std::abs(Wx[i] / s.flows.eta_x[i]));
    m.norm_wx = nw;
    m.norm_zx = max_abs(grid.derivative(s.state.z));
    m.norm_kx = max_abs(grid.derivative(s.state.k));
    m.norm_ax = max_abs(grid.derivative(s.state.a));
    double minc = 1e300, minw = 1e300, maxz = -1e300;
    for (int i = 0; i < grid.size(); ++i) {
        minc = std::min(minc, s.state.sound_speed(i));
        minw = std::min(minw, s.state.w[i]);
        maxz = std::max(maxz, s.state.z[i]);
    }
    m.min_c = minc;
    m.max_z_minus_min_w = maxz - minw;
    m.spectral_tail = spectral_tail_fraction(grid.analyze(s.flows.comp_w), grid.size() / 3);
    double viol = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        viol = std::max(viol, s.flows.psi[i] - s.flows.phi[i]);
        viol = std::max(viol, s.flows.phi[i] - s.flows.eta[i]);
    }
    m.flow_order_violation = viol;
    return m;
}

Trajectory evolve_until(const StateField& data, const Params& params, const SolverConfig& cfg,
                        const StopRule& extra_stop) {
    SpectralGrid grid(params.n_grid);
    if (data.size() != params.n_grid)
        throw std::invalid_argument("evolve_until: data size does not match params.n_grid");

    Trajectory traj;
    traj.params = params;
    traj.burgers = cfg.burgers;
    traj.t0 = data.t;

    const int kd = params.n_grid / 3;
    SolverState s;
    s.state = data;
    s.state.w = grid.truncated(data.w, kd);
    s.state.z = grid.truncated(data.z, kd);
    s.state.k = grid.truncated(data.k, kd);
    s.state.a = grid.truncated(data.a, kd);
    s.flows = FlowState::identity(grid, s.state, cfg.burgers);
    traj.initial = s.state;

    // envelope reference values from the data
    double min_c0 = 1e300, max_c0 = -1e300, min_w0 = 1e300, max_w0 = -1e300;
    for (int i = 0; i < grid.size(); ++i) {
        double c = s.state.sound_speed(i);
        min_c0 = std::min(min_c0, c);
        max_c0 = std::max(max_c0, c);
        min_w0 = std::min(min_w0, s.state.w[i]);
        max_w0 = std::max(max_w0, s.state.w[i]);
    }
    const double norm_k0x = max_abs(grid.derivative(s.state.k));
    const double norm_a0 = max_abs(s.state.a);
    const double norm_z0 = max_abs(s.state.z);
    const double slack = cfg.envelope_slack;
    const double eps = params.eps;

    const double t_cap = (cfg.t_cap != 0.0) ? cfg.t_cap
                         : (cfg.burgers ? data.t + 10.0 : data.t + 4.0 * eps);
    const double snap_interval = (cfg.snap_interval != 0.0)
                                     ? cfg.snap_interval
                                     : (cfg.burgers ? 0.05 : eps / 30.0);

    double last_snap_t = -1e300;
    double prev_min_eta = 0.0, prev_dt = 0.0;

    for (int nstep = 0;; ++nstep) {
        MonitorRow m = monitor_state(grid, s, cfg);

        bool stop = false;
        StopInfo info;
        info.t = s.state.t;
        info.steps = nstep;
        if (m.min_eta_x <= cfg.stop_eta_x) {
            stop = true;
            info.reason = StopReason::MinEtaX;
        } else if (m.spectral_tail > cfg.resolution_tail) {
            stop = true;
            info.reason = StopReason::Resolution;
            info.detail = "spectral tail " + std::to_string(m.spectral_tail);
        } else if (s.state.t >= t_cap - 1e-14) {
            stop = true;
            info.reason = StopReason::TimeCap;
        } else if (extra_stop && extra_stop(m)) {
            stop = true;
            info.reason = StopReason::Custom;
        } else if (!cfg.burgers && cfg.check_envelopes) {
            std::string breach;
            if (m.min_c < min_c0 / slack || m.min_c > max_c0 * slack) breach = "c-order-one";
            if (m.norm_kx > slack * (norm_k0x + 1e-12) + 1e-12) breach = "k-gradient";
            double az = max_abs(s.state.a);
            if (az > norm_a0 + slack * eps) breach = "a-sup";
            double zz = max_abs(s.state.z);
            if (zz > norm_z0 + slack * eps) breach = "z-sup";
            if (m.max_eta_x > 4.0 + slack) breach = "eta-x-upper";
            double wmin = 1e300, wmax = -1e300;
            for (double v : s.state.w) {
                wmin = std::min(wmin, v);
                wmax = std::max(wmax, v);
            }
            if (wmin < min_w0 / slack || wmax > max_w0 * slack) breach = "w-order-one";
            if (!breach.empty()) {
                stop = true;
                info.reason = StopReason::EstimateViolation;
                info.detail = breach;
            }
        }

        // time step from the current state
        double max_l3 = 0.0;
        if (cfg.burgers) {
            max_l3 = max_abs(s.state.w);
        } else {
            for (int i = 0; i < grid.size(); ++i) {
                max_l3 = std::max(max_l3, std::abs(s.state.w[i] + s.state.z[i] / 3.0));
            }
        }
        double grad = m.norm_wx + (cfg.burgers ? 0.0 : m.norm_zx / 3.0);
        double dt = cfg.cfl * grid.dx() / std::max(max_l3, 1e-12);
        if (grad > 0.0) dt = std::min(dt, cfg.grad_limit / grad);
        if (m.min_eta_x < cfg.densify_below && prev_dt > 0.0 && prev_min_eta > m.min_eta_x) {
            double rate = (prev_min_eta - m.min_eta_x) / prev_dt;
            if (rate > 0.0) dt = std::min(dt, cfg.tail_rate_frac * m.min_eta_x / rate);
        }
        if (!cfg.burgers && m.min_eta_x < 0.5) {
            // slow characteristics sweep through the steep sliver of width
            // ~ eps^{3/2} (min eta_x)^{3/2} at relative speed (4/3) c; keep a
            // few stages inside the crossing so transported quantities hold
            // their accuracy through it
            double sliver = std::pow(eps, 1.5) * std::pow(m.min_eta_x, 1.5);
            double gap = (4.0 / 3.0) * std::max(2.0 * max_c0, 1e-6);
            dt = std::min(dt, cfg.cross_frac * sliver / gap);
        }
        dt = std::min(dt, t_cap - s.state.t);
        m.dt = dt;
        traj.monitors.push_back(m);

        const bool dense = m.min_eta_x <= cfg.densify_below;
        if (stop || dense || nstep == 0 || s.state.t - last_snap_t >= snap_interval - 1e-14) {
            traj.snapshots.push_back({s.state, s.flows});
            last_snap_t = s.state.t;
        }
        if (stop) {
            traj.stop = info;
            break;
        }

        prev_min_eta = m.min_eta_x;
        prev_dt = dt;
        step(grid, s, dt, cfg);
    }
    return traj;
}

std::vector<double> compose(const SpectralGrid& grid, std::span<const double> field,
                            std::span<const double> positions) {
    FineInterpolant interp = grid.interpolant(field);
    std::vector<double> out(positions.size());
    interp.eval(positions, out);
    return out;
}

std::vector<double> flow_derivative_closed_form(const Trajectory& traj, int snapshot_index,
                                                FlowFamily which, bool alt_form) {
    const Snapshot& snap = traj.snapshots.at(snapshot_index);
    SpectralGrid grid(traj.params.n_grid);
    const int n = grid.size();
    std::vector<double> out(n);

    if (which == FlowFamily::Psi) {
        std::vector<double> z_psi = compose(grid, snap.state.z, snap.flows.psi);
        FineInterpolant W = grid.interpolant(snap.flows.comp_w);
        for (int i = 0; i < n; ++i) {
            double w_psi = W(snap.flows.g_psi[i]);
            double c_psi = 0.5 * (w_psi - z_psi[i]);
            out[i] = std::sqrt(snap.flows.c0[i] / c_psi) * std::exp(snap.flows.ints.zx_psi[i]);
        }
        return out;
    }
    std::vector<double> z_phi = compose(grid, snap.state.z, snap.flows.phi);
    FineInterpolant W = grid.interpolant(snap.flows.comp_w);
    for (int i = 0; i < n; ++i) {
        double w_phi = W(snap.flows.g_phi[i]);
        double c_phi = 0.5 * (w_phi - z_phi[i]);
        if (alt_form) {
            double ifrak = std::exp((8.0 / 3.0) * snap.flows.ints.a_phi[i]);
            out[i] = snap.flows.c0[i] * snap.flows.c0[i] / (ifrak * ifrak * c_phi * c_phi);
        } else {
            double r = snap.flows.c0[i] / c_phi;
            out[i] = r * r * std::exp(-(16.0 / 3.0) * snap.flows.ints.a_phi[i]);
        }
    }
    return out;
}

double ResidualSeries::max_relative() const {
    double m = 0.0;
    for (double v : relative) m = std::max(m, v);
    return m;
}

double ResidualSeries::max_sup() const {
    double m = 0.0;
    for (double v : sup) m = std::max(m, v);
    return m;
}

std::vector<ResidualSeries> duhamel_residuals(const Trajectory& traj) {
    SpectralGrid grid(traj.params.n_grid);
    const int n = grid.size();
    std::vector<double> w0p = grid.derivative(traj.initial.w);
    std::vector<double> z0p = grid.derivative(traj.initial.z);
    std::vector<double> k0p = grid.derivative(traj.initial.k);
    const std::vector<double>& k0 = traj.initial.k;

    ResidualSeries qw{"duhamel-qw-eta", {}, {}, {}};
    ResidualSeries ex{"duhamel-eta-x", {}, {}, {}};
    ResidualSeries qz{"duhamel-qz-psi", {}, {}, {}};

    for (const Snapshot& snap : traj.snapshots) {
        const FlowState& f = snap.flows;
        std::vector<double> Wx = grid.derivative(f.comp_w);
        std::vector<double> dk_eta = compose(grid, grid.derivative(snap.state.k), f.eta);
        std::vector<double> I = f.integrating_factor();

        double sup1 = 0.0, scale1 = 0.0;
        double sup2 = 0.0, scale2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double c_eta = 0.5 * (f.comp_w[i] - f.comp_z[i]);
            double lhs = Wx[i] - 0.25 * c_eta * dk_eta[i] * f.eta_x[i];
            double rhs = I[i] * ((w0p[i] - 0.25 * f.c0[i] * k0p[i]) * std::exp(-k0[i] / 8.0) +
                                 (1.0 / 12.0) * f.ints.duh_qz[i] - (8.0 / 3.0) * f.ints.duh_wa[i]);
            sup1 = std::max(sup1, std::abs(lhs - rhs));
            scale1 = std::max(scale1, std::abs(lhs));

            double rhs2 = 1.0 + f.ints.qw_eta[i] + 0.25 * f.ints.ck_eta[i] +
                          (1.0 / 3.0) * f.ints.zx_eta[i];
            sup2 = std::max(sup2, std::abs(f.eta_x[i] - rhs2));
            scale2 = std::max(scale2, std::abs(f.eta_x[i]));
        }
        qw.t.push_back(snap.state.t);
        qw.sup.push_back(sup1);
        qw.relative.push_back(sup1 / std::max(scale1, 1e-300));
        ex.t.push_back(snap.state.t);
        ex.sup.push_back(sup2);
        ex.relative.push_back(sup2 / std::max(scale2, 1e-300));

        // q^z along psi
        std::vector<double> dz_psi = compose(grid, grid.derivative(snap.state.z), f.psi);
        std::vector<double> dk_psi = compose(grid, grid.derivative(snap.state.k), f.psi);
        std::vector<double> z_psi = compose(grid, snap.state.z, f.psi);
        FineInterpolant W = grid.interpolant(f.comp_w);
        double sup3 = 0.0, scale3 = 0.0;
        for (int i = 0; i < n; ++i) {
            double w_psi = W(f.g_psi[i]);
            double c_psi = 0.5 * (w_psi - z_psi[i]);
            double psi_x = std::sqrt(f.c0[i] / c_psi) * std::exp(f.ints.zx_psi[i]);
            double lhs = (dz_psi[i] + 0.25 * c_psi * dk_psi[i]) * psi_x;
            double rhs = std::exp(-f.ints.damp_psi[i]) *
                         (z0p[i] + 0.25 * f.c0[i] * k0p[i] - (1.0 / 12.0) * f.ints.duh_qw[i] -
                          (8.0 / 3.0) * f.ints.duh_za[i]);
            sup3 = std::max(sup3, std::abs(lhs - rhs));
            scale3 = std::max(scale3, std::abs(lhs));
        }
        qz.t.push_back(snap.state.t);
        qz.sup.push_back(sup3);
        qz.relative.push_back(sup3 / std::max(scale3, std::max(max_abs(z0p) + max_abs(k0p), 1e-300)));
    }
    return {qw, ex, qz};
}

ResidualSeries transport_residual(const Trajectory& traj) {
    SpectralGrid grid(traj.params.n_grid);
    ResidualSeries r{"transport-k-phi", {}, {}, {}};
    double k0norm = max_abs(traj.initial.k);
    for (const Snapshot& snap : traj.snapshots) {
        std::vector<double> k_phi = compose(grid, snap.state.k, snap.flows.phi);
        double sup = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            sup = std::max(sup, std::abs(k_phi[i] - traj.initial.k[i]));
        }
        r.t.push_back(snap.state.t);
        r.sup.push_back(sup);
        r.relative.push_back(sup / std::max(k0norm, 1e-14));
    }
    return r;
}

}  // namespace preshock
