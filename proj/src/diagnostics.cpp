#include "preshock/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "preshock/euler.hpp"

namespace preshock {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
    // Fornberg's recursion for derivative weights on arbitrary nodes.
    const int n = static_cast<int>(nodes.size());
    if (order >= n) throw std::invalid_argument("fd_weights: need more nodes than the order");
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][order];
    return w;
}

double IdentityResidual::max_sup() const {
    double m = 0.0;
    for (double v : sup) m = std::max(m, v);
    return m;
}

namespace {

struct SnapshotFields {
    // per-snapshot composed quantities on the label grid
    std::vector<double> lhs;  // quantity whose time derivative is taken
    std::vector<double> rhs;  // spectral right side at this snapshot
};

using FieldBuilder = std::function<SnapshotFields(const SpectralGrid&, const Snapshot&)>;

IdentityResidual evaluate_identity(const std::string& name, const Trajectory& traj,
                                   const FieldBuilder& build) {
    SpectralGrid grid(traj.params.n_grid);
    const int ns = static_cast<int>(traj.snapshots.size());
    if (ns < 5)
        throw std::runtime_error("appendix identities: insufficient snapshot cadence (need >= 5)");
    const int n = grid.size();

    std::vector<SnapshotFields> F(ns);
    for (int j = 0; j < ns; ++j) F[j] = build(grid, traj.snapshots[j]);

    IdentityResidual out;
    out.name = name;
    double rhs_scale = 0.0;
    for (int j = 2; j < ns - 2; ++j) {
        double tj = traj.snapshots[j].state.t;
        double nodes[5];
        for (int m = 0; m < 5; ++m) nodes[m] = traj.snapshots[j - 2 + m].state.t;
        std::vector<double> wts = fd_weights(tj, std::span<const double>(nodes, 5), 1);
        double sup = 0.0;
        for (int i = 0; i < n; ++i) {
            double ddt = 0.0;
            for (int m = 0; m < 5; ++m) ddt += wts[m] * F[j - 2 + m].lhs[i];
            double resid = -1.5 * ddt - F[j].rhs[i];
            sup = std::max(sup, std::abs(resid));
            rhs_scale = std::max(rhs_scale, std::abs(F[j].rhs[i]));
        }
        out.t.push_back(tj);
        out.sup.push_back(sup);
    }
    out.max_relative = out.max_sup() / std::max(rhs_scale, 1e-14);
    return out;
}

// label-route theta-derivatives of w at the psi/phi positions
struct WAlongFlow {
    std::vector<double> dw;   // (d_theta w) at the flow positions
    std::vector<double> d2w;  // second derivative variant
};

WAlongFlow w_derivs_at(const SpectralGrid& grid, const Snapshot& s,
                       const std::vector<double>& g, bool second) {
    WAlongFlow out;
    const int n = grid.size();
    std::vector<double> Wx = grid.derivative(s.flows.comp_w);
    FineInterpolant TWx = grid.interpolant(Wx);
    FineInterpolant Tex = grid.interpolant(s.flows.eta_x);
    out.dw.resize(n);
    for (int i = 0; i < n; ++i) out.dw[i] = TWx(g[i]) / Tex(g[i]);
    if (second) {
        FineInterpolant TWxx = grid.interpolant(grid.derivative(Wx));
        FineInterpolant Texx = grid.interpolant(grid.derivative(s.flows.eta_x));
        out.d2w.resize(n);
        for (int i = 0; i < n; ++i) {
            double ex = Tex(g[i]);
            out.d2w[i] = (TWxx(g[i]) * ex - TWx(g[i]) * Texx(g[i])) / (ex * ex * ex);
        }
    }
    return out;
}

std::vector<double> at(const SpectralGrid& grid, std::span<const double> field,
                       std::span<const double> pos) {
    FineInterpolant t = grid.interpolant(field);
    std::vector<double> out(pos.size());
    t.eval(pos, out);
    return out;
}

}  // namespace

std::vector<IdentityResidual> appendix_identity_residuals(const Trajectory& traj, bool full_set) {
    std::vector<IdentityResidual> out;
    auto c_of = [](double w, double z) { return 0.5 * (w - z); };

    // c along psi: -(3/2) d/dt (c.psi) = ((dw + 4a) c).psi
    out.push_back(evaluate_identity("c-psi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_psi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_psi[i] = TW(s.flows.g_psi[i]);
        std::vector<double> z_psi = at(g, s.state.z, s.flows.psi);
        std::vector<double> a_psi = at(g, s.state.a, s.flows.psi);
        WAlongFlow wd = w_derivs_at(g, s, s.flows.g_psi, false);
        f.lhs.resize(n);
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(w_psi[i], z_psi[i]);
            f.lhs[i] = c;
            f.rhs[i] = (wd.dw[i] + 4.0 * a_psi[i]) * c;
        }
        return f;
    }));

    // k along psi: -(3/2) d/dt (k.psi) = (c dk).psi
    out.push_back(evaluate_identity("k-psi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_psi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_psi[i] = TW(s.flows.g_psi[i]);
        std::vector<double> z_psi = at(g, s.state.z, s.flows.psi);
        std::vector<double> k_psi = at(g, s.state.k, s.flows.psi);
        std::vector<double> dk_psi = at(g, g.derivative(s.state.k), s.flows.psi);
        f.lhs = k_psi;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) f.rhs[i] = c_of(w_psi[i], z_psi[i]) * dk_psi[i];
        return f;
    }));

    // c along phi: -(3/2) d/dt (c.phi) = (c (4a + dc + dz)).phi
    out.push_back(evaluate_identity("c-phi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_phi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_phi[i] = TW(s.flows.g_phi[i]);
        std::vector<double> z_phi = at(g, s.state.z, s.flows.phi);
        std::vector<double> a_phi = at(g, s.state.a, s.flows.phi);
        std::vector<double> dz_phi = at(g, g.derivative(s.state.z), s.flows.phi);
        WAlongFlow wd = w_derivs_at(g, s, s.flows.g_phi, false);
        f.lhs.resize(n);
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(w_phi[i], z_phi[i]);
            double dc = 0.5 * (wd.dw[i] - dz_phi[i]);
            f.lhs[i] = c;
            f.rhs[i] = c * (4.0 * a_phi[i] + dc + dz_phi[i]);
        }
        return f;
    }));

    // c along eta: -(3/2) d/dt (c.eta) = ((dz + 4a) c).eta
    out.push_back(evaluate_identity("c-eta", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> dz_eta = at(g, g.derivative(s.state.z), s.flows.eta);
        f.lhs.resize(n);
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(s.flows.comp_w[i], s.flows.comp_z[i]);
            f.lhs[i] = c;
            f.rhs[i] = (dz_eta[i] + 4.0 * s.flows.comp_a[i]) * c;
        }
        return f;
    }));

    // k along eta: -(3/2) d/dt (k.eta) = -(c dk).eta
    out.push_back(evaluate_identity("k-eta", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> dk_eta = at(g, g.derivative(s.state.k), s.flows.eta);
        f.lhs = s.flows.comp_k;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(s.flows.comp_w[i], s.flows.comp_z[i]);
            f.rhs[i] = -c * dk_eta[i];
        }
        return f;
    }));

    if (!full_set) return out;

    // z along psi: -(3/2) d/dt (z.psi) = (4az - (1/4) c^2 dk).psi
    out.push_back(evaluate_identity("z-psi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_psi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_psi[i] = TW(s.flows.g_psi[i]);
        std::vector<double> z_psi = at(g, s.state.z, s.flows.psi);
        std::vector<double> a_psi = at(g, s.state.a, s.flows.psi);
        std::vector<double> dk_psi = at(g, g.derivative(s.state.k), s.flows.psi);
        f.lhs = z_psi;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(w_psi[i], z_psi[i]);
            f.rhs[i] = 4.0 * a_psi[i] * z_psi[i] - 0.25 * c * c * dk_psi[i];
        }
        return f;
    }));

    // a along psi: -(3/2) d/dt (a.psi) = (da c + 2a^2 - c^2 - 4cz - 2z^2).psi
    out.push_back(evaluate_identity("a-psi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_psi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_psi[i] = TW(s.flows.g_psi[i]);
        std::vector<double> z_psi = at(g, s.state.z, s.flows.psi);
        std::vector<double> a_psi = at(g, s.state.a, s.flows.psi);
        std::vector<double> da_psi = at(g, g.derivative(s.state.a), s.flows.psi);
        f.lhs = a_psi;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(w_psi[i], z_psi[i]);
            double z = z_psi[i], a = a_psi[i];
            f.rhs[i] = da_psi[i] * c + 2.0 * a * a - c * c - 4.0 * c * z - 2.0 * z * z;
        }
        return f;
    }));

    // dk along phi: -(3/2) d/dt (dk.phi) = (dk dw + dk dz).phi
    out.push_back(evaluate_identity("kx-phi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> dk_phi = at(g, g.derivative(s.state.k), s.flows.phi);
        std::vector<double> dz_phi = at(g, g.derivative(s.state.z), s.flows.phi);
        WAlongFlow wd = w_derivs_at(g, s, s.flows.g_phi, false);
        f.lhs = dk_phi;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) f.rhs[i] = dk_phi[i] * (wd.dw[i] + dz_phi[i]);
        return f;
    }));

    // dk along eta: -(3/2) d/dt (dk.eta) = (dw dk + dz dk - c d2k).eta
    out.push_back(evaluate_identity("kx-eta", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> kx = g.derivative(s.state.k);
        std::vector<double> dk_eta = at(g, kx, s.flows.eta);
        std::vector<double> d2k_eta = at(g, g.derivative(kx), s.flows.eta);
        std::vector<double> dz_eta = at(g, g.derivative(s.state.z), s.flows.eta);
        std::vector<double> Wx = g.derivative(s.flows.comp_w);
        f.lhs = dk_eta;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(s.flows.comp_w[i], s.flows.comp_z[i]);
            double dw = Wx[i] / s.flows.eta_x[i];
            f.rhs[i] = dw * dk_eta[i] + dz_eta[i] * dk_eta[i] - c * d2k_eta[i];
        }
        return f;
    }));

    // dz along psi
    out.push_back(evaluate_identity("zx-psi", traj, [&](const SpectralGrid& g, const Snapshot& s) {
        SnapshotFields f;
        const int n = g.size();
        std::vector<double> w_psi(n);
        FineInterpolant TW = g.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) w_psi[i] = TW(s.flows.g_psi[i]);
        std::vector<double> z_psi = at(g, s.state.z, s.flows.psi);
        std::vector<double> a_psi = at(g, s.state.a, s.flows.psi);
        std::vector<double> zx = g.derivative(s.state.z);
        std::vector<double> kx = g.derivative(s.state.k);
        std::vector<double> dz_psi = at(g, zx, s.flows.psi);
        std::vector<double> dk_psi = at(g, kx, s.flows.psi);
        std::vector<double> d2k_psi = at(g, g.derivative(kx), s.flows.psi);
        std::vector<double> da_psi = at(g, g.derivative(s.state.a), s.flows.psi);
        WAlongFlow wd = w_derivs_at(g, s, s.flows.g_psi, false);
        f.lhs = dz_psi;
        f.rhs.resize(n);
        for (int i = 0; i < n; ++i) {
            double c = c_of(w_psi[i], z_psi[i]);
            double dc = 0.5 * (wd.dw[i] - dz_psi[i]);
            f.rhs[i] = 0.5 * wd.dw[i] * dz_psi[i] + 1.5 * dz_psi[i] * dz_psi[i] -
                       0.5 * c * dc * dk_psi[i] - 0.25 * c * c * d2k_psi[i] +
                       4.0 * (da_psi[i] * z_psi[i] + a_psi[i] * dz_psi[i]);
        }
        return f;
    }));

    return out;
}

std::vector<IdentityResidual> vorticity_checks(const Trajectory& traj) {
    SpectralGrid grid(traj.params.n_grid);
    const int n = grid.size();
    std::vector<IdentityResidual> out;

    // evolution along phi, by time differencing
    out.push_back(
        evaluate_identity("vorticity-evolution-phi", traj,
                          [&](const SpectralGrid& g, const Snapshot& s) {
                              SnapshotFields f;
                              std::vector<double> vort = specific_vorticity(g, s.state);
                              std::vector<double> v_phi = at(g, vort, s.flows.phi);
                              std::vector<double> a_phi = at(g, s.state.a, s.flows.phi);
                              std::vector<double> k_phi = at(g, s.state.k, s.flows.phi);
                              std::vector<double> dk_phi =
                                  at(g, g.derivative(s.state.k), s.flows.phi);
                              f.lhs = v_phi;
                              f.rhs.resize(g.size());
                              for (int i = 0; i < g.size(); ++i) {
                                  // -(3/2) d/dt form of the transport identity
                                  f.rhs[i] = -1.5 * ((8.0 / 3.0) * a_phi[i] * v_phi[i] +
                                                     (4.0 / 3.0) * std::exp(k_phi[i]) * dk_phi[i]);
                              }
                              return f;
                          }));
    // that builder returned rhs already scaled for the -(3/2) d/dt convention;
    // undo the convention so the residual is d/dt(vort.phi) - rhs directly
    // (evaluate_identity computes -(3/2) ddt - rhs; with rhs = -(3/2) R this
    // equals -(3/2)(ddt - R), a fixed multiple, so the convergence content is
    // identical and only the reported scale differs by 3/2).

    // integral representation
    {
        IdentityResidual r;
        r.name = "vorticity-duhamel";
        std::vector<double> vort0 = specific_vorticity(grid, traj.initial);
        std::vector<double> k0p = grid.derivative(traj.initial.k);
        double scale = 0.0;
        for (const Snapshot& s : traj.snapshots) {
            std::vector<double> vort = specific_vorticity(grid, s.state);
            std::vector<double> v_phi = at(grid, vort, s.flows.phi);
            std::vector<double> ifrak = s.flows.ifrak();
            double sup = 0.0;
            for (int i = 0; i < n; ++i) {
                double c0 = s.flows.c0[i];
                double rhs = vort0[i] * ifrak[i] +
                             (4.0 / 3.0) / (c0 * c0) * k0p[i] * std::exp(traj.initial.k[i]) *
                                 ifrak[i] * s.flows.ints.vort[i];
                sup = std::max(sup, std::abs(v_phi[i] - rhs));
                scale = std::max(scale, std::abs(rhs));
            }
            r.t.push_back(s.state.t);
            r.sup.push_back(sup);
        }
        r.max_relative = r.max_sup() / std::max(scale, 1e-14);
        out.push_back(std::move(r));
    }
    return out;
}

bool EnvelopeReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string EnvelopeReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " worst=" << c.worst
           << " bound=" << c.bound << "\n";
    }
    return os.str();
}

EnvelopeReport estimate_envelopes(const Trajectory& traj, const Params& params, double slack) {
    SpectralGrid grid(params.n_grid);
    const int n = grid.size();
    const double eps = traj.burgers ? 1.0 : params.eps;
    EnvelopeReport rep;

    double min_w0 = 1e300, max_w0 = -1e300, min_c0 = 1e300, max_c0 = -1e300;
    for (int i = 0; i < n; ++i) {
        min_w0 = std::min(min_w0, traj.initial.w[i]);
        max_w0 = std::max(max_w0, traj.initial.w[i]);
        double c = traj.initial.sound_speed(i);
        min_c0 = std::min(min_c0, c);
        max_c0 = std::max(max_c0, c);
    }
    std::vector<double> z0p = grid.derivative(traj.initial.z);
    std::vector<double> k0p = grid.derivative(traj.initial.k);
    double qz0 = 0.0;
    for (int i = 0; i < n; ++i) {
        qz0 = std::max(qz0, std::abs(z0p[i] + 0.25 * traj.initial.sound_speed(i) * k0p[i]));
    }

    double w_lo = 1e300, w_hi = -1e300, c_lo = 1e300, c_hi = -1e300;
    double psix_lo = 1e300, psix_hi = -1e300, phix_lo = 1e300, phix_hi = -1e300;
    double etax_hi = -1e300, qw_hi = 0.0, qz_hi = 0.0, lem_int = 0.0;
    for (int si = 0; si < static_cast<int>(traj.snapshots.size()); ++si) {
        const Snapshot& s = traj.snapshots[si];
        for (int i = 0; i < n; ++i) {
            w_lo = std::min(w_lo, s.state.w[i]);
            w_hi = std::max(w_hi, s.state.w[i]);
            double c = s.state.sound_speed(i);
            c_lo = std::min(c_lo, c);
            c_hi = std::max(c_hi, c);
            etax_hi = std::max(etax_hi, s.flows.eta_x[i]);
        }
        std::vector<double> psix = flow_derivative_closed_form(traj, si, FlowFamily::Psi);
        std::vector<double> phix = flow_derivative_closed_form(traj, si, FlowFamily::Phi);
        for (int i = 0; i < n; ++i) {
            psix_lo = std::min(psix_lo, psix[i]);
            psix_hi = std::max(psix_hi, psix[i]);
            phix_lo = std::min(phix_lo, phix[i]);
            phix_hi = std::max(phix_hi, phix[i]);
        }
        std::vector<double> Wx = grid.derivative(s.flows.comp_w);
        std::vector<double> dk_eta = at(grid, grid.derivative(s.state.k), s.flows.eta);
        std::vector<double> dz_psi = at(grid, grid.derivative(s.state.z), s.flows.psi);
        std::vector<double> dk_psi = at(grid, grid.derivative(s.state.k), s.flows.psi);
        std::vector<double> z_psi = at(grid, s.state.z, s.flows.psi);
        FineInterpolant TW = grid.interpolant(s.flows.comp_w);
        for (int i = 0; i < n; ++i) {
            double c_eta = 0.5 * (s.flows.comp_w[i] - s.flows.comp_z[i]);
            qw_hi = std::max(qw_hi, std::abs(Wx[i] - 0.25 * c_eta * dk_eta[i] * s.flows.eta_x[i]));
            double c_psi = 0.5 * (TW(s.flows.g_psi[i]) - z_psi[i]);
            qz_hi = std::max(qz_hi, std::abs(dz_psi[i] + 0.25 * c_psi * dk_psi[i]));
            double elapsed = (s.state.t - traj.t0) + eps;
            double bound_here = 3.0 * slack * elapsed / eps;
            lem_int = std::max(lem_int, s.flows.ints.abswx_phi[i] / bound_here);
        }
    }

    auto push = [&](const std::string& name, double worst, double bound, bool below = true) {
        EnvelopeCheck c;
        c.name = name;
        c.worst = worst;
        c.bound = bound;
        c.pass = below ? (worst <= bound) : (worst >= bound);
        c.margin = below ? (bound - worst) : (worst - bound);
        rep.checks.push_back(c);
    };
    push("w-upper", w_hi, slack * max_w0);
    push("w-lower", w_lo, min_w0 / slack, false);
    push("c-upper", c_hi, slack * max_c0);
    push("c-lower", c_lo, min_c0 / slack, false);
    push("psi-x-upper", psix_hi, slack);
    push("psi-x-lower", psix_lo, 1.0 / slack, false);
    push("phi-x-upper", phix_hi, slack);
    push("phi-x-lower", phix_lo, 1.0 / slack, false);
    push("eta-x-upper", etax_hi, 4.0 + slack);
    push("qw-eta-weighted", qw_hi, 2.0 / eps * (1.0 + slack));
    push("qz-psi", qz_hi, slack * (qz0 + eps));
    push("lemma-integral-dw-phi", lem_int, 1.0);
    return rep;
}

}  // namespace preshock
