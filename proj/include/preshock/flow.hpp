#pragma once

#include <string>
#include <vector>

#include "preshock/fields.hpp"
#include "preshock/grid.hpp"

namespace preshock {

/// Quadrature accumulators carried per label, advanced inside the RK stages
/// at the same order as the stepper.
struct FlowIntegrals {
    std::vector<double> a_eta;      // int a.eta            (exponent of I_t)
    std::vector<double> a_phi;      // int a.phi            (exponent of Ifrak, phi_x)
    std::vector<double> zx_psi;     // int (dz - 4/3 a).psi  (exponent of psi_x)
    std::vector<double> duh_qz;     // int I^-1 eta_x (c dk q^z).eta
    std::vector<double> duh_wa;     // int I^-1 eta_x (w da).eta
    std::vector<double> qw_eta;     // int eta_x q^w.eta
    std::vector<double> ck_eta;     // int eta_x (c dk).eta
    std::vector<double> zx_eta;     // int eta_x dz.eta
    std::vector<double> damp_psi;   // int ((8/3)a + (1/12) c dk).psi
    std::vector<double> duh_qw;     // int e^{damp} psi_x (c dk q^w).psi
    std::vector<double> duh_za;     // int e^{damp} psi_x (z da).psi
    std::vector<double> vort;       // int Ifrak (c^2.phi)
    std::vector<double> abswx_phi;  // int |dw.phi|

    void resize(int n);
    template <class F>
    void for_each(F&& f) {
        f(a_eta); f(a_phi); f(zx_psi); f(duh_qz); f(duh_wa); f(qw_eta); f(ck_eta);
        f(zx_eta); f(damp_psi); f(duh_qw); f(duh_za); f(vort); f(abswx_phi);
    }
    template <class F>
    void for_each_with(FlowIntegrals& o, F&& f) {
        f(a_eta, o.a_eta); f(a_phi, o.a_phi); f(zx_psi, o.zx_psi); f(duh_qz, o.duh_qz);
        f(duh_wa, o.duh_wa); f(qw_eta, o.qw_eta); f(ck_eta, o.ck_eta); f(zx_eta, o.zx_eta);
        f(damp_psi, o.damp_psi); f(duh_qw, o.duh_qw); f(duh_za, o.duh_za); f(vort, o.vort);
        f(abswx_phi, o.abswx_phi);
    }
};

/// The three characteristic flow maps on the label grid, the stretching
/// eta_x, the composed fields carried along eta, and the inverse-map
/// caches for eta^-1 at the psi/phi positions.
struct FlowState {
    std::vector<double> eta, psi, phi;  // universal-cover values, label grid
    std::vector<double> eta_x;
    std::vector<double> comp_w, comp_z, comp_k, comp_a;  // (w,z,k,a) along eta
    std::vector<double> g_psi, g_phi;                    // eta^-1 at psi/phi positions
    std::vector<double> inv_grid;                        // eta^-1 at the grid nodes
    std::vector<double> c0;                              // initial sound speed per label
    FlowIntegrals ints;

    int size() const { return static_cast<int>(eta.size()); }

    /// I_t = exp(k.eta/8 - (8/3) int a.eta)
    std::vector<double> integrating_factor() const;
    /// Ifrak_t = exp((8/3) int a.phi)
    std::vector<double> ifrak() const;

    static FlowState identity(const SpectralGrid& grid, const StateField& data, bool burgers);
};

struct MonitorRow {
    double t = 0.0;
    double dt = 0.0;
    double min_eta_x = 0.0;
    double argmin_label = 0.0;  // parabola-refined argmin of eta_x
    double norm_wx = 0.0, norm_zx = 0.0, norm_kx = 0.0, norm_ax = 0.0;
    double min_c = 0.0;
    double max_z_minus_min_w = 0.0;
    double max_eta_x = 0.0;
    double spectral_tail = 0.0;  // label-side (or Eulerian u in Burgers mode)
    double flow_order_violation = 0.0;  // max(psi-phi, phi-eta) displacement gap
};

struct Snapshot {
    StateField state;
    FlowState flows;
};

enum class StopReason { MinEtaX, Resolution, TimeCap, EstimateViolation, Custom };

struct StopInfo {
    StopReason reason = StopReason::TimeCap;
    double t = 0.0;
    int steps = 0;
    std::string detail;
};

struct Trajectory {
    Params params;
    bool burgers = false;
    double t0 = 0.0;
    StateField initial;
    std::vector<Snapshot> snapshots;
    std::vector<MonitorRow> monitors;
    StopInfo stop;

    const Snapshot& last() const { return snapshots.back(); }
};

const char* to_string(StopReason r);

}  // namespace preshock
