#include "preshock/runio.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace preshock {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

void write_csv_row(std::ofstream& os, std::span<const double> vals) {
    for (size_t i = 0; i < vals.size(); ++i) {
        if (i) os << ',';
        os << format_double(vals[i]);
    }
    os << '\n';
}

std::vector<std::vector<double>> read_csv(const std::string& path, int expect_cols) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("missing file: " + path);
    std::string line;
    std::getline(is, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t next = line.find(',', pos);
            std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
            double v = 0.0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc()) throw std::runtime_error("bad number in " + path);
            row.push_back(v);
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (expect_cols > 0 && static_cast<int>(row.size()) != expect_cols)
            throw std::runtime_error("bad column count in " + path);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string snap_name(const char* prefix, int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%06d.csv", prefix, idx);
    return buf;
}

json checks_json(const std::vector<ScalingCheck>& checks) {
    json arr = json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
    }
    return arr;
}

json config_json(const RunConfig& cfg) {
    json j;
    for (const auto& [k, v] : cfg.to_kv()) j[k] = v;
    return j;
}

}  // namespace

void write_run_directory(const std::string& dir, const RunConfig& cfg, const Trajectory& traj) {
    fs::create_directories(dir);
    fs::create_directories(dir + "/snapshots");
    fs::create_directories(dir + "/reports");

    json man;
    man["schema"] = "preshock-run-v1";
    man["config"] = config_json(cfg);
    man["burgers"] = traj.burgers;
    man["t0"] = traj.t0;
    man["eps"] = traj.params.eps;
    man["mu"] = traj.params.mu;
    man["n_grid"] = traj.params.n_grid;
    man["alpha"] = traj.params.exponents.alpha;
    man["beta"] = traj.params.exponents.beta;
    man["gamma_exp"] = traj.params.exponents.gamma;
    man["stop"] = {{"reason", to_string(traj.stop.reason)},
                   {"t", traj.stop.t},
                   {"steps", traj.stop.steps},
                   {"detail", traj.stop.detail}};
    man["snapshots"] = traj.snapshots.size();
    std::ofstream(dir + "/manifest.json") << man.dump(2) << '\n';

    {
        std::ofstream os(dir + "/monitors.csv");
        os << "t,dt,min_eta_x,argmin_label,norm_wx,norm_zx,norm_kx,norm_ax,min_c,"
              "max_z_minus_min_w,max_eta_x,spectral_tail,flow_order_violation\n";
        for (const auto& m : traj.monitors) {
            write_csv_row(os, std::vector<double>{m.t, m.dt, m.min_eta_x, m.argmin_label,
                                                  m.norm_wx, m.norm_zx, m.norm_kx, m.norm_ax,
                                                  m.min_c, m.max_z_minus_min_w, m.max_eta_x,
                                                  m.spectral_tail, m.flow_order_violation});
        }
    }

    SpectralGrid grid(traj.params.n_grid);
    for (int si = 0; si < static_cast<int>(traj.snapshots.size()); ++si) {
        const Snapshot& s = traj.snapshots[si];
        {
            std::ofstream os(dir + "/snapshots/" + snap_name("snap", si));
            os << "# t=" << format_double(s.state.t) << '\n';
            os << "theta,w,z,k,a,eta,psi,phi,eta_x\n";
            for (int i = 0; i < grid.size(); ++i) {
                write_csv_row(os, std::vector<double>{grid.nodes()[i], s.state.w[i], s.state.z[i],
                                                      s.state.k[i], s.state.a[i], s.flows.eta[i],
                                                      s.flows.psi[i], s.flows.phi[i],
                                                      s.flows.eta_x[i]});
            }
        }
        {
            std::ofstream os(dir + "/snapshots/" + snap_name("flow", si));
            os << "x,comp_w,comp_z,comp_k,comp_a,g_psi,g_phi,inv_grid,c0,int_a_eta,int_a_phi,"
                  "int_zx_psi,duh_qz,duh_wa,qw_eta,ck_eta,zx_eta,damp_psi,duh_qw,duh_za,vort,"
                  "abswx_phi\n";
            const FlowIntegrals& I = s.flows.ints;
            for (int i = 0; i < grid.size(); ++i) {
                write_csv_row(
                    os, std::vector<double>{grid.nodes()[i], s.flows.comp_w[i], s.flows.comp_z[i],
                                            s.flows.comp_k[i], s.flows.comp_a[i], s.flows.g_psi[i],
                                            s.flows.g_phi[i], s.flows.inv_grid[i], s.flows.c0[i],
                                            I.a_eta[i], I.a_phi[i], I.zx_psi[i], I.duh_qz[i],
                                            I.duh_wa[i], I.qw_eta[i], I.ck_eta[i], I.zx_eta[i],
                                            I.damp_psi[i], I.duh_qw[i], I.duh_za[i], I.vort[i],
                                            I.abswx_phi[i]});
            }
        }
    }
}

Trajectory load_run_directory(const std::string& dir, RunConfig* cfg_out) {
    std::ifstream mf(dir + "/manifest.json");
    if (!mf) throw std::runtime_error("load_run_directory: missing manifest.json in " + dir);
    json man;
    mf >> man;
    if (man.value("schema", "") != std::string("preshock-run-v1"))
        throw std::runtime_error("load_run_directory: unknown schema");

    Trajectory traj;
    traj.burgers = man.at("burgers").get<bool>();
    traj.t0 = man.at("t0").get<double>();
    traj.params.eps = man.at("eps").get<double>();
    traj.params.mu = man.at("mu").get<double>();
    traj.params.n_grid = man.at("n_grid").get<int>();
    traj.params.exponents.alpha = man.at("alpha").get<std::array<double, 6>>();
    traj.params.exponents.beta = man.at("beta").get<std::array<double, 6>>();
    traj.params.exponents.gamma = man.at("gamma_exp").get<std::array<double, 6>>();
    std::string reason = man.at("stop").at("reason").get<std::string>();
    for (StopReason r : {StopReason::MinEtaX, StopReason::Resolution, StopReason::TimeCap,
                         StopReason::EstimateViolation, StopReason::Custom}) {
        if (reason == to_string(r)) traj.stop.reason = r;
    }
    traj.stop.t = man.at("stop").at("t").get<double>();
    traj.stop.steps = man.at("stop").at("steps").get<int>();
    traj.stop.detail = man.at("stop").at("detail").get<std::string>();

    if (cfg_out) {
        auto kv = man.at("config").get<std::map<std::string, std::string>>();
        for (const auto& [k, v] : kv) apply_kv(*cfg_out, k, v);
    }

    for (const auto& m : read_csv(dir + "/monitors.csv", 13)) {
        MonitorRow r;
        r.t = m[0];
        r.dt = m[1];
        r.min_eta_x = m[2];
        r.argmin_label = m[3];
        r.norm_wx = m[4];
        r.norm_zx = m[5];
        r.norm_kx = m[6];
        r.norm_ax = m[7];
        r.min_c = m[8];
        r.max_z_minus_min_w = m[9];
        r.max_eta_x = m[10];
        r.spectral_tail = m[11];
        r.flow_order_violation = m[12];
        traj.monitors.push_back(r);
    }

    const int ns = man.at("snapshots").get<int>();
    const int n = traj.params.n_grid;
    for (int si = 0; si < ns; ++si) {
        std::string spath = dir + "/snapshots/" + snap_name("snap", si);
        std::ifstream head(spath);
        std::string tline;
        std::getline(head, tline);  // "# t=..."
        double t = std::stod(tline.substr(tline.find('=') + 1));
        head.close();
        // the state CSV has one comment line then the header; strip the comment
        std::ifstream is(spath);
        std::stringstream buf;
        std::getline(is, tline);  // drop comment
        buf << is.rdbuf();
        std::string tmp = dir + "/snapshots/.tmp.csv";
        std::ofstream(tmp) << buf.str();
        auto rows = read_csv(tmp, 9);
        fs::remove(tmp);
        if (static_cast<int>(rows.size()) != n)
            throw std::runtime_error("snapshot row count mismatch in " + spath);
        Snapshot s;
        s.state.t = t;
        s.state.w.resize(n);
        s.state.z.resize(n);
        s.state.k.resize(n);
        s.state.a.resize(n);
        s.flows.eta.resize(n);
        s.flows.psi.resize(n);
        s.flows.phi.resize(n);
        s.flows.eta_x.resize(n);
        for (int i = 0; i < n; ++i) {
            s.state.w[i] = rows[i][1];
            s.state.z[i] = rows[i][2];
            s.state.k[i] = rows[i][3];
            s.state.a[i] = rows[i][4];
            s.flows.eta[i] = rows[i][5];
            s.flows.psi[i] = rows[i][6];
            s.flows.phi[i] = rows[i][7];
            s.flows.eta_x[i] = rows[i][8];
        }
        auto frows = read_csv(dir + "/snapshots/" + snap_name("flow", si), 22);
        if (static_cast<int>(frows.size()) != n)
            throw std::runtime_error("flow snapshot row count mismatch");
        s.flows.comp_w.resize(n);
        s.flows.comp_z.resize(n);
        s.flows.comp_k.resize(n);
        s.flows.comp_a.resize(n);
        s.flows.g_psi.resize(n);
        s.flows.g_phi.resize(n);
        s.flows.inv_grid.resize(n);
        s.flows.c0.resize(n);
        s.flows.ints.resize(n);
        FlowIntegrals& I = s.flows.ints;
        for (int i = 0; i < n; ++i) {
            const auto& r = frows[i];
            s.flows.comp_w[i] = r[1];
            s.flows.comp_z[i] = r[2];
            s.flows.comp_k[i] = r[3];
            s.flows.comp_a[i] = r[4];
            s.flows.g_psi[i] = r[5];
            s.flows.g_phi[i] = r[6];
            s.flows.inv_grid[i] = r[7];
            s.flows.c0[i] = r[8];
            I.a_eta[i] = r[9];
            I.a_phi[i] = r[10];
            I.zx_psi[i] = r[11];
            I.duh_qz[i] = r[12];
            I.duh_wa[i] = r[13];
            I.qw_eta[i] = r[14];
            I.ck_eta[i] = r[15];
            I.zx_eta[i] = r[16];
            I.damp_psi[i] = r[17];
            I.duh_qw[i] = r[18];
            I.duh_za[i] = r[19];
            I.vort[i] = r[20];
            I.abswx_phi[i] = r[21];
        }
        traj.snapshots.push_back(std::move(s));
    }
    if (!traj.snapshots.empty()) traj.initial = traj.snapshots.front().state;
    return traj;
}

void write_blowup_report(const std::string& path, const RunConfig& cfg, const BlowupReport& rep,
                         const EtaXStructure* structure) {
    json j;
    j["schema"] = "preshock-blowup-v1";
    j["config"] = config_json(cfg);
    j["t_star"] = rep.t_star;
    j["x_star"] = rep.x_star;
    j["xi_star"] = rep.xi_star;
    j["t_stop"] = rep.t_stop;
    j["min_eta_x_stop"] = rep.min_eta_x_stop;
    j["fit"] = {{"slope", rep.fit.slope},
                {"intercept", rep.fit.intercept},
                {"residual", rep.fit.residual}};
    j["uniqueness_margin"] = rep.uniqueness_margin;
    j["eta_xx_at_star"] = rep.eta_xx_at_star;
    j["checks"] = checks_json(rep.checks);
    j["pass"] = rep.pass();
    if (structure) {
        j["eta_x_structure"] = {{"lower_c", structure->lower_c},
                                {"upper_C", structure->upper_C},
                                {"annulus_margin", structure->annulus_margin},
                                {"eta_xx_rate_A", structure->eta_xx_rate_A},
                                {"pass", structure->pass()}};
    }
    std::ofstream(path) << j.dump(2) << '\n';
}

void write_cusp_report(const std::string& path, const RunConfig& cfg, const CuspExpansion& cusp,
                       const HolderFit* holder) {
    json j;
    j["schema"] = "preshock-cusp-v1";
    j["config"] = config_json(cfg);
    j["a3"] = cusp.a3;
    j["a4"] = cusp.a4;
    j["window_theta"] = cusp.window_theta;
    for (const auto& [name, B] : cusp.taylor) j["taylor"][name] = B;
    for (const auto& [name, A] : cusp.frac) j["fractional"][name] = A;
    j["checks"] = checks_json(cusp.checks);
    if (holder) {
        j["holder_w"] = {{"exponent", holder->exponent},
                         {"left", holder->exponent_left},
                         {"right", holder->exponent_right}};
    }
    std::ofstream(path) << j.dump(2) << '\n';
}

void write_envelope_report(const std::string& path, const RunConfig& cfg,
                           const EnvelopeReport& rep) {
    json j;
    j["schema"] = "preshock-envelopes-v1";
    j["config"] = config_json(cfg);
    json arr = json::array();
    for (const auto& c : rep.checks) {
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"worst", c.worst},
                       {"bound", c.bound},
                       {"margin", c.margin}});
    }
    j["checks"] = arr;
    j["pass"] = rep.pass();
    std::ofstream(path) << j.dump(2) << '\n';
}

void write_residual_report(const std::string& path, const RunConfig& cfg,
                           const std::vector<ResidualSeries>& duhamel,
                           const std::vector<IdentityResidual>& identities) {
    json j;
    j["schema"] = "preshock-residuals-v1";
    j["config"] = config_json(cfg);
    json arr = json::array();
    for (const auto& r : duhamel) {
        arr.push_back({{"name", r.name}, {"max_relative", r.max_relative()}});
    }
    j["duhamel"] = arr;
    json arr2 = json::array();
    for (const auto& r : identities) {
        arr2.push_back(
            {{"name", r.name}, {"max_sup", r.max_sup()}, {"max_relative", r.max_relative}});
    }
    j["identities"] = arr2;
    std::ofstream(path) << j.dump(2) << '\n';
}

void write_error_profiles(const std::string& dir, const std::vector<ErrorProfile>& profiles) {
    fs::create_directories(dir);
    for (const auto& p : profiles) {
        std::ofstream os(dir + "/cusp_profile_" + p.field + ".csv");
        os << "theta_offset,data,series,normalized_remainder\n";
        for (size_t i = 0; i < p.theta.size(); ++i) {
            write_csv_row(os, std::vector<double>{p.theta[i], p.data[i], p.series[i],
                                                  p.normalized[i]});
        }
    }
}

}  // namespace preshock
