#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "preshock/analysis.hpp"
#include "preshock/config.hpp"
#include "preshock/diagnostics.hpp"
#include "preshock/initial_data.hpp"
#include "preshock/puiseux.hpp"
#include "preshock/runio.hpp"

namespace fs = std::filesystem;
using namespace preshock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitEstimateViolation = 2;
constexpr int kExitAmbiguousBlowup = 3;

StateField make_data(const RunConfig& cfg, Params& params) {
    if (cfg.mode == RunMode::Burgers) {
        SpectralGrid grid(params.n_grid);
        StateField data;
        data.t = 0.0;
        data.w.resize(grid.size());
        data.z.assign(grid.size(), 0.0);
        data.k.assign(grid.size(), 0.0);
        data.a.assign(grid.size(), 0.0);
        for (int i = 0; i < grid.size(); ++i) {
            data.w[i] = -cfg.burgers_amp * std::sin(grid.nodes()[i] - cfg.burgers_shift);
        }
        return data;
    }
    if (!cfg.data_file.empty()) {
        std::string json_side = cfg.data_file;
        auto dot = json_side.rfind('.');
        json_side = (dot == std::string::npos ? json_side : json_side.substr(0, dot)) + ".json";
        auto [data, p] = load_state(cfg.data_file, json_side);
        params = p;
        ValidationReport rep = validate(data, params);
        if (!rep.valid()) {
            std::cerr << "input data failed validation:\n" << rep.summary();
            throw std::invalid_argument("invalid data file");
        }
        return data;
    }
    DataSpec spec;
    spec.params = params;
    return build_canonical(spec);
}

struct RunOutputs {
    Trajectory traj;
    BlowupReport blowup;
    CuspExpansion cusp;
    bool analyzed = false;
};

void write_reports(const std::string& dir, const RunConfig& cfg, const Trajectory& traj) {
    AnalysisConfig acfg;
    acfg.window_frac = cfg.window_frac;
    acfg.scaling_slack = cfg.scaling_slack;

    BlowupReport rep = detect_blowup(traj, acfg);
    EtaXStructure structure = eta_x_structure_check(traj, rep, acfg);
    write_blowup_report(dir + "/reports/blowup.json", cfg, rep, &structure);

    CuspExpansion cusp = fit_cusp(traj, rep, acfg);
    HolderFit holder = holder_exponent_w(traj, rep, acfg);
    write_cusp_report(dir + "/reports/cusp.json", cfg, cusp, &holder);
    write_error_profiles(dir + "/reports", reconstruct_and_compare(cusp, traj, rep, acfg));

    EnvelopeReport env = estimate_envelopes(traj, traj.params);
    write_envelope_report(dir + "/reports/envelopes.json", cfg, env);

    std::vector<ResidualSeries> duh = duhamel_residuals(traj);
    duh.push_back(transport_residual(traj));
    std::vector<IdentityResidual> ids = appendix_identity_residuals(traj);
    for (auto& v : vorticity_checks(traj)) ids.push_back(std::move(v));
    write_residual_report(dir + "/reports/residuals.json", cfg, duh, ids);

    std::cout << "T* = " << format_double(rep.t_star) << "  x* = " << format_double(rep.x_star)
              << "  xi* = " << format_double(rep.xi_star) << "\n";
}

int run_simulate(const RunConfig& cfg) {
    Params params = cfg.to_params();
    StateField data = make_data(cfg, params);
    Trajectory traj = evolve_until(data, params, cfg.to_solver_config());
    write_run_directory(cfg.out_dir, cfg, traj);
    std::cout << "stop: " << to_string(traj.stop.reason) << " at t = "
              << format_double(traj.stop.t) << " after " << traj.stop.steps << " steps\n";
    if (traj.stop.reason == StopReason::EstimateViolation) {
        std::cerr << "estimate violation: " << traj.stop.detail << "\n";
        return kExitEstimateViolation;
    }
    try {
        write_reports(cfg.out_dir, cfg, traj);
    } catch (const std::exception& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return kExitAmbiguousBlowup;
    }
    return kExitOk;
}

int run_analyze(const std::string& dir) {
    RunConfig cfg;
    Trajectory traj = load_run_directory(dir, &cfg);
    try {
        write_reports(dir, cfg, traj);
    } catch (const std::exception& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return kExitAmbiguousBlowup;
    }
    return kExitOk;
}

struct SweepResult {
    double eps;
    double t_star = 0.0, x_star = 0.0;
    bool ok = false;
    std::string error;
};

int run_sweep(RunConfig base, const std::vector<double>& eps_list) {
    if (eps_list.size() < 3) {
        std::cerr << "sweep: need at least 3 eps values\n";
        return kExitError;
    }
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PRESHOCK_WORKERS")) workers = std::atoi(env);
    workers = std::max(1, std::min<int>(workers, static_cast<int>(eps_list.size())));

    std::vector<SweepResult> results(eps_list.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= eps_list.size()) return;
            RunConfig cfg = base;
            cfg.eps = eps_list[i];
            cfg.out_dir = base.out_dir + "/eps_" + format_double(eps_list[i]);
            SweepResult& r = results[i];
            r.eps = eps_list[i];
            try {
                Params params = cfg.to_params();
                StateField data = make_data(cfg, params);
                Trajectory traj = evolve_until(data, params, cfg.to_solver_config());
                write_run_directory(cfg.out_dir, cfg, traj);
                if (traj.stop.reason == StopReason::EstimateViolation)
                    throw std::runtime_error("estimate violation: " + traj.stop.detail);
                AnalysisConfig acfg;
                acfg.window_frac = cfg.window_frac;
                acfg.scaling_slack = cfg.scaling_slack;
                BlowupReport rep = detect_blowup(traj, acfg);
                EtaXStructure st = eta_x_structure_check(traj, rep, acfg);
                write_blowup_report(cfg.out_dir + "/reports/blowup.json", cfg, rep, &st);
                r.t_star = rep.t_star;
                r.x_star = rep.x_star;
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    fs::create_directories(base.out_dir);
    std::ofstream csv(base.out_dir + "/scaling.csv");
    csv << "eps,t_star,x_star,ok\n";
    for (const auto& r : results) {
        csv << format_double(r.eps) << ',' << format_double(r.t_star) << ','
            << format_double(r.x_star) << ',' << (r.ok ? 1 : 0) << '\n';
    }
    bool all_ok = true;
    for (const auto& r : results) {
        if (!r.ok) {
            std::cerr << "member eps = " << r.eps << " failed: " << r.error << "\n";
            all_ok = false;
        }
    }
    if (!all_ok) {
        std::cerr << "sweep aborted; partial results in " << base.out_dir << "/scaling.csv\n";
        return kExitError;
    }

    // slope fits of log|T*|, log|x*| against log eps
    auto slope_of = [&](auto getter) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& r : results) {
            double lx = std::log(r.eps), ly = std::log(std::abs(getter(r)));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    double t_slope = slope_of([](const SweepResult& r) { return r.t_star; });
    double x_slope = slope_of([](const SweepResult& r) { return r.x_star; });

    nlohmann::json j;
    j["schema"] = "preshock-scaling-v1";
    j["eps"] = eps_list;
    j["t_star_slope"] = t_slope;
    j["x_star_slope"] = x_slope;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : results) {
        rows.push_back({{"eps", r.eps}, {"t_star", r.t_star}, {"x_star", r.x_star}});
    }
    j["runs"] = rows;
    std::ofstream(base.out_dir + "/scaling_summary.json") << j.dump(2) << '\n';
    std::cout << "t_star slope = " << t_slope << ", x_star slope = " << x_slope << "\n";
    return kExitOk;
}

int run_validate(const RunConfig& cfg) {
    Params params = cfg.to_params();
    try {
        StateField data = make_data(cfg, params);
        ValidationReport rep = validate(data, params);
        std::cout << rep.summary();
        return rep.valid() ? kExitOk : kExitError;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitError;
    }
}

int run_puiseux_demo() {
    PuiseuxSeries series(16);
    std::cout << "inversion series coefficients c_n (exact up to n = "
              << series.coeffs.exact_up_to << "):\n";
    for (int n = 0; n <= std::min(12, series.coeffs.order()); ++n) {
        std::cout << "  c_" << n << " = " << series.coeffs.num[n] << "/" << series.coeffs.den[n]
                  << " = " << format_double(series.coeffs.c[n]) << "\n";
    }
    std::cout << "radius estimate (normalized variable): " << format_double(series.radius_est)
              << "\n";
    for (double x : {1e-6, 1e-4, 1e-3}) {
        double y = series.invert_quartic(1.0, 1.0, x);
        double resid = -x + y * y * y + y * y * y * y;
        std::cout << "  invert(a3=1, a4=1, x=" << x << ") = " << format_double(y)
                  << "  residual = " << format_double(resid) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pre-shock laboratory for the azimuthal Euler system"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig cfg;
    std::vector<std::string> kv_overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option_function<double>("--eps", [&](double v) { kv_overrides.push_back("eps=" + format_double(v)); });
        sub->add_option_function<double>("--mu", [&](double v) { kv_overrides.push_back("mu=" + format_double(v)); });
        sub->add_option_function<int>("--grid", [&](int v) { kv_overrides.push_back("grid=" + std::to_string(v)); });
        sub->add_option_function<double>("--cfl", [&](double v) { kv_overrides.push_back("cfl=" + format_double(v)); });
        sub->add_option_function<double>("--stop-eta-x", [&](double v) { kv_overrides.push_back("stop_eta_x=" + format_double(v)); });
        sub->add_option_function<std::string>("--out", [&](std::string v) { kv_overrides.push_back("out=" + v); });
        sub->add_option_function<std::string>("--mode", [&](std::string v) { kv_overrides.push_back("mode=" + v); });
        sub->add_option_function<unsigned long long>("--seed", [&](unsigned long long v) { kv_overrides.push_back("seed=" + std::to_string(v)); });
        sub->add_option_function<std::string>("--data", [&](std::string v) { kv_overrides.push_back("data_file=" + v); });
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one simulation and write reports");
    add_common(sim);
    CLI::App* sweep = app.add_subcommand("sweep", "concurrent eps sweep with scaling fits");
    add_common(sweep);
    std::vector<double> eps_list;
    sweep->add_option("--eps-list", eps_list, "eps values (>= 3)")->delimiter(',');
    CLI::App* analyze = app.add_subcommand("analyze", "re-run analysis on a run directory");
    std::string run_dir;
    analyze->add_option("dir", run_dir, "run directory")->required();
    CLI::App* vdata = app.add_subcommand("validate-data", "check data against the admissible class");
    add_common(vdata);
    CLI::App* pdemo = app.add_subcommand("puiseux-demo", "quartic inversion series demo");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) cfg = load_config_file(config_path);
        for (const auto& kv : kv_overrides) {
            size_t eq = kv.find('=');
            apply_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (sim->parsed()) return run_simulate(cfg);
        if (sweep->parsed()) return run_sweep(cfg, eps_list);
        if (analyze->parsed()) return run_analyze(run_dir);
        if (vdata->parsed()) return run_validate(cfg);
        if (pdemo->parsed()) return run_puiseux_demo();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
