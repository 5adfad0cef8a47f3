#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "preshock/config.hpp"
#include "preshock/initial_data.hpp"
#include "preshock/runio.hpp"
#include "preshock/solver.hpp"

using namespace preshock;
namespace fs = std::filesystem;

namespace {

Trajectory small_burgers() {
    const int n = 256;
    SpectralGrid g(n);
    StateField d;
    d.t = 0.0;
    d.w.resize(n);
    d.z.assign(n, 0.0);
    d.k.assign(n, 0.0);
    d.a.assign(n, 0.0);
    for (int i = 0; i < n; ++i) d.w[i] = -std::sin(g.nodes()[i]);
    Params p;
    p.n_grid = n;
    SolverConfig cfg;
    cfg.burgers = true;
    cfg.densify_below = 0.5;
    return evolve_until(d, p, cfg);
}

}  // namespace

TEST_CASE("config files parse, unknown keys rejected, flags override") {
    auto dir = fs::temp_directory_path() / "preshock_cfg_test";
    fs::create_directories(dir);
    std::string path = (dir / "run.cfg").string();
    std::ofstream(path) << "# comment line\n"
                           "mode = full\n"
                           "eps = 0.125   # inline comment\n"
                           "grid = 1024\n"
                           "stop_eta_x = 0.02\n";
    RunConfig cfg = load_config_file(path);
    CHECK(cfg.mode == RunMode::Full);
    CHECK(cfg.eps == 0.125);
    CHECK(cfg.grid == 1024);
    CHECK(cfg.stop_eta_x == 0.02);
    apply_kv(cfg, "eps", "0.2");  // flag-style override wins
    CHECK(cfg.eps == 0.2);

    std::ofstream(path) << "unknown_key = 1\n";
    CHECK_THROWS(load_config_file(path));
}

TEST_CASE("run directory round trip is exact") {
    Trajectory traj = small_burgers();
    RunConfig cfg;
    cfg.mode = RunMode::Burgers;
    cfg.grid = 256;
    auto dir = (fs::temp_directory_path() / "preshock_run_test").string();
    fs::remove_all(dir);
    write_run_directory(dir, cfg, traj);

    RunConfig cfg2;
    Trajectory back = load_run_directory(dir, &cfg2);
    CHECK(back.burgers == traj.burgers);
    CHECK(back.params.n_grid == traj.params.n_grid);
    CHECK(back.snapshots.size() == traj.snapshots.size());
    CHECK(back.monitors.size() == traj.monitors.size());
    CHECK(back.stop.reason == traj.stop.reason);
    // bit-exact numeric round trip
    for (size_t j = 0; j < traj.snapshots.size(); ++j) {
        const Snapshot& a = traj.snapshots[j];
        const Snapshot& b = back.snapshots[j];
        CHECK(a.state.t == b.state.t);
        for (int i = 0; i < traj.params.n_grid; ++i) {
            CHECK(a.state.w[i] == b.state.w[i]);
            CHECK(a.flows.eta_x[i] == b.flows.eta_x[i]);
            CHECK(a.flows.ints.qw_eta[i] == b.flows.ints.qw_eta[i]);
        }
    }
    CHECK(cfg2.mode == RunMode::Burgers);
}

TEST_CASE("offline analysis of a stored run matches the in-memory one bit for bit") {
    Trajectory traj = small_burgers();
    RunConfig cfg;
    cfg.mode = RunMode::Burgers;
    auto dir = (fs::temp_directory_path() / "preshock_run_test2").string();
    fs::remove_all(dir);
    write_run_directory(dir, cfg, traj);
    Trajectory back = load_run_directory(dir);

    BlowupReport a = detect_blowup(traj);
    BlowupReport b = detect_blowup(back);
    CHECK(a.t_star == b.t_star);
    CHECK(a.x_star == b.x_star);
    CHECK(a.xi_star == b.xi_star);
    CHECK(a.fit.slope == b.fit.slope);
}

TEST_CASE("format_double round trips exactly") {
    for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456.789, 2.2250738585072014e-308}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
