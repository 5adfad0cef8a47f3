#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "preshock/fields.hpp"
#include "preshock/initial_data.hpp"
#include "preshock/solver.hpp"

namespace preshock {

enum class RunMode { Full, Burgers, PuiseuxDemo };

struct RunConfig {
    RunMode mode = RunMode::Full;
    double eps = 0.1;
    double mu = 0.25;
    int grid = 0;  // 0: auto from eps
    double cfl = 0.4;
    double stop_eta_x = 1e-2;
    double densify_below = 0.1;
    unsigned long long seed = 1;
    std::string data_file;  // optional CSV input (with .json sidecar)
    std::string out_dir = "runs/latest";
    // analysis knobs
    double window_frac = 1.0;
    int fit_degree = 4;  // documented; the eta fit always carries one extra order
    double scaling_slack = 10.0;
    // burgers-mode initial profile u0 = -amp * sin(x - shift)
    double burgers_amp = 1.0;
    double burgers_shift = 0.0;

    Params to_params() const;
    SolverConfig to_solver_config() const;
    std::map<std::string, std::string> to_kv() const;
};

/// Flat key = value config file: '#' comments, blank lines ignored.
/// Unknown keys are an error (catches typos in sweep scripts).
RunConfig load_config_file(const std::string& path);
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

RunMode parse_mode(const std::string& s);
const char* to_string(RunMode m);

}  // namespace preshock
