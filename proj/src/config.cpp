#include "preshock/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "preshock/runio.hpp"

namespace preshock {

RunMode parse_mode(const std::string& s) {
    if (s == "full") return RunMode::Full;
    if (s == "burgers") return RunMode::Burgers;
    if (s == "puiseux-demo") return RunMode::PuiseuxDemo;
    throw std::invalid_argument("unknown mode: " + s + " (expected full|burgers|puiseux-demo)");
}

const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Full: return "full";
        case RunMode::Burgers: return "burgers";
        case RunMode::PuiseuxDemo: return "puiseux-demo";
    }
    return "unknown";
}

Params RunConfig::to_params() const {
    Params p;
    p.eps = eps;
    p.mu = mu;
    p.exponents = ExponentVector::defaults(mu);
    if (grid > 0) {
        p.n_grid = grid;
    } else {
        p.n_grid = (mode == RunMode::Burgers) ? 512 : Params::suggest_grid(eps);
    }
    p.validate();
    return p;
}

SolverConfig RunConfig::to_solver_config() const {
    SolverConfig s;
    s.cfl = cfl;
    s.stop_eta_x = stop_eta_x;
    s.burgers = (mode == RunMode::Burgers);
    s.densify_below = (densify_below > 0.0) ? densify_below : (s.burgers ? 0.5 : 0.1);
    return s;
}

std::map<std::string, std::string> RunConfig::to_kv() const {
    std::map<std::string, std::string> kv;
    kv["mode"] = to_string(mode);
    kv["eps"] = format_double(eps);
    kv["mu"] = format_double(mu);
    kv["grid"] = std::to_string(grid);
    kv["cfl"] = format_double(cfl);
    kv["stop_eta_x"] = format_double(stop_eta_x);
    kv["densify_below"] = format_double(densify_below);
    kv["seed"] = std::to_string(seed);
    kv["data_file"] = data_file;
    kv["out"] = out_dir;
    kv["window_frac"] = format_double(window_frac);
    kv["fit_degree"] = std::to_string(fit_degree);
    kv["scaling_slack"] = format_double(scaling_slack);
    kv["burgers_amp"] = format_double(burgers_amp);
    kv["burgers_shift"] = format_double(burgers_shift);
    return kv;
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "mode") cfg.mode = parse_mode(value);
        else if (key == "eps") cfg.eps = std::stod(value);
        else if (key == "mu") cfg.mu = std::stod(value);
        else if (key == "grid") cfg.grid = std::stoi(value);
        else if (key == "cfl") cfg.cfl = std::stod(value);
        else if (key == "stop_eta_x") cfg.stop_eta_x = std::stod(value);
        else if (key == "densify_below") cfg.densify_below = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "data_file") cfg.data_file = value;
        else if (key == "out") cfg.out_dir = value;
        else if (key == "window_frac") cfg.window_frac = std::stod(value);
        else if (key == "fit_degree") cfg.fit_degree = std::stoi(value);
        else if (key == "scaling_slack") cfg.scaling_slack = std::stod(value);
        else if (key == "burgers_amp") cfg.burgers_amp = std::stod(value);
        else if (key == "burgers_shift") cfg.burgers_shift = std::stod(value);
        else throw std::invalid_argument("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad value for config key " + key + ": " + value);
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // trim
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
        line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
        apply_kv(cfg, key, val);
    }
    return cfg;
}

}  // namespace preshock
