#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "preshock/initial_data.hpp"

using namespace preshock;

TEST_CASE("canonical family validates for eps in {0.2, 0.1, 0.05}") {
    for (double eps : {0.2, 0.1, 0.05}) {
        DataSpec spec;
        spec.params = Params(eps, 0.25, Params::suggest_grid(eps));
        StateField data = build_canonical(spec);
        ValidationReport rep = validate(data, spec.params);
        INFO("eps = ", eps, "\n", rep.summary());
        CHECK(rep.valid());
    }
}

TEST_CASE("degenerate isentropic data (zero z, k, a amplitudes) is still valid") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, Params::suggest_grid(0.1));
    spec.z_seed = 0.0;
    spec.k_seed = 0.0;
    spec.a_seed = 0.0;
    StateField data = build_canonical(spec);
    ValidationReport rep = validate(data, spec.params);
    INFO(rep.summary());
    CHECK(rep.valid());
    for (double v : data.z) CHECK(v == 0.0);
}

TEST_CASE("minimum normalization: spectral w'(0) = -1/eps to relative 1e-10") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, Params::suggest_grid(0.1));
    StateField data = build_canonical(spec);
    SpectralGrid grid(spec.params.n_grid);
    std::vector<double> w1 = grid.derivative(data.w);
    Spectrum s = grid.analyze(w1);
    double v0 = SpectralGrid::eval_direct(s, 0.0);
    CHECK(std::abs(v0 + 1.0 / spec.params.eps) * spec.params.eps <= 1e-10);
    // argmin on the grid is the node nearest zero
    int argmin = 0;
    for (int i = 1; i < grid.size(); ++i)
        if (w1[i] < w1[argmin]) argmin = i;
    CHECK(std::abs(grid.nodes()[argmin]) <= grid.dx() / 2 + 1e-12);
}

TEST_CASE("consequence checks: w''(0) = 0 and the second-derivative sup bound") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, Params::suggest_grid(0.1));
    StateField data = build_canonical(spec);
    ValidationReport rep = validate(data, spec.params);
    const ConstraintCheck* origin = rep.find("w0pp-origin-zero");
    REQUIRE(origin != nullptr);
    CHECK(origin->pass);
    const ConstraintCheck* sup = rep.find("w0pp-sup");
    REQUIRE(sup != nullptr);
    CHECK(sup->pass);
}

TEST_CASE("violating the Riemann-separation constraint is caught") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, 2048);
    StateField data = build_canonical(spec);
    double minw = 1e300;
    for (double v : data.w) minw = std::min(minw, v);
    for (auto& v : data.z) v += minw + 0.1 - *std::max_element(data.z.begin(), data.z.end());
    ValidationReport rep = validate(data, spec.params);
    CHECK_FALSE(rep.valid());
    const ConstraintCheck* c = rep.find("max-z0-below-min-w0");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->pass);
}

TEST_CASE("a doubled well depth fails the minimum normalization check") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, 2048);
    StateField data = build_canonical(spec);
    for (auto& v : data.w) v *= 2.0;  // w'(0) becomes -2/eps
    ValidationReport rep = validate(data, spec.params);
    const ConstraintCheck* c = rep.find("w0p-min-value");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->pass);
}

TEST_CASE("perturbation: amplitude zero is the identity, two seeds stay close") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, 2048);
    StateField data = build_canonical(spec);
    StateField same = perturb(data, 0.0, 5);
    for (int i = 0; i < data.size(); ++i) CHECK(same.w[i] == data.w[i]);

    double amp = 1e-3;
    StateField p1 = perturb(data, amp, 5);
    StateField p2 = perturb(data, amp, 6);
    double d = 0.0, dmax = 0.0;
    for (int i = 0; i < data.size(); ++i) {
        d = std::max(d, std::abs(p1.w[i] - p2.w[i]));
        dmax = std::max(dmax, std::abs(p1.w[i] - data.w[i]));
    }
    CHECK(d <= 2.0 * amp + 1e-12);
    CHECK(dmax <= amp + 1e-12);
}

TEST_CASE("perturbed data re-validates after renormalization") {
    double eps = 0.1;
    DataSpec spec;
    spec.params = Params(eps, 0.25, Params::suggest_grid(eps));
    StateField data = build_canonical(spec);
    StateField pert = perturb(data, 1e-4 * eps, 17);
    Renormalization r = renormalize_min(pert, spec.params);
    CHECK(std::abs(r.scale - 1.0) < 1e-2);
    ValidationReport rep = validate(pert, spec.params);
    INFO(rep.summary());
    CHECK(rep.valid());
}

TEST_CASE("state save/load round trip") {
    DataSpec spec;
    spec.params = Params(0.1, 0.25, 512);
    SpectralGrid grid(512);
    StateField data;
    data.t = -0.1;
    data.w.assign(512, 1.0);
    data.z.assign(512, 0.1);
    data.k.assign(512, 0.0);
    data.a.assign(512, -0.05);
    auto dir = std::filesystem::temp_directory_path() / "preshock_test_data";
    std::filesystem::create_directories(dir);
    std::string csv = (dir / "state.csv").string();
    std::string js = (dir / "state.json").string();
    save_state(csv, js, data, spec.params);
    auto [back, params] = load_state(csv, js);
    CHECK(params.eps == spec.params.eps);
    CHECK(back.size() == 512);
    CHECK(back.t == data.t);
    for (int i = 0; i < 512; ++i) CHECK(back.w[i] == data.w[i]);
}
