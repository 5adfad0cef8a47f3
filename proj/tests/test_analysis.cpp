#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "preshock/analysis.hpp"
#include "preshock/initial_data.hpp"
#include "preshock/solver.hpp"

using namespace preshock;

namespace {

Trajectory burgers_run(int n, double shift = 0.0, double densify = 0.5) {
    SpectralGrid g(n);
    StateField d;
    d.t = 0.0;
    d.w.resize(n);
    d.z.assign(n, 0.0);
    d.k.assign(n, 0.0);
    d.a.assign(n, 0.0);
    for (int i = 0; i < n; ++i) d.w[i] = -std::sin(g.nodes()[i] - shift);
    Params p;
    p.n_grid = n;
    SolverConfig cfg;
    cfg.burgers = true;
    cfg.densify_below = densify;
    return evolve_until(d, p, cfg);
}

}  // namespace

TEST_CASE("polyfit recovers exact polynomial coefficients") {
    std::vector<double> x, y;
    const double x0 = 0.3, h = 0.02;
    for (int q = 0; q < 64; ++q) {
        double u = x0 + h * std::cos(std::numbers::pi * (q + 0.5) / 64);
        double d = u - x0;
        x.push_back(u);
        y.push_back(2.0 - 0.5 * d + 3.0 * d * d - 7.0 * d * d * d + 11.0 * d * d * d * d);
    }
    std::vector<double> c = polyfit(x, y, x0, h, 4);
    CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(c[2] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(c[3] == doctest::Approx(-7.0).epsilon(1e-8));
    CHECK(c[4] == doctest::Approx(11.0).epsilon(1e-6));
}

TEST_CASE("fractional coefficient assembly against independent evaluation") {
    double a3 = 125.0, a4 = 30.0;
    std::array<double, 5> Bw{0.7, -9.0, 40.0, -300.0, 1000.0};
    auto aw = frac_coeffs_w(a3, a4, Bw);
    CHECK(aw[0] == doctest::Approx(0.7));
    CHECK(aw[1] == doctest::Approx(-9.0 / std::cbrt(125.0)).epsilon(1e-13));
    double expect2 = 40.0 / std::pow(125.0, 2.0 / 3.0) -
                     (1.0 / 3.0) * std::pow(125.0, -5.0 / 3.0) * 30.0 * (-9.0);
    CHECK(aw[2] == doctest::Approx(expect2).epsilon(1e-13));

    std::array<double, 5> Bz{0.1, 0.0, 0.0, 5.0, -2.0};
    auto az = frac_coeffs_slow(a3, a4, Bz);
    CHECK(az[0] == doctest::Approx(0.1));
    CHECK(az[1] == doctest::Approx(5.0 / 125.0).epsilon(1e-13));
    double expectz2 = -2.0 / std::pow(125.0, 4.0 / 3.0) -
                      std::pow(125.0, -7.0 / 3.0) * 30.0 * 5.0;
    CHECK(az[2] == doctest::Approx(expectz2).epsilon(1e-13));

    auto aw0 = frac_coeffs_w(a3, 0.0, Bw);
    CHECK(aw0[2] == doctest::Approx(40.0 / std::pow(125.0, 2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("holder exponent on synthetic power laws") {
    std::vector<double> th, f1;
    for (int i = -4000; i <= 4000; ++i) {
        if (i == 0) continue;
        double t = 1e-4 * i;
        th.push_back(t);
        f1.push_back(t);
    }
    {
        std::vector<double> v(th.size());
        for (size_t i = 0; i < th.size(); ++i) v[i] = std::cbrt(std::abs(th[i]));
        HolderFit h = holder_exponent(th, v, 0.0, 0.3, 10.0, 24);
        CHECK(h.exponent == doctest::Approx(1.0 / 3.0).epsilon(3e-3));
    }
    {
        HolderFit h = holder_exponent(th, f1, 0.0, 0.3, 10.0, 24);
        CHECK(h.exponent == doctest::Approx(1.0).epsilon(3e-3));
    }
    std::vector<double> few{0.1, 0.2}, fewv{1.0, 2.0};
    CHECK_THROWS(holder_exponent(few, fewv, 0.0, 0.3, 10.0, 24));
}

TEST_CASE("burgers oracle: T* = 1 and x* = 0 within 1e-3 at N = 512") {
    Trajectory traj = burgers_run(512);
    BlowupReport rep = detect_blowup(traj);
    CHECK(std::abs(rep.t_star - 1.0) <= 1e-3);
    CHECK(std::abs(rep.x_star) <= 1e-3);
    CHECK(std::abs(rep.xi_star) <= 2e-3);
    CHECK(rep.uniqueness_margin > 0.0);
    CHECK(rep.t_star > rep.t_stop);
    CHECK(rep.pass());
}

TEST_CASE("burgers oracle: translated profile moves the blowup label") {
    Trajectory traj = burgers_run(512, 0.3);
    BlowupReport rep = detect_blowup(traj);
    CHECK(std::abs(rep.t_star - 1.0) <= 1e-3);
    CHECK(std::abs(rep.x_star - 0.3) <= 1e-3);
    CHECK(std::abs(rep.xi_star - 0.3) <= 2e-3);
}

TEST_CASE("burgers: detection error decreases at order >= 3 under refinement") {
    double errs[3];
    int idx = 0;
    for (int n : {128, 256, 512}) {
        Trajectory traj = burgers_run(n);
        BlowupReport rep = detect_blowup(traj);
        errs[idx++] = std::abs(rep.t_star - 1.0);
    }
    double o1 = std::log2(errs[0] / errs[1]);
    double o2 = std::log2(errs[1] / errs[2]);
    INFO("errors ", errs[0], " ", errs[1], " ", errs[2]);
    CHECK(0.5 * (o1 + o2) >= 3.0);
}

TEST_CASE("burgers: eta_x sandwich fits with c, C near |u0'''|/2") {
    Trajectory traj = burgers_run(512);
    BlowupReport rep = detect_blowup(traj);
    EtaXStructure st = eta_x_structure_check(traj, rep);
    CHECK(st.lower_c > 0.0);
    CHECK(st.upper_C > 0.0);
    CHECK(st.upper_C == doctest::Approx(0.5).epsilon(0.3));
    CHECK(st.annulus_margin > 0.0);
    CHECK(st.pass());
}

TEST_CASE("burgers: cusp fit recovers the cubic flow structure") {
    Trajectory traj = burgers_run(512);
    BlowupReport rep = detect_blowup(traj);
    CuspExpansion cusp = fit_cusp(traj, rep);
    // eta(x, T*) = x - sin x = x^3/6 - x^5/120 + ...
    CHECK(cusp.a3 == doctest::Approx(1.0 / 6.0).epsilon(0.05));
    CHECK(std::abs(cusp.a4) < 0.02);
    const auto& Bw = cusp.taylor.at("w");
    CHECK(Bw[0] == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(std::abs(Bw[0]) < 1e-3);
    CHECK(Bw[1] == doctest::Approx(-1.0).epsilon(0.01));
    CHECK(std::abs(Bw[2]) < 0.05);
    CHECK(Bw[3] == doctest::Approx(1.0 / 6.0).epsilon(0.2));
    CHECK(cusp.frac.at("w")[1] ==
          doctest::Approx(-1.0 / std::cbrt(1.0 / 6.0)).epsilon(0.05));
}

TEST_CASE("burgers: reconstruction against the final snapshot is bounded on the window") {
    Trajectory traj = burgers_run(512);
    BlowupReport rep = detect_blowup(traj);
    CuspExpansion cusp = fit_cusp(traj, rep);
    std::vector<ErrorProfile> prof = reconstruct_and_compare(cusp, traj, rep);
    REQUIRE(!prof.empty());
    const ErrorProfile& w = prof.front();
    CHECK(w.field == "w");
    CHECK(w.theta.size() > 40);
    CHECK(w.max_normalized < 50.0);
}

TEST_CASE("burgers: holder exponent of u at the final snapshot brackets 1/3") {
    Trajectory traj = burgers_run(512);
    BlowupReport rep = detect_blowup(traj);
    HolderFit h = holder_exponent_w(traj, rep);
    CHECK(h.exponent > 0.25);
    CHECK(h.exponent < 0.45);
}

TEST_CASE("detect_blowup rejects trajectories without a dense tail") {
    SpectralGrid g(256);
    StateField d;
    d.t = 0.0;
    d.w.resize(g.size());
    d.z.assign(g.size(), 0.0);
    d.k.assign(g.size(), 0.0);
    d.a.assign(g.size(), 0.0);
    for (int i = 0; i < g.size(); ++i) d.w[i] = -std::sin(g.nodes()[i]);
    Params p;
    p.n_grid = 256;
    SolverConfig cfg;
    cfg.burgers = true;
    cfg.t_cap = 0.3;  // stop long before any steepening
    Trajectory traj = evolve_until(d, p, cfg);
    CHECK_THROWS(detect_blowup(traj));
}

TEST_CASE("full system: blowup report and cusp expansion at eps = 0.1") {
    const double eps = 0.1;
    const int n = 2048;
    DataSpec spec;
    spec.params = Params(eps, 0.25, n);
    StateField data = build_canonical(spec);
    SolverConfig cfg;
    Trajectory traj = evolve_until(data, spec.params, cfg);
    BlowupReport rep = detect_blowup(traj);

    INFO("T* = ", rep.t_star, ", x* = ", rep.x_star, ", xi* = ", rep.xi_star);
    CHECK(rep.t_star > rep.t_stop);
    CHECK(std::abs(rep.t_star) < 10.0 * std::pow(eps, 1.25));
    CHECK(std::abs(rep.x_star) < 10.0 * std::pow(eps, 2.25));
    CHECK(rep.pass());

    EtaXStructure st = eta_x_structure_check(traj, rep);
    CHECK(st.lower_c > 0.0);
    CHECK(st.upper_C > 0.0);
    CHECK(st.annulus_margin > 0.0);

    CuspExpansion cusp = fit_cusp(traj, rep);
    INFO("a3 = ", cusp.a3, ", a3 eps^3 = ", cusp.a3 * std::pow(eps, 3.0));
    CHECK(cusp.a3 > 0.0);
    double a3n = cusp.a3 * std::pow(eps, 3.0);
    CHECK(a3n > 0.05);
    CHECK(a3n < 10.0);
    for (const auto& c : cusp.checks) {
        INFO(c.name, " value=", c.value, " bound=", c.bound);
        CHECK(c.pass);
    }

    HolderFit h = holder_exponent_w(traj, rep);
    INFO("holder = ", h.exponent, " (", h.exponent_left, ", ", h.exponent_right, ")");
    CHECK(h.exponent > 0.25);
    CHECK(h.exponent < 0.45);

    std::vector<ErrorProfile> prof = reconstruct_and_compare(cusp, traj, rep);
    double w_raw = 0.0, slow_raw = 0.0;
    for (const auto& p : prof) {
        INFO(p.field, " max_norm=", p.max_normalized, " max_raw=", p.max_raw);
        CHECK(p.max_normalized < 100.0);
        if (p.field == "w") w_raw = p.max_raw;
        else slow_raw = std::max(slow_raw, p.max_raw);
    }
    CHECK(slow_raw < w_raw);
}
