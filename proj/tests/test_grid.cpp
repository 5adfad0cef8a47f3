#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "preshock/grid.hpp"

using namespace preshock;

namespace {
std::vector<double> sample(const SpectralGrid& g, auto&& f) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = f(g.nodes()[i]);
    return v;
}
}  // namespace

TEST_CASE("spectral derivative is exact for trigonometric polynomials") {
    SpectralGrid g(64);
    auto f = sample(g, [](double t) { return 2.0 + std::sin(3 * t) - 0.5 * std::cos(7 * t); });
    auto d = g.derivative(f);
    for (int i = 0; i < g.size(); ++i) {
        double t = g.nodes()[i];
        double exact = 3 * std::cos(3 * t) + 3.5 * std::sin(7 * t);
        CHECK(d[i] == doctest::Approx(exact).epsilon(1e-12));
    }
    auto d3 = g.derivative(f, 3);
    for (int i = 0; i < g.size(); ++i) {
        double t = g.nodes()[i];
        double exact = -27 * std::cos(3 * t) - 171.5 * std::sin(7 * t);
        CHECK(d3[i] == doctest::Approx(exact).epsilon(1e-11));
    }
}

TEST_CASE("antiderivative inverts derivative up to the mean") {
    SpectralGrid g(128);
    auto f = sample(g, [](double t) { return std::sin(2 * t) + 0.3 * std::cos(5 * t); });
    auto fp = g.derivative(f);
    auto back = g.antiderivative(fp, 0.0);
    for (int i = 0; i < g.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
}

TEST_CASE("analyze/synthesize round trip") {
    SpectralGrid g(96);
    std::vector<double> f = random_band_limited(g, 30, 1.0, 42);
    auto s = g.analyze(f);
    auto back = g.synthesize(s);
    for (int i = 0; i < g.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-13));
}

TEST_CASE("circular shift by a real offset") {
    SpectralGrid g(64);
    auto f = sample(g, [](double t) { return std::cos(t) + 0.25 * std::sin(4 * t); });
    double delta = 0.3137;
    auto sh = g.shifted(f, delta);
    for (int i = 0; i < g.size(); ++i) {
        double t = g.nodes()[i] - delta;
        double exact = std::cos(t) + 0.25 * std::sin(4 * t);
        CHECK(sh[i] == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("interpolant matches direct summation to 1e-12 for band-limited fields") {
    SpectralGrid g(256);
    std::vector<double> f = random_band_limited(g, g.size() / 2 - 1, 1.0, 7);
    Spectrum s = g.analyze(f);
    FineInterpolant interp = g.interpolant(f);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        double theta = u(rng);
        double direct = SpectralGrid::eval_direct(s, theta);
        worst = std::max(worst, std::abs(interp(theta) - direct));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("interpolant handles a one-mode field exactly across the seam") {
    SpectralGrid g(32);
    auto f = sample(g, [](double t) { return std::cos(t); });
    FineInterpolant interp = g.interpolant(f);
    for (double theta : {-3.14159, 3.14159, 9.5, -9.5, 0.0}) {
        CHECK(interp(theta) == doctest::Approx(std::cos(theta)).epsilon(1e-13));
    }
}

TEST_CASE("truncation zeroes high modes only") {
    SpectralGrid g(64);
    auto f = sample(g, [](double t) { return std::cos(3 * t) + std::cos(20 * t); });
    auto tr = g.truncated(f, 10);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(tr[i] == doctest::Approx(std::cos(3 * g.nodes()[i])).epsilon(1e-12));
    }
}

TEST_CASE("random band limited field hits the requested max-norm") {
    SpectralGrid g(128);
    auto f = random_band_limited(g, 8, 0.25, 3);
    double mx = 0.0, mean = 0.0;
    for (double v : f) {
        mx = std::max(mx, std::abs(v));
        mean += v;
    }
    CHECK(mx == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(mean / g.size()) < 1e-12);
}
