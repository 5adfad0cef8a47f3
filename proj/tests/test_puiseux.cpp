#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "preshock/puiseux.hpp"

using namespace preshock;

namespace {

// formal composition oracle: plug the truncated normalized series into
// -u^3 + y^3 + y^4 and return the coefficients of the residual power series.
std::vector<double> reversion_residual(const PuiseuxCoefficients& C, int terms) {
    // series of ybar in u: coefficient of u^{n+1} is (-1)^n c_n / 3^n
    std::vector<double> y(terms, 0.0);
    for (int n = 0; n + 1 < terms && n <= C.order(); ++n) {
        y[n + 1] = C.c[n] / std::pow(3.0, n) * ((n % 2 == 0) ? 1.0 : -1.0);
    }
    auto mul = [&](const std::vector<double>& A, const std::vector<double>& B) {
        std::vector<double> R(terms, 0.0);
        for (int i = 0; i < terms; ++i) {
            if (A[i] == 0.0) continue;
            for (int j = 0; i + j < terms; ++j) R[i + j] += A[i] * B[j];
        }
        return R;
    };
    std::vector<double> y2 = mul(y, y);
    std::vector<double> y3 = mul(y2, y);
    std::vector<double> y4 = mul(y3, y);
    std::vector<double> res(terms, 0.0);
    for (int i = 0; i < terms; ++i) res[i] = y3[i] + y4[i];
    res[3] -= 1.0;  // the -x = -u^3 term
    return res;
}

double bisect_root(double a3, double a4, double x) {
    // root of f(y) = -x + a3 y^3 + a4 y^4 near the cube-root branch
    auto f = [&](double y) { return -x + a3 * y * y * y + a4 * y * y * y * y; };
    double guess = std::cbrt(x / a3);
    double lo = 0.0, hi = 2.0 * std::abs(guess) + 1e-12;
    if (guess < 0) {
        lo = -hi;
        hi = 0.0;
    }
    if (f(lo) * f(hi) > 0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("recursion start: c0 = 1, c1 = 1, c2 = 3 exactly") {
    PuiseuxCoefficients C = puiseux_coefficients(4);
    CHECK(C.num[0] == 1);
    CHECK(C.den[0] == 1);
    CHECK(C.num[1] == 1);
    CHECK(C.den[1] == 1);
    CHECK(C.num[2] == 3);
    CHECK(C.den[2] == 1);
    CHECK(C.exact_up_to >= 4);
    CHECK_FALSE(C.overflowed);
}

TEST_CASE("c3 agrees with direct series reversion") {
    PuiseuxCoefficients C = puiseux_coefficients(3);
    // reversion of x = y^3 + y^4 gives coefficient -35/81 at u^4, i.e. c3 = 35/3
    CHECK(C.num[3] == 35);
    CHECK(C.den[3] == 3);
}

TEST_CASE("formal composition leaves residual O(u^{n+4}) for every n <= 12") {
    // truncating the series after c_n leaves y^3+y^4-u^3 with lowest surviving
    // order u^{n+4} (the dropped tail starts at u^{n+2} and meets 3 ybar^2).
    for (int n = 1; n <= 12; ++n) {
        PuiseuxCoefficients C = puiseux_coefficients(n);
        const int terms = n + 6;
        std::vector<double> res = reversion_residual(C, terms);
        // magnitude baseline: same convolution with absolute values
        std::vector<double> yabs(terms, 0.0);
        for (int m = 0; m + 1 < terms && m <= C.order(); ++m)
            yabs[m + 1] = std::abs(C.c[m]) / std::pow(3.0, m);
        auto mulabs = [&](const std::vector<double>& A, const std::vector<double>& B) {
            std::vector<double> R(terms, 0.0);
            for (int i = 0; i < terms; ++i)
                for (int j = 0; i + j < terms; ++j) R[i + j] += A[i] * B[j];
            return R;
        };
        std::vector<double> y2 = mulabs(yabs, yabs);
        std::vector<double> y3 = mulabs(y2, yabs);
        std::vector<double> y4 = mulabs(y3, yabs);
        for (int j = 0; j <= n + 3 && j < terms; ++j) {
            double scale = y3[j] + y4[j] + (j == 3 ? 1.0 : 0.0) + 1.0;
            CHECK(std::abs(res[j]) < 1e-12 * scale);
        }
    }
}

TEST_CASE("exact rational path reaches the documented horizon") {
    PuiseuxCoefficients C = puiseux_coefficients(rational_horizon());
    CHECK(C.exact_up_to == rational_horizon());
    CHECK_FALSE(C.overflowed);
    // growth sanity: |c_n| ~ (27/256)^{-n/3}-ish, all finite doubles
    for (double v : C.c) CHECK(std::isfinite(v));
}

TEST_CASE("radius estimate is near the true singularity scale") {
    PuiseuxSeries S(20);
    // the nearest singularity of the normalized series sits at u = (27/256)^{1/3}
    double exact = std::cbrt(27.0 / 256.0);
    CHECK(S.radius_est == doctest::Approx(exact).epsilon(0.15));
}

TEST_CASE("pure cube root when a4 = 0") {
    PuiseuxSeries S(12);
    CHECK(S.invert_quartic(1.0, 0.0, 0.008) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("inversion matches the bisection oracle") {
    PuiseuxSeries S(14);
    double y = S.invert_quartic(1.0, 1.0, 0.0011);
    double oracle = bisect_root(1.0, 1.0, 0.0011);
    CHECK(y == doctest::Approx(oracle).epsilon(1e-10));
    CHECK(y == doctest::Approx(0.1).epsilon(2e-2));
}

TEST_CASE("displayed expansion bound at small x") {
    PuiseuxSeries S(14);
    double x = 1e-6;
    double y = S.invert_quartic(1.0, 1.0, x);
    double x13 = std::cbrt(x);
    double lead = x13 - x13 * x13 / 3.0 + x / 3.0;
    double K = std::abs(y - lead) / std::pow(x, 4.0 / 3.0);
    CHECK(K < 2.0);  // bounded constant in the remainder estimate
}

TEST_CASE("algebraic residual across the whole safety region at high order") {
    // near the safety boundary |u| ~ 0.79 R the terms decay like 0.79^n, so a
    // uniformly tiny residual needs a deep truncation; order 120 brings the
    // boundary tail below 1e-12.
    PuiseuxSeries S(120);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    for (int trial = 0; trial < 2000 && tested < 500; ++trial) {
        double a3 = (u(rng) > 0 ? 1.0 : -1.0) * (0.5 + std::abs(u(rng)));
        double a4 = 2.0 * u(rng);
        double xmax = 0.499 * std::pow(S.radius_est, 3.0) * std::pow(a3, 4.0) /
                      std::max(std::abs(a4 * a4 * a4), 1e-10);
        double x = u(rng) * std::min(xmax, 1.0);
        if (!S.in_safety_region(a3, a4, x)) continue;
        ++tested;
        double y = S.invert_quartic(a3, a4, x);
        double resid = -x + a3 * y * y * y + a4 * y * y * y * y;
        double scale = std::max(std::abs(x), std::abs(a3 * y * y * y));
        CHECK(std::abs(resid) <= 1e-10 * std::max(scale, 1e-30));
    }
    CHECK(tested >= 400);
}

TEST_CASE("scaling covariance of the inversion") {
    PuiseuxSeries S(14);
    double a3 = 1.7, a4 = 0.8, x = 1e-4;
    double direct = S.invert_quartic(a3, a4, x);
    double xn = std::pow(a4, 3) / std::pow(a3, 4) * x;
    double scaled = a3 / a4 * S.invert_quartic(1.0, 1.0, xn);
    CHECK(direct == doctest::Approx(scaled).epsilon(1e-13));
}

TEST_CASE("outside the safety region the inversion refuses") {
    PuiseuxSeries S(10);
    CHECK_THROWS(S.invert_quartic(1.0, 10.0, 1.0));
    CHECK_THROWS(S.invert_quartic(0.0, 1.0, 0.1));
}

TEST_CASE("perturbed inversion: exact cubic is inverted exactly") {
    PerturbedInverter inv;
    inv.theta0 = 0.0;
    inv.x0 = 0.0;
    inv.a3 = 2.0;
    inv.fourth_bound = 1e-12;
    auto theta = [](double x) { return 2.0 * x * x * x; };
    double target = 2.0 * 0.001;
    auto r = inv.invert(theta, target);
    CHECK(r.dx == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("perturbed inversion agrees with the quartic series on x^3 + x^4") {
    PerturbedInverter inv;
    inv.theta0 = 0.0;
    inv.x0 = 0.0;
    inv.a3 = 1.0;
    inv.fourth_bound = 24.0;
    PuiseuxSeries S(40);
    auto theta = [](double x) { return x * x * x + x * x * x * x; };
    // the shared region: inside the window C1 a3^4/L^3 and small enough that
    // the certified remainder allows a 1e-10 match
    for (double tv : {1e-9, 3e-9, 1e-8}) {
        REQUIRE(std::abs(tv) < inv.window_radius());
        auto r = inv.invert(theta, tv);
        double series = S.invert_quartic(1.0, 1.0, tv);
        CHECK(r.remainder_bound <= 1e-9);
        CHECK(std::abs(r.dx - series) <= std::max(1e-10, r.remainder_bound));
    }
}

TEST_CASE("perturbed inversion remainder is uniform over the window for a quintic") {
    PerturbedInverter inv;
    inv.theta0 = 0.0;
    inv.x0 = 0.0;
    inv.a3 = 1.0;
    auto theta = [](double x) { return x * x * x + 0.5 * x * x * x * x + 0.3 * x * x * x * x * x; };
    // fourth derivative bound on |x| <= 0.2: 12 + 72*0.3*0.2
    inv.fourth_bound = 12.0 + 72.0 * 0.3 * 0.2;
    double worst = 0.0;
    for (int i = 1; i <= 40; ++i) {
        double x = 0.004 * i;  // stay inside the window
        double tv = theta(x);
        if (std::abs(tv) > inv.window_radius()) break;
        auto r = inv.invert(theta, tv);
        double ratio = std::abs(r.dx - x) / std::pow(std::abs(tv), 4.0 / 3.0);
        worst = std::max(worst, ratio);
    }
    CHECK(worst < 5.0);  // uniformly bounded normalized remainder
}
