#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace preshock {

/// Coefficients c_0..c_n of the normalized inversion series
///   ybar(u) = sum_n (-1)^n (c_n / 3^n) u^{n+1},
/// where y = ybar(x^{1/3}) solves -x + y^3 + y^4 = 0. The recursion is
/// evaluated in exact rational arithmetic (128-bit, reduced) up to
/// rational_horizon(); beyond that it falls back to double accumulation and
/// flags the result.
struct PuiseuxCoefficients {
    std::vector<double> c;        // c_n as doubles (exact below the horizon)
    std::vector<long long> num;   // exact numerators while representable
    std::vector<long long> den;   // exact denominators (powers of 3)
    int exact_up_to = -1;         // last index computed exactly
    bool overflowed = false;

    int order() const { return static_cast<int>(c.size()) - 1; }
};

PuiseuxCoefficients puiseux_coefficients(int n_max);

/// How far the exact 128-bit rational path is guaranteed before overflow
/// checking may trip (the recursion is checked anyway).
constexpr int rational_horizon() { return 24; }

struct PuiseuxSeries {
    PuiseuxCoefficients coeffs;
    double radius_est = 0.0;  // ratio-test estimate for |c_n/3^n| in u

    explicit PuiseuxSeries(int order);

    /// Normalized series ybar(u), truncated at coefficient `order`.
    double eval_normalized(double u) const;

    /// Scaled inversion y(x) of -x + a3 y^3 + a4 y^4 = 0. Throws if x is
    /// outside the safety region |a4^3 x| < r * a3^4 with
    /// r = (1/2) radius_est^3.
    double invert_quartic(double a3, double a4, double x) const;

    bool in_safety_region(double a3, double a4, double x) const;
};

/// Perturbed C^{3,1} inversion. Given theta(x) = theta0 + a3 (x-x0)^3
/// + a4(x) (x-x0)^4 with ||d^4 theta|| <= L, returns x - x0 for a value of
/// theta, together with the remainder-scale certificate.
struct PerturbedInversion {
    double dx = 0.0;           // x - x0
    double a4_local = 0.0;     // a4 at the recovered point
    double remainder_bound = 0.0;
};

struct PerturbedInverter {
    double theta0 = 0.0;
    double x0 = 0.0;
    double a3 = 0.0;
    double fourth_bound = 0.0;  // L
    double c1 = 0.5;            // window constant (Theorem-style, configured)
    double c2 = 2.0;            // remainder constant (configured)

    /// theta must be callable as theta(x).
    template <class F>
    PerturbedInversion invert(const F& theta, double theta_value) const;

    double window_radius() const;
};

// --- implementation of the template ---

inline double PerturbedInverter::window_radius() const {
    double L3 = fourth_bound * fourth_bound * fourth_bound;
    if (L3 <= 0.0) return 1e300;
    return c1 * a3 * a3 * a3 * a3 / L3;
}

template <class F>
PerturbedInversion PerturbedInverter::invert(const F& theta, double theta_value) const {
    const double d = theta_value - theta0;
    if (std::abs(d) > window_radius())
        throw std::runtime_error("perturbed_invert: theta outside the inversion window");
    auto cbrt_signed = [](double v) { return std::cbrt(v); };
    const double a3_13 = cbrt_signed(a3);
    const double d13 = cbrt_signed(d);
    const double d23 = d13 * d13;

    PerturbedInversion out;
    double dx = d13 / a3_13;  // leading cube-root iterate
    double a4 = 0.0;
    for (int it = 0; it < 3; ++it) {
        // a4(x) = (theta(x) - theta0 - a3 dx^3) / dx^4 near the iterate;
        // falls back to 0 (certified |a4| <= L/24) when dx is too small.
        if (std::abs(dx) > 1e-9 * std::abs(d13 / a3_13 + 1e-300)) {
            double num = theta(x0 + dx) - theta0 - a3 * dx * dx * dx;
            a4 = num / (dx * dx * dx * dx);
            double cap = fourth_bound / 24.0 * 1.0000001;
            if (std::abs(a4) > cap) a4 = (a4 > 0 ? cap : -cap);
        }
        double a3_53 = std::pow(std::abs(a3), 5.0 / 3.0) * (a3 < 0 ? -1.0 : 1.0);
        dx = d13 / a3_13 - (1.0 / 3.0) * a4 / a3_53 * d23 + (1.0 / 3.0) * a4 * a4 / (a3 * a3 * a3) * d;
    }
    out.dx = dx;
    out.a4_local = a4;
    out.remainder_bound = c2 * std::abs(a4 * a4 * a4) /
                          std::pow(std::abs(a3), 13.0 / 3.0) * std::pow(std::abs(d), 4.0 / 3.0);
    return out;
}

}  // namespace preshock
