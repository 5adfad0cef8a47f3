#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "preshock/flow.hpp"
#include "preshock/solver.hpp"

namespace preshock {

struct FitLine {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms residual of the fit
};

struct ScalingCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct BlowupReport {
    double t_star = 0.0;
    double x_star = 0.0;
    double xi_star = 0.0;
    FitLine fit;                  // min eta_x vs t over the densified tail
    double t_stop = 0.0;
    double min_eta_x_stop = 0.0;
    double uniqueness_margin = 0.0;  // second local min minus global min at t_stop
    double eta_xx_at_star = 0.0;     // at t_stop, refined x*
    std::vector<ScalingCheck> checks;
    bool pass() const;
};

struct AnalysisConfig {
    int tail_points = 12;          // snapshots used for the tail fits
    double tail_eta_x = 0.35;      // only snapshots with min eta_x below this
    double scaling_slack = 10.0;   // C in |T*| <= C eps^{1+mu}, |x*| <= C eps^{2+mu}
    double window_frac = 1.0;      // fit window = window_frac * eps^2
    int fit_samples = 96;          // dense label samples across the window
    double cond_cap = 1e9;
    int holder_points_per_side = 24;
    double holder_decade = 10.0;   // ratio of largest to smallest fitted scale
};

/// Locate the pre-shock: T* from a linear fit of min eta_x over the densified
/// tail, x* and xi* from the tracked argmin curve. Throws on an ambiguous
/// blowup (non-monotone tail, bad fit, or competing minima).
BlowupReport detect_blowup(const Trajectory& traj, const AnalysisConfig& cfg = {});

struct EtaXStructure {
    double lower_c = 0.0;   // fitted c in the quadratic lower envelope
    double upper_C = 0.0;   // fitted C in the quadratic upper envelope
    double annulus_margin = 0.0;  // min eta_x / eps^{mu/2} on eps^2 <= |x| <= eps^{3/2}
    double eta_xx_rate_A = 0.0;   // |eta_xx(x*(t),t)| <= A eps^-2 (T*-t) fit
    bool pass() const { return lower_c > 0.0 && upper_C > 0.0 && annulus_margin > 0.0; }
};

EtaXStructure eta_x_structure_check(const Trajectory& traj, const BlowupReport& rep,
                                    const AnalysisConfig& cfg = {});

/// Taylor data of the composed fields about the blowup label, and the
/// fractional coefficients assembled from it.
struct CuspExpansion {
    double a3 = 0.0;  // eta'''(x*,T*)/6
    double a4 = 0.0;  // d^4 eta(x*,T*)/24
    double window_theta = 0.0;  // theta-radius of validity (~ eps^3)
    // Taylor coefficients B^f_0..4 for f in {w,z,k,a,vorticity} of f.eta at T*
    std::map<std::string, std::array<double, 5>> taylor;
    // fractional coefficients: w: (a0,a1,a2); z,k,a: (a0,a3,a4); vort: (a0,a3)
    std::map<std::string, std::array<double, 3>> frac;
    std::vector<ScalingCheck> checks;
};

CuspExpansion fit_cusp(const Trajectory& traj, const BlowupReport& rep,
                       const AnalysisConfig& cfg = {});

/// Assemble the fractional coefficients from Taylor data (the closed-form
/// combination used by fit_cusp; exposed for direct unit testing).
std::array<double, 3> frac_coeffs_w(double a3, double a4, const std::array<double, 5>& B);
std::array<double, 3> frac_coeffs_slow(double a3, double a4, const std::array<double, 5>& B);

struct ErrorProfile {
    std::string field;
    std::vector<double> theta;       // offsets from xi*
    std::vector<double> data;        // solver values (transport-corrected)
    std::vector<double> series;      // fractional-series reconstruction
    std::vector<double> normalized;  // |data - series| / remainder scale
    double max_normalized = 0.0;
    double max_raw = 0.0;
};

/// Reconstruct the fields from the fractional series on the cusp window and
/// compare against the final snapshot (transport-corrected in time).
std::vector<ErrorProfile> reconstruct_and_compare(const CuspExpansion& exp_,
                                                  const Trajectory& traj,
                                                  const BlowupReport& rep,
                                                  const AnalysisConfig& cfg = {});

struct HolderFit {
    double exponent_left = 0.0;
    double exponent_right = 0.0;
    double exponent = 0.0;  // fit-quality-weighted combination
    int points_left = 0, points_right = 0;
};

/// Log-log slope of |f(theta)-f_ref| vs |theta-theta_ref| over a decade of
/// scales inside the window, one-sided on each side. Generic sampled-curve
/// variant; f_ref must be the value at the reference point itself.
HolderFit holder_exponent(std::span<const double> theta, std::span<const double> values,
                          double theta_ref, double f_ref, double scale_hi, double decade,
                          int points_per_side);

/// Holder fit of w at the final snapshot through the parametric (eta, w.eta)
/// representation.
HolderFit holder_exponent_w(const Trajectory& traj, const BlowupReport& rep,
                            const AnalysisConfig& cfg = {});

/// Degree-`deg` least-squares polynomial fit of samples (x, y) about x0 on a
/// scaled basis; returns coefficients of (x-x0)^j. Exposed for tests.
std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, double x0,
                            double halfwidth, int deg);

}  // namespace preshock
