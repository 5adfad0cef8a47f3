#include "preshock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace preshock {

namespace {

double sq(double v) { return v * v; }

/// Least squares y = slope*(x - x1) + intercept, centered at the last node.
FitLine linear_fit(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    if (n < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const double xr = x[n - 1];
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double u = x[i] - xr;
        sx += u;
        sxx += u * u;
        sy += y[i];
        sxy += u * y[i];
    }
    double denom = n * sxx - sx * sx;
    FitLine f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;  // value at x = xr
    double ss = 0;
    for (size_t i = 0; i < n; ++i) ss += sq(y[i] - (f.intercept + f.slope * (x[i] - xr)));
    f.residual = std::sqrt(ss / n);
    return f;
}

struct TailPoint {
    int snap_index;
    double t;
    double min_eta_x;
    double x_star;   // refined argmin label
    double xi_star;  // eta at the argmin
    double eta_xx;   // label-spectral eta_xx at x_star
};

std::pair<double, double> refined_argmin(const SpectralGrid& grid, std::span<const double> f) {
    const int n = grid.size();
    int i0 = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
    double ym = f[(i0 - 1 + n) % n], y0 = f[i0], yp = f[(i0 + 1) % n];
    double denom = ym - 2.0 * y0 + yp;
    double frac = 0.0, val = y0;
    if (denom > 0.0) {
        frac = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
        val = y0 - 0.25 * (ym - yp) * frac;
    }
    double loc = grid.nodes()[i0] + frac * grid.dx();
    if (loc > std::numbers::pi) loc -= 2.0 * std::numbers::pi;
    return {loc, val};
}

std::vector<TailPoint> collect_tail(const Trajectory& traj, const AnalysisConfig& cfg) {
    SpectralGrid grid(traj.params.n_grid);
    std::vector<TailPoint> tail;
    for (int j = 0; j < static_cast<int>(traj.snapshots.size()); ++j) {
        const Snapshot& s = traj.snapshots[j];
        auto [loc, val] = refined_argmin(grid, s.flows.eta_x);
        if (val > cfg.tail_eta_x) continue;
        TailPoint p;
        p.snap_index = j;
        p.t = s.state.t;
        p.min_eta_x = val;
        p.x_star = loc;
        FineInterpolant disp = [&] {
            std::vector<double> d(grid.size());
            for (int i = 0; i < grid.size(); ++i) d[i] = s.flows.eta[i] - grid.nodes()[i];
            return grid.interpolant(d);
        }();
        p.xi_star = loc + disp(loc);
        FineInterpolant exx = grid.interpolant(grid.derivative(s.flows.eta_x));
        p.eta_xx = exx(loc);
        tail.push_back(p);
    }
    if (static_cast<int>(tail.size()) > cfg.tail_points) {
        tail.erase(tail.begin(), tail.end() - cfg.tail_points);
    }
    return tail;
}

}  // namespace

bool BlowupReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

BlowupReport detect_blowup(const Trajectory& traj, const AnalysisConfig& cfg) {
    if (traj.stop.reason == StopReason::EstimateViolation ||
        traj.stop.reason == StopReason::TimeCap) {
        throw std::runtime_error(std::string("detect_blowup: run did not stop cleanly (") +
                                 to_string(traj.stop.reason) + ")");
    }
    std::vector<TailPoint> tail = collect_tail(traj, cfg);
    if (tail.size() < 8)
        throw std::runtime_error("ambiguous blowup: fewer than 8 densified tail snapshots");
    for (size_t i = 1; i < tail.size(); ++i) {
        if (!(tail[i].min_eta_x < tail[i - 1].min_eta_x))
            throw std::runtime_error("ambiguous blowup: non-monotone min eta_x tail");
    }

    std::vector<double> ts, ms, xs, xis;
    for (const auto& p : tail) {
        ts.push_back(p.t);
        ms.push_back(p.min_eta_x);
        xs.push_back(p.x_star);
        xis.push_back(p.xi_star);
    }
    FitLine mfit = linear_fit(ts, ms);
    if (!(mfit.slope < 0.0)) throw std::runtime_error("ambiguous blowup: min eta_x not decreasing");
    double m_span = ms.front() - ms.back();
    if (mfit.residual > 0.05 * std::max(m_span, 1e-12))
        throw std::runtime_error("ambiguous blowup: tail fit residual above tolerance");

    BlowupReport rep;
    const double t_last = ts.back();
    rep.t_stop = t_last;
    rep.min_eta_x_stop = ms.back();
    rep.fit = mfit;
    rep.t_star = t_last - mfit.intercept / mfit.slope;
    if (!(rep.t_star > rep.t_stop))
        throw std::runtime_error("ambiguous blowup: extrapolated T* not beyond t_stop");

    FitLine xfit = linear_fit(ts, xs);
    FitLine xifit = linear_fit(ts, xis);
    rep.x_star = xfit.intercept + xfit.slope * (rep.t_star - t_last);
    rep.xi_star = xifit.intercept + xifit.slope * (rep.t_star - t_last);
    rep.eta_xx_at_star = tail.back().eta_xx;

    // uniqueness of the minimizing label at the final tail snapshot
    {
        const Snapshot& s = traj.snapshots[tail.back().snap_index];
        const auto& ex = s.flows.eta_x;
        const int n = static_cast<int>(ex.size());
        double global = 1e300, second = 1e300;
        for (int i = 0; i < n; ++i) {
            double l = ex[(i - 1 + n) % n], c = ex[i], r = ex[(i + 1) % n];
            if (c <= l && c <= r) {
                if (c < global) {
                    second = global;
                    global = c;
                } else {
                    second = std::min(second, c);
                }
            }
        }
        rep.uniqueness_margin = (second < 1e300) ? second - global : 1e300;
        if (!(rep.uniqueness_margin > 0.0))
            throw std::runtime_error("ambiguous blowup: competing minima of eta_x");
    }

    const double eps = traj.burgers ? 1.0 : traj.params.eps;
    const double mu = traj.params.mu;
    auto check = [&](const std::string& name, double value, double bound) {
        rep.checks.push_back({name, std::abs(value) <= bound, value, bound});
    };
    if (!traj.burgers) {
        check("t-star-scaling", rep.t_star, cfg.scaling_slack * std::pow(eps, 1.0 + mu));
        check("x-star-scaling", rep.x_star, cfg.scaling_slack * std::pow(eps, 2.0 + mu));
    }
    check("eta-xx-vanishing", rep.eta_xx_at_star,
          2.0 * cfg.scaling_slack * std::pow(eps, -2.0) * (rep.t_star - rep.t_stop));
    return rep;
}

EtaXStructure eta_x_structure_check(const Trajectory& traj, const BlowupReport& rep,
                                    const AnalysisConfig& cfg) {
    SpectralGrid grid(traj.params.n_grid);
    const double eps = traj.burgers ? 1.0 : traj.params.eps;
    const double window = traj.burgers ? 0.5 : eps * eps;
    const double t0 = traj.t0;

    EtaXStructure out;
    out.lower_c = 1e300;
    out.upper_C = 0.0;
    out.eta_xx_rate_A = 0.0;

    std::vector<TailPoint> tail = collect_tail(traj, cfg);
    if (tail.empty()) throw std::runtime_error("eta_x_structure_check: no tail snapshots");
    for (const auto& p : tail) {
        const Snapshot& s = traj.snapshots[p.snap_index];
        const double elapsed = (s.state.t - t0) + eps;  // (eps + t) in canonical time
        const double remain = rep.t_star - s.state.t;
        for (int i = 0; i < grid.size(); ++i) {
            double dxs = grid.nodes()[i] - p.x_star;
            if (std::abs(dxs) > window || std::abs(dxs) < 3.0 * grid.dx()) continue;
            double ex = s.flows.eta_x[i];
            double low = (ex - 0.5 / eps * remain) * std::pow(eps, 4.0) / (elapsed * sq(dxs));
            out.lower_c = std::min(out.lower_c, low);
            double up = (ex - 1.5 / eps * remain) * std::pow(eps, 3.0) / sq(dxs);
            out.upper_C = std::max(out.upper_C, up);
        }
        if (remain > 0.0) {
            out.eta_xx_rate_A =
                std::max(out.eta_xx_rate_A, std::abs(p.eta_xx) * sq(eps) / remain);
        }
    }
    out.upper_C = std::max(out.upper_C, 1e-12);

    // annulus lower bound eta_x >~ eps^{mu/2} on eps^2 <= |x - x*| <= eps^{3/2}
    const Snapshot& last = traj.snapshots[tail.back().snap_index];
    double annulus_min = 1e300;
    const double r_in = traj.burgers ? 0.5 : eps * eps;
    const double r_out = traj.burgers ? 1.5 : std::pow(eps, 1.5);
    for (int i = 0; i < grid.size(); ++i) {
        double dxs = std::abs(grid.nodes()[i] - tail.back().x_star);
        if (dxs < r_in || dxs > r_out) continue;
        annulus_min = std::min(annulus_min, last.flows.eta_x[i]);
    }
    out.annulus_margin =
        (annulus_min < 1e300) ? annulus_min / std::pow(eps, traj.params.mu / 2.0) : 1e300;
    return out;
}

std::vector<double> polyfit(std::span<const double> x, std::span<const double> y, double x0,
                            double halfwidth, int deg) {
    const int n = static_cast<int>(x.size());
    const int m = deg + 1;
    if (n < m) throw std::invalid_argument("polyfit: underdetermined");
    // normal equations on the scaled variable u = (x - x0)/halfwidth
    std::vector<long double> A(m * m, 0.0L), b(m, 0.0L);
    for (int s = 0; s < n; ++s) {
        long double u = (x[s] - x0) / halfwidth;
        long double pw[16];
        pw[0] = 1.0L;
        for (int j = 1; j < m; ++j) pw[j] = pw[j - 1] * u;
        for (int i = 0; i < m; ++i) {
            b[i] += pw[i] * y[s];
            for (int j = 0; j <= i; ++j) A[i * m + j] += pw[i] * pw[j];
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) A[i * m + j] = A[j * m + i];
    // Gaussian elimination with partial pivoting
    std::vector<int> piv(m);
    for (int i = 0; i < m; ++i) piv[i] = i;
    for (int col = 0; col < m; ++col) {
        int best = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs((double)A[r * m + col]) > std::abs((double)A[best * m + col])) best = r;
        if (best != col) {
            for (int j = 0; j < m; ++j) std::swap(A[col * m + j], A[best * m + j]);
            std::swap(b[col], b[best]);
        }
        long double d = A[col * m + col];
        if (d == 0.0L) throw std::runtime_error("polyfit: singular normal equations");
        for (int r = col + 1; r < m; ++r) {
            long double f = A[r * m + col] / d;
            for (int j = col; j < m; ++j) A[r * m + j] -= f * A[col * m + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> coef(m);
    for (int i = m - 1; i >= 0; --i) {
        long double acc = b[i];
        for (int j = i + 1; j < m; ++j) acc -= A[i * m + j] * coef[j];
        coef[i] = static_cast<double>(acc / A[i * m + i]);
    }
    // unscale: coefficient of (x-x0)^j
    for (int j = 0; j < m; ++j) coef[j] /= std::pow(halfwidth, j);
    return coef;
}

std::array<double, 3> frac_coeffs_w(double a3, double a4, const std::array<double, 5>& B) {
    const double a3_13 = std::cbrt(a3);
    const double a3_23 = a3_13 * a3_13;
    const double a3_53 = a3 * a3_23;
    return {B[0], B[1] / a3_13, B[2] / a3_23 - (1.0 / 3.0) * a4 * B[1] / a3_53};
}

std::array<double, 3> frac_coeffs_slow(double a3, double a4, const std::array<double, 5>& B) {
    const double a3_13 = std::cbrt(a3);
    const double a3_43 = a3 * a3_13;
    const double a3_73 = a3 * a3 * a3_13;
    return {B[0], B[3] / a3, B[4] / a3_43 - a4 * B[3] / a3_73};
}

namespace {

struct SnapshotFits {
    double t;
    std::vector<double> eta_coef;                       // degree 5 about x*(t)
    std::map<std::string, std::vector<double>> fields;  // degree 4 each
};

SnapshotFits fit_snapshot(const SpectralGrid& grid, const Snapshot& s, double x_center,
                          double halfwidth, int samples) {
    SnapshotFits out;
    out.t = s.state.t;
    std::vector<double> xq(samples);
    for (int q = 0; q < samples; ++q) {
        double c = std::cos(std::numbers::pi * (q + 0.5) / samples);
        xq[q] = x_center + halfwidth * c;
    }
    std::vector<double> disp(grid.size());
    for (int i = 0; i < grid.size(); ++i) disp[i] = s.flows.eta[i] - grid.nodes()[i];
    FineInterpolant Tdisp = grid.interpolant(disp);
    FineInterpolant Tw = grid.interpolant(s.flows.comp_w);
    FineInterpolant Tz = grid.interpolant(s.flows.comp_z);
    FineInterpolant Tk = grid.interpolant(s.flows.comp_k);
    FineInterpolant Ta = grid.interpolant(s.flows.comp_a);
    FineInterpolant Tda = grid.interpolant(grid.derivative(s.state.a));

    std::vector<double> eta_v(samples), wv(samples), zv(samples), kv(samples), av(samples),
        vort(samples);
    for (int q = 0; q < samples; ++q) {
        eta_v[q] = xq[q] + Tdisp(xq[q]);
        wv[q] = Tw(xq[q]);
        zv[q] = Tz(xq[q]);
        kv[q] = Tk(xq[q]);
        av[q] = Ta(xq[q]);
        double da = Tda(eta_v[q]);
        double c = 0.5 * (wv[q] - zv[q]);
        vort[q] = 4.0 * (wv[q] + zv[q] - da) / (c * c) * std::exp(kv[q]);
    }
    out.eta_coef = polyfit(xq, eta_v, x_center, halfwidth, 5);
    auto fit4 = [&](const std::vector<double>& v) { return polyfit(xq, v, x_center, halfwidth, 4); };
    out.fields["w"] = fit4(wv);
    out.fields["z"] = fit4(zv);
    out.fields["k"] = fit4(kv);
    out.fields["a"] = fit4(av);
    out.fields["vorticity"] = fit4(vort);
    return out;
}

double extrapolate_to(std::span<const double> t, std::span<const double> v, double t_target) {
    FitLine f = linear_fit(t, v);
    return f.intercept + f.slope * (t_target - t[t.size() - 1]);
}

}  // namespace

CuspExpansion fit_cusp(const Trajectory& traj, const BlowupReport& rep,
                       const AnalysisConfig& cfg) {
    SpectralGrid grid(traj.params.n_grid);
    const double eps = traj.burgers ? 1.0 : traj.params.eps;
    const double halfwidth = traj.burgers ? 0.5 : cfg.window_frac * eps * eps;
    if (halfwidth < 8.0 * grid.dx())
        throw std::runtime_error("fit_cusp: window smaller than 8 grid cells");

    std::vector<TailPoint> tail = collect_tail(traj, cfg);
    if (tail.size() < 4) throw std::runtime_error("fit_cusp: insufficient tail snapshots");

    std::vector<SnapshotFits> fits;
    for (const auto& p : tail) {
        fits.push_back(
            fit_snapshot(grid, traj.snapshots[p.snap_index], p.x_star, halfwidth, cfg.fit_samples));
    }

    CuspExpansion out;
    std::vector<double> ts;
    for (const auto& f : fits) ts.push_back(f.t);

    auto extrap_coef = [&](auto&& getter) {
        std::vector<double> v;
        for (const auto& f : fits) v.push_back(getter(f));
        return extrapolate_to(ts, v, rep.t_star);
    };
    out.a3 = extrap_coef([](const SnapshotFits& f) { return f.eta_coef[3]; });
    out.a4 = extrap_coef([](const SnapshotFits& f) { return f.eta_coef[4]; });
    for (const char* name : {"w", "z", "k", "a", "vorticity"}) {
        std::array<double, 5> B{};
        for (int j = 0; j <= 4; ++j) {
            B[j] = extrap_coef([&](const SnapshotFits& f) { return f.fields.at(name)[j]; });
        }
        out.taylor[name] = B;
    }
    out.window_theta = std::abs(out.a3) * std::pow(0.8 * halfwidth, 3.0);

    out.frac["w"] = frac_coeffs_w(out.a3, out.a4, out.taylor["w"]);
    out.frac["z"] = frac_coeffs_slow(out.a3, out.a4, out.taylor["z"]);
    out.frac["k"] = frac_coeffs_slow(out.a3, out.a4, out.taylor["k"]);
    out.frac["a"] = frac_coeffs_slow(out.a3, out.a4, out.taylor["a"]);
    out.frac["vorticity"] = {out.taylor["vorticity"][0], out.taylor["vorticity"][3] / out.a3, 0.0};

    auto check = [&](const std::string& name, bool pass, double value, double bound) {
        out.checks.push_back({name, pass, value, bound});
    };
    check("a3-positive", out.a3 > 0.0, out.a3, 0.0);
    double a3n = out.a3 * std::pow(eps, 3.0);
    check("a3-eps-scale", a3n > 1.0 / cfg.scaling_slack && a3n < cfg.scaling_slack, a3n,
          cfg.scaling_slack);
    // at T* the first and second Taylor coefficients of the slow fields vanish
    for (const char* name : {"z", "k", "a"}) {
        const auto& B = out.taylor[name];
        double edge3 = std::abs(B[3]) * std::pow(halfwidth, 3) + std::abs(B[4]) * std::pow(halfwidth, 4);
        double c1 = std::abs(B[1]) * halfwidth;
        double c2 = std::abs(B[2]) * halfwidth * halfwidth;
        double floor_ = 1e-10 * (std::abs(B[0]) + 1.0);
        check(std::string(name) + "-taylor-1-vanishes", c1 <= 0.5 * edge3 + floor_, c1,
              0.5 * edge3 + floor_);
        check(std::string(name) + "-taylor-2-vanishes", c2 <= 0.5 * edge3 + floor_, c2,
              0.5 * edge3 + floor_);
    }
    if (!traj.burgers) {
        const double mu = traj.params.mu;
        auto mag = [&](const std::string& f, int j) { return std::abs(out.frac[f][j]); };
        double s10 = cfg.scaling_slack;
        check("aw-magnitudes",
              mag("w", 0) <= s10 && mag("w", 1) <= s10 && mag("w", 2) <= s10,
              std::max({mag("w", 0), mag("w", 1), mag("w", 2)}), s10);
        double zb = s10 * std::pow(eps, mu - 1.0);
        check("az-magnitudes", mag("z", 1) <= zb && mag("z", 2) <= zb,
              std::max(mag("z", 1), mag("z", 2)), zb);
        check("ak-magnitude", mag("k", 1) <= s10 * std::pow(eps, mu), mag("k", 1),
              s10 * std::pow(eps, mu));
        check("aa-magnitudes",
              mag("a", 0) <= s10 && mag("a", 1) <= s10 && mag("a", 2) <= s10,
              std::max({mag("a", 0), mag("a", 1), mag("a", 2)}), s10);
    }
    return out;
}

std::vector<ErrorProfile> reconstruct_and_compare(const CuspExpansion& exp_,
                                                  const Trajectory& traj, const BlowupReport& rep,
                                                  const AnalysisConfig& cfg) {
    SpectralGrid grid(traj.params.n_grid);
    const Snapshot& s = traj.last();
    const double eps = traj.burgers ? 1.0 : traj.params.eps;
    const double mu = traj.params.mu;
    const double s_gap = rep.t_star - s.state.t;
    const double halfwidth = traj.burgers ? 0.5 : cfg.window_frac * eps * eps;
    if (halfwidth < 8.0 * grid.dx())
        throw std::runtime_error("reconstruct_and_compare: window smaller than 8 grid cells");

    std::vector<double> disp(grid.size());
    for (int i = 0; i < grid.size(); ++i) disp[i] = s.flows.eta[i] - grid.nodes()[i];
    FineInterpolant Tdisp = grid.interpolant(disp);
    FineInterpolant Tw = grid.interpolant(s.flows.comp_w);
    FineInterpolant Tz = grid.interpolant(s.flows.comp_z);
    FineInterpolant Tk = grid.interpolant(s.flows.comp_k);
    FineInterpolant Ta = grid.interpolant(s.flows.comp_a);

    auto [xs_now, mval] = refined_argmin(grid, s.flows.eta_x);
    (void)mval;

    const int M = 160;
    struct FieldSpec {
        const char* name;
        int speed;  // 3: lambda3, 1: lambda1, 2: lambda2
        double scale_pow_eps;
        double scale_pow_theta;
    };
    const double kexp = std::min(traj.params.exponents.gamma[2], mu) - 1.0;
    std::vector<FieldSpec> fields = {{"w", 3, -1.0, 1.0},
                                     {"z", 1, mu - 2.0, 5.0 / 3.0},
                                     {"k", 2, kexp, 5.0 / 3.0},
                                     {"a", 2, -1.0, 5.0 / 3.0}};

    std::vector<ErrorProfile> out;
    for (const auto& fs : fields) {
        ErrorProfile prof;
        prof.field = fs.name;
        for (int q = 0; q < M; ++q) {
            double xq = xs_now + halfwidth * 0.9 * (2.0 * (q + 0.5) / M - 1.0);
            double theta_now = xq + Tdisp(xq);
            double wv = Tw(xq), zv = Tz(xq);
            double lam;
            if (fs.speed == 3) lam = wv + zv / 3.0;
            else if (fs.speed == 1) lam = wv / 3.0 + zv;
            else lam = 2.0 / 3.0 * (wv + zv);
            double theta_corr = theta_now + lam * s_gap;  // transported to T*
            double delta = theta_corr - rep.xi_star;
            if (std::abs(delta) > exp_.window_theta) continue;
            if (std::abs(delta) < 0.02 * exp_.window_theta) continue;

            double value;
            if (fs.name == std::string("w")) value = wv;
            else if (fs.name == std::string("z")) value = zv;
            else if (fs.name == std::string("k")) value = Tk(xq);
            else value = Ta(xq);

            const auto& A = exp_.frac.at(fs.name);
            double d13 = std::cbrt(delta);
            double series;
            if (fs.name == std::string("w")) {
                series = A[0] + A[1] * d13 + A[2] * d13 * d13;
            } else {
                series = A[0] + A[1] * delta + A[2] * d13 * d13 * d13 * d13;
            }
            double raw = std::abs(value - series);
            double scale = std::pow(eps, fs.scale_pow_eps) * std::pow(std::abs(delta), fs.scale_pow_theta);
            prof.theta.push_back(delta);
            prof.data.push_back(value);
            prof.series.push_back(series);
            prof.normalized.push_back(raw / scale);
            prof.max_raw = std::max(prof.max_raw, raw);
            prof.max_normalized = std::max(prof.max_normalized, raw / scale);
        }
        out.push_back(std::move(prof));
    }
    return out;
}

HolderFit holder_exponent(std::span<const double> theta, std::span<const double> values,
                          double theta_ref, double f_ref, double scale_hi, double decade,
                          int points_per_side) {
    const double lo = scale_hi / decade;
    HolderFit out;
    for (int side = 0; side < 2; ++side) {
        std::vector<double> lx, ly;
        for (int m = 0; m < points_per_side; ++m) {
            double target = scale_hi * std::pow(decade, -static_cast<double>(m) / (points_per_side - 1));
            // nearest sample on this side
            double bd = 1e300;
            int bi = -1;
            for (size_t i = 0; i < theta.size(); ++i) {
                double d = theta[i] - theta_ref;
                if ((side == 0 && d >= 0) || (side == 1 && d <= 0)) continue;
                double ad = std::abs(std::abs(d) - target);
                if (ad < bd) {
                    bd = ad;
                    bi = static_cast<int>(i);
                }
            }
            if (bi < 0) continue;
            double d = std::abs(theta[bi] - theta_ref);
            if (d < 0.5 * lo || d > 2.0 * scale_hi) continue;
            double dv = std::abs(values[bi] - f_ref);
            if (dv <= 0.0) continue;
            lx.push_back(std::log(d));
            ly.push_back(std::log(dv));
        }
        // deduplicate consecutive identical abscissae
        std::vector<double> ux, uy;
        for (size_t i = 0; i < lx.size(); ++i) {
            if (!ux.empty() && std::abs(lx[i] - ux.back()) < 1e-12) continue;
            ux.push_back(lx[i]);
            uy.push_back(ly[i]);
        }
        if (static_cast<int>(ux.size()) < 10)
            throw std::runtime_error("holder_exponent: fewer than 10 usable points per side");
        FitLine f = linear_fit(ux, uy);
        if (side == 0) {
            out.exponent_left = f.slope;
            out.points_left = static_cast<int>(ux.size());
        } else {
            out.exponent_right = f.slope;
            out.points_right = static_cast<int>(ux.size());
        }
    }
    out.exponent = 0.5 * (out.exponent_left + out.exponent_right);
    return out;
}

HolderFit holder_exponent_w(const Trajectory& traj, const BlowupReport& rep,
                            const AnalysisConfig& cfg) {
    SpectralGrid grid(traj.params.n_grid);
    const Snapshot& s = traj.last();
    const double eps = traj.burgers ? 1.0 : traj.params.eps;
    const double halfwidth = traj.burgers ? 0.5 : cfg.window_frac * eps * eps;

    auto [x_now, mval] = refined_argmin(grid, s.flows.eta_x);
    (void)mval;
    std::vector<double> dispv(grid.size());
    for (int i = 0; i < grid.size(); ++i) dispv[i] = s.flows.eta[i] - grid.nodes()[i];
    FineInterpolant Tdisp = grid.interpolant(dispv);
    FineInterpolant Tw = grid.interpolant(s.flows.comp_w);

    const double theta_ref = x_now + Tdisp(x_now);
    const double f_ref = Tw(x_now);
    // parametric samples on dense labels across the window
    const int M = 4096;
    std::vector<double> th(M), vals(M);
    for (int q = 0; q < M; ++q) {
        double xq = x_now + halfwidth * (2.0 * (q + 0.5) / M - 1.0);
        th[q] = xq + Tdisp(xq);
        vals[q] = Tw(xq);
    }
    double scale_hi = 0.5 * std::min(std::abs(th.back() - theta_ref), std::abs(th.front() - theta_ref));
    return holder_exponent(th, vals, theta_ref, f_ref, scale_hi, cfg.holder_decade,
                           cfg.holder_points_per_side);
}

}  // namespace preshock
