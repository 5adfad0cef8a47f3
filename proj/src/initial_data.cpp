#include "preshock/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "preshock/euler.hpp"

namespace preshock {

namespace {

constexpr double kPi = std::numbers::pi;

// C^6 plateau cutoff: 1 for |u| <= r1, 0 for |u| >= r2, 13th-degree
// smoothstep in between. Polynomial transition keeps the Fourier tail
// algebraic (k^-7) rather than the stretched-exponential of bump functions,
// which is what the solver grids are sized for.
double smoothstep6(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double u7 = std::pow(u, 7);
    return u7 * (1716.0 +
                 u * (-9009.0 +
                      u * (20020.0 + u * (-24024.0 + u * (16380.0 + u * (-6006.0 + u * 924.0))))));
}

double plateau(double u, double r1, double r2) {
    u = std::abs(u);
    if (u <= r1) return 1.0;
    if (u >= r2) return 0.0;
    return smoothstep6((r2 - u) / (r2 - r1));
}

// 20-point Gauss-Legendre on [a, b]; exact for the polynomial pieces below.
double gauss20(double a, double b, auto&& f) {
    static const double xs[10] = {0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
                                  0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
                                  0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
                                  0.9931285991850949};
    static const double ws[10] = {0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
                                  0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
                                  0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
                                  0.0176140071391521};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
        acc += ws[i] * (f(mid + half * xs[i]) + f(mid - half * xs[i]));
    }
    return acc * half;
}

// Well profile pieces, in the scaled coordinate X = x / eps^{3/2}. The
// transition widths are generous: the C^6 smoothstep tails decay like
// (k * width)^-7 and the grid sizing assumes they clear the 2/3-rule cutoff.
constexpr double kCurvOn = 1.35, kCurvOff = 2.30;  // support of V'' = -kappa m
constexpr double kCutOn = 1.30, kCutOff = 2.70;    // outer cutoff chi

double curvature_mask(double X) { return plateau(X, kCurvOn, kCurvOff); }

// V(X) = 1 - kappa * int_0^|X| (|X|-Y) m(Y) dY: exact parabola 1-(kappa/2)X^2
// on the core, concave through |X| ~ kCurvOff, then linear decay.
double well_shape(double X, double kappa) {
    X = std::abs(X);
    double integral;
    if (X <= kCurvOn) {
        integral = 0.5 * X * X;
    } else {
        integral = X * kCurvOn - 0.5 * kCurvOn * kCurvOn;
        double hi = std::min(X, kCurvOff);
        integral += gauss20(kCurvOn, hi, [&](double y) { return (X - y) * curvature_mask(y); });
    }
    return 1.0 - kappa * integral;
}

std::vector<double> trig_seed(const SpectralGrid& grid, double amp, int mode, double phase) {
    std::vector<double> f(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        f[i] = amp * std::cos(mode * grid.nodes()[i] + phase);
    }
    return f;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Oversampled {
    SpectralGrid fine;
    std::vector<double> f, d1, d2, d3, d4, d5;
};

Oversampled derivatives_on_fine(const SpectralGrid& grid, std::span<const double> f, int factor) {
    SpectralGrid fine(grid.size() * factor);
    Spectrum s = grid.analyze(f);
    Spectrum sf;
    sf.n_grid = fine.size();
    sf.c.assign(fine.size() / 2 + 1, 0.0);
    for (int k = 0; k <= s.max_mode(); ++k) sf.c[k] = s.c[k];
    Oversampled out{std::move(fine), {}, {}, {}, {}, {}, {}};
    out.f = out.fine.synthesize(sf);
    out.d1 = out.fine.derivative(out.f, 1);
    out.d2 = out.fine.derivative(out.f, 2);
    out.d3 = out.fine.derivative(out.f, 3);
    out.d4 = out.fine.derivative(out.f, 4);
    out.d5 = out.fine.derivative(out.f, 5);
    return out;
}

}  // namespace

void DataSpec::validate() const {
    params.validate();
    if (w_bar < 0.5 || w_bar > 2.0) throw std::invalid_argument("DataSpec: w_bar must be in [1/2, 2]");
    if (z_seed < 0 || k_seed < 0 || a_seed < 0 || well_kappa <= 0)
        throw std::invalid_argument("DataSpec: amplitudes must be nonnegative");
}

bool ValidationReport::valid() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " margin=" << c.margin;
        if (c.location != 0.0) os << " at " << c.location;
        os << "\n";
    }
    return os.str();
}

const ConstraintCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

StateField build_canonical(const DataSpec& spec) {
    spec.validate();
    const Params& P = spec.params;
    const double eps = P.eps;
    const double scale = std::pow(eps, 1.5);
    SpectralGrid grid(P.n_grid);

    // w0' = -(1/eps) chi(X) V(X) plus a far-side bump enforcing zero mean.
    std::vector<double> w0p(grid.size(), 0.0);
    for (int i = 0; i < grid.size(); ++i) {
        const double X = grid.nodes()[i] / scale;
        if (std::abs(X) < kCutOff) {
            w0p[i] = -(1.0 / eps) * plateau(X, kCutOn, kCutOff) * well_shape(X, spec.well_kappa);
        }
    }
    std::vector<double> bump(grid.size());
    double bump_sum = 0.0, well_sum = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double th = grid.nodes()[i];
        const double d = kPi - std::abs(th);  // distance to the antipode
        bump[i] = plateau(d, 0.1, 0.9);
        bump_sum += bump[i];
        well_sum += w0p[i];
    }
    const double beta = -well_sum / bump_sum;
    for (int i = 0; i < grid.size(); ++i) w0p[i] += beta * bump[i];

    // Gaussian mollification sized to the 2/3-rule cutoff: the spectrum is
    // pulled below ~1e-9 at k = N/3 so the truncated profile carries no
    // ringing into the derivative windows. The parabolic core of the well is
    // invariant under the convolution (quadratic + constant), so the
    // curvature normalization survives; the minimum value is re-pinned below.
    const int kd = P.n_grid / 3;
    {
        const double sigma = 6.5 / kd;
        Spectrum s = grid.analyze(w0p);
        for (int k = 0; k <= s.max_mode(); ++k) {
            s.c[k] *= std::exp(-0.5 * (k * sigma) * (k * sigma));
        }
        w0p = grid.synthesize(s);
    }
    w0p = grid.truncated(w0p, kd);

    StateField data;
    data.t = -eps;
    data.w = grid.antiderivative(w0p, spec.w_bar);
    const int m_zk = std::max(1, static_cast<int>(std::lround(0.4 / eps)));
    const int m_a = std::max(1, static_cast<int>(std::lround(0.4 * std::pow(eps, P.mu - 1.0))));
    data.z = trig_seed(grid, spec.z_seed * std::pow(eps, P.mu), m_zk, spec.z_phase);
    data.k = trig_seed(grid, spec.k_seed * std::pow(eps, P.mu + 1.0), m_zk, spec.k_phase);
    data.a = trig_seed(grid, spec.a_seed * eps, m_a, spec.a_phase);

    if (spec.rng_seed != 0) {
        data = perturb(data, 1e-6 * eps, spec.rng_seed);
    }
    renormalize_min(data, P);

    ValidationReport report = validate(data, P);
    if (!report.valid()) {
        throw std::runtime_error("build_canonical: constructed data failed validation\n" +
                                 report.summary());
    }
    return data;
}

ValidationReport validate(const StateField& data, const Params& params) {
    const double eps = params.eps;
    SpectralGrid grid(static_cast<int>(data.w.size()));
    ValidationReport rep;
    auto push = [&](const std::string& name, bool pass, double margin, double loc = 0.0) {
        rep.checks.push_back({name, pass, margin, loc});
    };

    Oversampled w = derivatives_on_fine(grid, data.w, 4);
    const auto& th = w.fine.nodes();
    const int nf = w.fine.size();
    const double core = std::pow(eps, 1.5);

    // w0 ~ 1
    double wmin = *std::min_element(w.f.begin(), w.f.end());
    double wmax = *std::max_element(w.f.begin(), w.f.end());
    push("w0-order-one", wmin > 0.25 && wmax < 4.0, std::min(wmin - 0.25, 4.0 - wmax));

    // w0'(0) = -1/eps, attained only at the origin
    const double target = -1.0 / eps;
    double v0 = w.d1[nf / 2];
    push("w0p-min-value", std::abs(v0 - target) * eps <= 1e-8, 1e-8 - std::abs(v0 - target) * eps);

    int argmin = static_cast<int>(std::min_element(w.d1.begin(), w.d1.end()) - w.d1.begin());
    push("w0p-min-at-origin", std::abs(th[argmin]) <= 2.0 * grid.dx(),
         2.0 * grid.dx() - std::abs(th[argmin]), th[argmin]);

    // strict bound |w0'| < 1/eps away from the origin, margin eps^{mu/2-1} off the core
    double worst_margin = 1e300;
    double worst_loc = 0.0;
    for (int i = 0; i < nf; ++i) {
        if (std::abs(th[i]) < core) continue;
        double m = (w.d1[i] - target) * std::pow(eps, 1.0 - params.mu / 2.0);
        if (m < worst_margin) {
            worst_margin = m;
            worst_loc = th[i];
        }
    }
    push("w0p-margin-off-core", worst_margin > 0.0, worst_margin, worst_loc);

    // w0''' ~ eps^-4 (two-sided) on the core
    double c3min = 1e300, c3max = -1e300;
    for (int i = 0; i < nf; ++i) {
        if (std::abs(th[i]) > core) continue;
        double v = w.d3[i] * std::pow(eps, 4.0);
        c3min = std::min(c3min, v);
        c3max = std::max(c3max, v);
    }
    push("w0ppp-core-two-sided", c3min >= 0.05 && c3max <= 20.0,
         std::min(c3min - 0.05, 20.0 - c3max));

    // |d^4 w0| <~ eps^{mu-5} for |x| <= eps^2
    double d4max = 0.0, d4loc = 0.0;
    for (int i = 0; i < nf; ++i) {
        if (std::abs(th[i]) <= eps * eps && std::abs(w.d4[i]) > d4max) {
            d4max = std::abs(w.d4[i]);
            d4loc = th[i];
        }
    }
    const double d4bound = std::pow(eps, params.mu - 5.0);
    push("w0pppp-near-origin", d4max <= d4bound, (d4bound - d4max) / d4bound, d4loc);

    // ||d^5 w0|| <~ eps^-7
    double d5max = max_abs(w.d5);
    const double d5bound = 600.0 * std::pow(eps, -7.0);
    push("w0-5th-derivative", d5max <= d5bound, (d5bound - d5max) / d5bound);

    // consequences: w0''(0) = 0 and ||w0''|| <~ eps^{-5/2}
    push("w0pp-origin-zero", std::abs(w.d2[nf / 2]) <= 1e-6 * std::pow(eps, -2.0),
         1e-6 * std::pow(eps, -2.0) - std::abs(w.d2[nf / 2]));
    double d2max = max_abs(w.d2);
    const double d2bound = 8.0 * std::pow(eps, -2.5);
    push("w0pp-sup", d2max <= d2bound, (d2bound - d2max) / d2bound);

    // derivative bounds on z0, k0, a0 per the exponent vector
    auto field_bounds = [&](const char* tag, std::span<const double> f,
                            const std::array<double, 6>& expo) {
        Oversampled o = derivatives_on_fine(grid, f, 4);
        const std::vector<double>* ds[6] = {&o.f, &o.d1, &o.d2, &o.d3, &o.d4, &o.d5};
        for (int j = 0; j <= 5; ++j) {
            double norm = max_abs(*ds[j]);
            double bound = 4.0 * std::pow(eps, expo[j]);
            push(std::string(tag) + "-d" + std::to_string(j), norm <= bound,
                 (bound - norm) / bound);
        }
    };
    field_bounds("z0", data.z, params.exponents.beta);
    field_bounds("k0", data.k, params.exponents.gamma);
    field_bounds("a0", data.a, params.exponents.alpha);

    // max z0 < min w0
    double zmax = *std::max_element(data.z.begin(), data.z.end());
    push("max-z0-below-min-w0", zmax < wmin, wmin - zmax);

    return rep;
}

StateField perturb(const StateField& data, double amplitude, unsigned long long seed) {
    if (amplitude < 0.0) throw std::invalid_argument("perturb: amplitude must be >= 0");
    StateField out = data;
    if (amplitude == 0.0) return out;
    SpectralGrid grid(data.size());
    std::vector<double>* fields[4] = {&out.w, &out.z, &out.k, &out.a};
    for (int f = 0; f < 4; ++f) {
        std::vector<double> noise =
            random_band_limited(grid, 8, amplitude, seed * 4 + static_cast<unsigned>(f) + 1);
        for (int i = 0; i < data.size(); ++i) (*fields[f])[i] += noise[i];
    }
    return out;
}

Renormalization renormalize_min(StateField& data, const Params& params) {
    SpectralGrid grid(data.size());
    std::vector<double> w1 = grid.derivative(data.w);

    // sub-grid argmin through a local parabola
    int i0 = static_cast<int>(std::min_element(w1.begin(), w1.end()) - w1.begin());
    const int n = grid.size();
    double ym = w1[(i0 - 1 + n) % n], y0 = w1[i0], yp = w1[(i0 + 1) % n];
    double denom = ym - 2.0 * y0 + yp;
    double frac = (denom != 0.0) ? 0.5 * (ym - yp) / denom : 0.0;
    double theta_star = grid.nodes()[i0] + frac * grid.dx();

    Renormalization r;
    r.shift = theta_star;
    std::vector<double>* fields[4] = {&data.w, &data.z, &data.k, &data.a};
    for (auto* f : fields) *f = grid.shifted(*f, -theta_star);

    // Newton-polish the offset on the shifted profile, then rescale by the
    // (fields, time) scaling symmetry so min w' = -1/eps exactly.
    w1 = grid.derivative(data.w);
    Spectrum s1 = grid.analyze(w1);
    Spectrum s2 = grid.analyze(grid.derivative(data.w, 2));
    Spectrum s3 = grid.analyze(grid.derivative(data.w, 3));
    double dt0 = 0.0;
    for (int it = 0; it < 3; ++it) {
        double g = SpectralGrid::eval_direct(s2, dt0);
        double h = SpectralGrid::eval_direct(s3, dt0);
        if (h == 0.0) break;
        dt0 -= g / h;
    }
    if (std::abs(dt0) < grid.dx()) {
        for (auto* f : fields) *f = grid.shifted(*f, -dt0);
        r.shift += dt0;
        w1 = grid.derivative(data.w);
        s1 = grid.analyze(w1);
    }
    double vmin = SpectralGrid::eval_direct(s1, 0.0);
    if (!(vmin < 0.0)) throw std::runtime_error("renormalize_min: w' not negative at its minimum");
    r.scale = (1.0 / params.eps) / (-vmin);
    for (auto* f : fields) {
        for (double& v : *f) v *= r.scale;
    }
    return r;
}

void save_state(const std::string& csv_path, const std::string& json_path,
                const StateField& data, const Params& params) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("save_state: cannot open " + csv_path);
    SpectralGrid grid(data.size());
    csv << "theta,w,z,k,a\n";
    csv.precision(17);
    for (int i = 0; i < data.size(); ++i) {
        csv << grid.nodes()[i] << ',' << data.w[i] << ',' << data.z[i] << ',' << data.k[i] << ','
            << data.a[i] << '\n';
    }
    nlohmann::json j;
    j["schema"] = "preshock-data-v1";
    j["t"] = data.t;
    j["eps"] = params.eps;
    j["mu"] = params.mu;
    j["gamma"] = params.gamma_law;
    j["n_grid"] = params.n_grid;
    j["alpha"] = params.exponents.alpha;
    j["beta"] = params.exponents.beta;
    j["gamma_exp"] = params.exponents.gamma;
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("save_state: cannot open " + json_path);
    js << j.dump(2) << '\n';
}

std::pair<StateField, Params> load_state(const std::string& csv_path,
                                         const std::string& json_path) {
    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("load_state: cannot open " + json_path);
    nlohmann::json j;
    js >> j;
    Params p;
    p.eps = j.at("eps").get<double>();
    p.mu = j.at("mu").get<double>();
    p.gamma_law = j.at("gamma").get<double>();
    p.n_grid = j.at("n_grid").get<int>();
    p.exponents.alpha = j.at("alpha").get<std::array<double, 6>>();
    p.exponents.beta = j.at("beta").get<std::array<double, 6>>();
    p.exponents.gamma = j.at("gamma_exp").get<std::array<double, 6>>();
    p.validate();

    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("load_state: cannot open " + csv_path);
    StateField data;
    data.t = j.at("t").get<double>();
    std::string line;
    std::getline(csv, line);  // header
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string tok;
        double vals[5];
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(is, tok, ',')) throw std::runtime_error("load_state: bad CSV row");
            vals[c] = std::stod(tok);
        }
        data.w.push_back(vals[1]);
        data.z.push_back(vals[2]);
        data.k.push_back(vals[3]);
        data.a.push_back(vals[4]);
    }
    if (data.size() != p.n_grid)
        throw std::runtime_error("load_state: CSV row count does not match n_grid");
    return {std::move(data), p};
}

}  // namespace preshock
