#include "preshock/puiseux.hpp"

#include <algorithm>
#include <numeric>

namespace preshock {

namespace {

using i128 = __int128;

i128 iabs(i128 v) { return v < 0 ? -v : v; }

i128 igcd(i128 a, i128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

struct Rat {
    i128 n = 0, d = 1;

    void reduce() {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        i128 g = igcd(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
    }
};

using u128 = unsigned __int128;

u128 umag(i128 v) { return v < 0 ? u128(-(v + 1)) + 1 : u128(v); }

// overflow-safe signed multiply (signed __int128 overflow is UB, so the
// magnitude check must happen before the product is formed)
bool checked_mul(i128 a, i128 b, i128& out) {
    if (a == 0 || b == 0) {
        out = 0;
        return true;
    }
    const u128 lim = (~u128(0)) >> 1;  // max signed magnitude
    u128 ua = umag(a), ub = umag(b);
    if (ua > lim / ub) return false;
    u128 r = ua * ub;
    bool neg = (a < 0) != (b < 0);
    out = neg ? -i128(r) : i128(r);
    return true;
}

bool checked_add(i128 a, i128 b, i128& out) {
    u128 r = u128(a) + u128(b);  // modular, well defined
    i128 res = static_cast<i128>(r);
    if ((a >= 0) == (b >= 0) && (res >= 0) != (a >= 0)) return false;
    out = res;
    return true;
}

bool rat_add(Rat& acc, const Rat& x) {
    // acc += x with overflow checking; reduce through the gcd of denominators
    i128 g = igcd(acc.d, x.d);
    i128 d1 = acc.d / g, d2 = x.d / g;
    i128 an, bn, ad, num;
    if (!checked_mul(acc.n, d2, an)) return false;
    if (!checked_mul(x.n, d1, bn)) return false;
    if (!checked_mul(acc.d, d2, ad)) return false;
    if (!checked_add(an, bn, num)) return false;
    acc = Rat{num, ad};
    acc.reduce();
    return true;
}

bool rat_mul(const Rat& a, const Rat& b, Rat& out) {
    // cross-reduce first to keep magnitudes down
    Rat x{a.n, b.d}, y{b.n, a.d};
    x.reduce();
    y.reduce();
    if (!checked_mul(x.n, y.n, out.n)) return false;
    if (!checked_mul(x.d, y.d, out.d)) return false;
    out.reduce();
    return true;
}

double rat_double(const Rat& r) {
    return static_cast<double>(r.n) / static_cast<double>(r.d);
}

}  // namespace

PuiseuxCoefficients puiseux_coefficients(int n_max) {
    if (n_max < 0) throw std::invalid_argument("puiseux_coefficients: n_max must be >= 0");
    PuiseuxCoefficients out;
    out.c.resize(n_max + 1);
    out.num.assign(n_max + 1, 0);
    out.den.assign(n_max + 1, 1);

    std::vector<Rat> cr(n_max + 1);
    cr[0] = Rat{1, 1};
    out.c[0] = 1.0;
    out.num[0] = 1;
    out.den[0] = 1;
    out.exact_up_to = 0;

    bool exact = true;
    for (int n = 1; n <= n_max; ++n) {
        if (exact) {
            Rat acc{0, 1};
            bool ok = true;
            // quartic term: sum over k1+k2+k3+k4 = n-1
            for (int k1 = 0; k1 <= n - 1 && ok; ++k1) {
                for (int k2 = 0; k2 <= n - 1 - k1 && ok; ++k2) {
                    for (int k3 = 0; k3 <= n - 1 - k1 - k2 && ok; ++k3) {
                        int k4 = n - 1 - k1 - k2 - k3;
                        Rat p, q;
                        ok = rat_mul(cr[k1], cr[k2], p) && rat_mul(p, cr[k3], q) &&
                             rat_mul(q, cr[k4], p) && rat_add(acc, p);
                    }
                }
            }
            // cubic term: -(1/3) sum over m1+m2+m3 = n, m_i <= n-1
            for (int m1 = 0; m1 <= std::min(n - 1, n) && ok; ++m1) {
                for (int m2 = 0; m2 <= n - m1 && ok; ++m2) {
                    int m3 = n - m1 - m2;
                    if (m2 > n - 1 || m3 > n - 1 || m3 < 0) continue;
                    Rat p, q;
                    ok = rat_mul(cr[m1], cr[m2], p) && rat_mul(p, cr[m3], q);
                    if (ok) {
                        Rat scaled;
                        ok = rat_mul(q, Rat{-1, 3}, scaled) && rat_add(acc, scaled);
                    }
                }
            }
            if (ok) {
                cr[n] = acc;
                out.c[n] = rat_double(acc);
                constexpr i128 kLL = std::numeric_limits<long long>::max();
                if (iabs(acc.n) <= kLL && acc.d <= kLL) {
                    out.num[n] = static_cast<long long>(acc.n);
                    out.den[n] = static_cast<long long>(acc.d);
                }
                out.exact_up_to = n;
                continue;
            }
            exact = false;
            out.overflowed = true;
        }
        // floating fallback
        double acc = 0.0;
        for (int k1 = 0; k1 <= n - 1; ++k1)
            for (int k2 = 0; k2 <= n - 1 - k1; ++k2)
                for (int k3 = 0; k3 <= n - 1 - k1 - k2; ++k3)
                    acc += out.c[k1] * out.c[k2] * out.c[k3] * out.c[n - 1 - k1 - k2 - k3];
        for (int m1 = 0; m1 <= n - 1; ++m1)
            for (int m2 = 0; m2 <= n - m1; ++m2) {
                int m3 = n - m1 - m2;
                if (m2 > n - 1 || m3 > n - 1 || m3 < 0) continue;
                acc -= out.c[m1] * out.c[m2] * out.c[m3] / 3.0;
            }
        out.c[n] = acc;
    }
    return out;
}

PuiseuxSeries::PuiseuxSeries(int order) : coeffs(puiseux_coefficients(order)) {
    // ratio test on the series coefficients |c_n / 3^n| in u
    double est = 0.0;
    int count = 0;
    for (int n = std::max(2, order - 6); n < order; ++n) {
        double an = std::abs(coeffs.c[n]) / std::pow(3.0, n);
        double an1 = std::abs(coeffs.c[n + 1]) / std::pow(3.0, n + 1);
        if (an1 > 0.0) {
            est += an / an1;
            ++count;
        }
    }
    radius_est = (count > 0) ? est / count : 0.45;
}

double PuiseuxSeries::eval_normalized(double u) const {
    // sum (-1)^n c_n/3^n u^{n+1}, Horner in u
    const int N = coeffs.order();
    double acc = 0.0;
    for (int n = N; n >= 0; --n) {
        double coef = coeffs.c[n] / std::pow(3.0, n) * ((n % 2 == 0) ? 1.0 : -1.0);
        acc = coef + u * acc;
    }
    return u * acc;
}

bool PuiseuxSeries::in_safety_region(double a3, double a4, double x) const {
    if (a3 == 0.0) return false;
    double r = 0.5 * radius_est * radius_est * radius_est;
    return std::abs(a4 * a4 * a4 * x) < r * a3 * a3 * a3 * a3;
}

double PuiseuxSeries::invert_quartic(double a3, double a4, double x) const {
    if (a3 == 0.0) throw std::invalid_argument("invert_quartic: a3 must be nonzero");
    if (a4 == 0.0) return std::cbrt(x / a3);
    if (!in_safety_region(a3, a4, x))
        throw std::runtime_error(
            "invert_quartic: x outside the safety region |a4^3 x| < (1/2) R^3 a3^4");
    const double a3_13 = std::cbrt(a3);
    const double u = a4 * std::cbrt(x) / (a3_13 * a3_13 * a3_13 * a3_13);
    return a3 / a4 * eval_normalized(u);
}

}  // namespace preshock
