#include "preshock/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace preshock {

ExponentVector ExponentVector::defaults(double mu) {
    ExponentVector e;
    e.alpha = {0.0, 0.0, 2 * mu - 1, 3 * mu - 2, 4 * mu - 3, 5 * mu - 4};
    e.beta = {0.0, mu - 1, mu - 2, mu - 3, mu - 4, mu - 5};
    e.gamma = {0.0, mu, mu - 1, mu - 2, mu - 3, mu - 4};
    return e;
}

void ExponentVector::check(double mu) const {
    auto fail = [](const std::string& what) {
        throw std::invalid_argument("ExponentVector: " + what);
    };
    if (alpha[0] != 0.0 || beta[0] != 0.0 || gamma[0] != 0.0 || alpha[1] != 0.0)
        fail("alpha0 = beta0 = gamma0 = alpha1 = 0 required");
    if (beta[1] > 0.0) fail("beta1 <= 0 required");
    if (gamma[1] < mu) fail("gamma1 >= mu required");
    for (int j = 1; j <= 5; ++j) {
        if (beta[j] < mu - j) fail("beta_j >= mu - j required");
    }
    for (int j = 2; j <= 5; ++j) {
        if (alpha[j] < mu + 1 - j) fail("alpha_j >= mu + 1 - j required");
        if (gamma[j] < mu - j) fail("gamma_j >= mu - j required");
    }
    for (int j = 0; j <= 5; ++j) {
        if (alpha[j] > 1.0 || beta[j] > 1.0 || gamma[j] > 1.0) fail("exponents must be <= 1");
    }
}

Params::Params(double eps_, double mu_, int n) : eps(eps_), mu(mu_), n_grid(n) {
    exponents = ExponentVector::defaults(mu);
    validate();
}

void Params::validate() const {
    if (!(eps > 0.0)) throw std::invalid_argument("Params: eps must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("Params: mu must be positive");
    if (gamma_law != 2.0)
        throw std::invalid_argument("Params: only the adiabatic exponent 2 is supported");
    if (n_grid < 8 || n_grid % 2 != 0)
        throw std::invalid_argument("Params: n_grid must be even and >= 8");
    exponents.check(mu);
}

int Params::suggest_grid(double eps) {
    double target = 64.0 / std::pow(eps, 1.5);
    int n = 512;
    while (n < target && n < 16384) n *= 2;
    return n;
}

int StateField::first_degenerate_index() const {
    for (int i = 0; i < size(); ++i) {
        if (!(w[i] - z[i] > 0.0)) return i;
    }
    return -1;
}

}  // namespace preshock
