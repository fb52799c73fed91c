#include "pml/barenblatt.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pml/quadrature.hpp"

namespace pml {

namespace {

void check_params(const BarenblattParams& p) {
    std::ostringstream err;
    if (!(p.m > 1.0))
        err << "Barenblatt: need m > 1, got " << p.m;
    else if (p.n_dim < 1)
        err << "Barenblatt: need n_dim >= 1, got " << p.n_dim;
    else if (!(p.C > 0.0))
        err << "Barenblatt: need C > 0, got " << p.C;
    if (!err.str().empty()) throw std::invalid_argument(err.str());
}

double profile_coefficient(const BarenblattParams& p) {
    double lam = lambda_exponent(p.m, p.n_dim);
    return lam * (p.m - 1.0) / (2.0 * p.m * p.n_dim);
}

}  // namespace

double lambda_exponent(double m, int n_dim) {
    if (!(m > 1.0) || n_dim < 1)
        throw std::invalid_argument("lambda_exponent: need m > 1 and n_dim >= 1");
    double n = n_dim;
    return n / (n * (m - 1.0) + 2.0);
}

double barenblatt(double r, double t, const BarenblattParams& p) {
    check_params(p);
    if (t <= 0.0) return 0.0;
    double lam = lambda_exponent(p.m, p.n_dim);
    double k = profile_coefficient(p);
    double y = std::abs(r) * std::pow(t, -lam / p.n_dim);
    double core = p.C - k * y * y;
    if (core <= 0.0) return 0.0;
    return std::pow(t, -lam) * std::pow(core, 1.0 / (p.m - 1.0));
}

double support_radius(const BarenblattParams& p, double t) {
    check_params(p);
    if (t <= 0.0) return 0.0;
    double lam = lambda_exponent(p.m, p.n_dim);
    return std::sqrt(p.C / profile_coefficient(p)) * std::pow(t, lam / p.n_dim);
}

double barenblatt_mass(const BarenblattParams& p, double t, double rel_tol) {
    check_params(p);
    if (t <= 0.0)
        throw std::invalid_argument("barenblatt_mass: need t > 0");
    double rt = support_radius(p, t);
    // surface area of the unit sphere in n dimensions
    double n = p.n_dim;
    double omega =
        2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
    auto radial = [&](double r) {
        return barenblatt(r, t, p) * std::pow(r, n - 1.0);
    };
    // The profile has a |.|^{1/(m-1)} kink at the free boundary r = rt; the
    // integrand is smooth inside, so integrating exactly up to rt keeps the
    // adaptive rule fast.
    QuadratureResult q = integrate(radial, 0.0, rt, 1e-15, rel_tol);
    return omega * q.value;
}

double SteadyState::operator()(double x) const {
    double v = a * x + b;
    return v <= 0.0 ? 0.0 : std::pow(v, 1.0 / m);
}

}  // namespace pml
