#pragma once

namespace pml {

/// Parameters of the source-type self-similar solution in n_dim dimensions.
/// C is the free constant of the profile (it fixes the total mass).
struct BarenblattParams {
    double m = 2.0;
    int n_dim = 1;
    double C = 1.0;
};

/// Similarity exponent lambda = n / (n(m-1) + 2).
double lambda_exponent(double m, int n_dim);

/// Radial value at |x| = r:
///   t^{-lambda} (C - [lambda(m-1)/(2mn)] r^2 t^{-2 lambda/n})_+^{1/(m-1)}
/// for t > 0, and 0 for t <= 0 (the solution is extended by zero backwards
/// in time).
double barenblatt(double r, double t, const BarenblattParams& p);

/// Radius of the support at time t > 0; 0 for t <= 0 (empty support).
double support_radius(const BarenblattParams& p, double t);

/// Total mass at time t > 0 by adaptive quadrature over the support (radial
/// weight in n_dim dimensions).  Self-similarity makes the value
/// t-independent; exposing t lets tests check exactly that.  Throws
/// std::invalid_argument for t <= 0.
double barenblatt_mass(const BarenblattParams& p, double t = 1.0,
                       double rel_tol = 1e-12);

/// Stationary profile x -> (a x + b)_+^{1/m}: its m-th power is affine, so
/// it solves the equation with zero time derivative.
struct SteadyState {
    double a = 0.0;
    double b = 1.0;
    double m = 2.0;
    double operator()(double x) const;
};

}  // namespace pml
