#pragma once

#include <array>

namespace pml {

/// sign(s) |s|^p
double signed_power(double s, double p);

/// The equation's nonlinearity phi(s) = |s|^{m-1} s, strictly increasing and
/// odd.  m > 1 throughout (degenerate diffusion).
double phi(double s, double m);

/// d/ds phi = m |s|^{m-1}; vanishes at s = 0, which is what makes the
/// problem degenerate.
double phi_prime(double s, double m);

/// Inverse of phi, i.e. sign(y) |y|^{1/m}.
double phi_inverse(double y, double m);

/// Primitive of the exact nonlinearity: |s|^{m+1}/(m+1).
double phi_primitive(double s, double m);

/// Smooth uniformly-elliptic replacement phi_n for phi.
///
/// The scale-1 profile phi_1 equals c_lin*s on [0, 1/2], equals phi on
/// [1, inf) and bridges the gap with the unique quintic matching value and
/// two derivatives at both knots; the family is then phi_n(s) =
/// n^{-m} phi_1(n s), odd in s, so phi_n == phi for |s| >= 1/n and
/// phi_n'(0) = c_lin * n^{1-m} > 0.  The quintic bridge is only monotone for
/// suitable c_lin; construction samples the bridge densely and rejects a
/// c_lin that produces a nonpositive slope anywhere.
class RegularizedPhi {
  public:
    /// c_lin = 0 picks default_core_slope(m).  Throws std::invalid_argument
    /// for m <= 1, n_reg < 1, or a c_lin that breaks monotonicity.
    RegularizedPhi(double m, int n_reg, double c_lin = 0.0);

    double exponent() const { return m_; }
    int index() const { return n_; }
    double core_slope() const { return c_; }

    double value(double s) const;
    double derivative(double s) const;
    /// Primitive from 0, i.e. the even function Psi_n(s) = int_0^s phi_n.
    double primitive(double s) const;

    /// Largest slope that keeps the bridge increasing for every m in (1, 5],
    /// namely (1 + (2 - m)_+)/2.
    static double default_core_slope(double m);

  private:
    double phi1(double y) const;        // y in [0, 1]
    double phi1_prime(double y) const;  // y in [0, 1]
    double psi1(double y) const;        // int_0^y phi_1, y in [0, 1]

    double m_;
    double c_;
    int n_;
    std::array<double, 6> blend_{};  // monomial coefficients on tau in [0,1]
};

}  // namespace pml
