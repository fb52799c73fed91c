#include "pml/nonlinearity.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pml {

double signed_power(double s, double p) {
    return s < 0 ? -std::pow(-s, p) : std::pow(s, p);
}

double phi(double s, double m) { return std::pow(std::abs(s), m - 1.0) * s; }

double phi_prime(double s, double m) { return m * std::pow(std::abs(s), m - 1.0); }

double phi_inverse(double y, double m) { return signed_power(y, 1.0 / m); }

double phi_primitive(double s, double m) {
    return std::pow(std::abs(s), m + 1.0) / (m + 1.0);
}

double RegularizedPhi::default_core_slope(double m) {
    return 0.5 * (1.0 + std::max(0.0, 2.0 - m));
}

namespace {

// Solves the 6x6 Vandermonde-with-derivatives system for the monomial
// coefficients of the bridge polynomial p on tau in [0,1] given endpoint
// values/slopes/curvatures (slopes and curvatures already scaled to tau).
std::array<double, 6> hermite_quintic(double v0, double d0, double a0, double v1,
                                      double d1, double a1) {
    double A[6][7] = {};
    auto row = [&](int r, double tau, int order, double rhs) {
        for (int k = 0; k < 6; ++k) {
            double c = 1.0;
            int p = k;
            for (int d = 0; d < order; ++d) c *= p--;
            A[r][k] = p >= 0 ? c * std::pow(tau, p) : 0.0;
        }
        A[r][6] = rhs;
    };
    row(0, 0.0, 0, v0);
    row(1, 0.0, 1, d0);
    row(2, 0.0, 2, a0);
    row(3, 1.0, 0, v1);
    row(4, 1.0, 1, d1);
    row(5, 1.0, 2, a1);
    for (int col = 0; col < 6; ++col) {
        int piv = col;
        for (int r = col + 1; r < 6; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        for (int k = 0; k < 7; ++k) std::swap(A[col][k], A[piv][k]);
        for (int r = 0; r < 6; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int k = col; k < 7; ++k) A[r][k] -= f * A[col][k];
        }
    }
    std::array<double, 6> q;
    for (int k = 0; k < 6; ++k) q[k] = A[k][6] / A[k][k];
    return q;
}

}  // namespace

RegularizedPhi::RegularizedPhi(double m, int n_reg, double c_lin)
    : m_(m), c_(c_lin), n_(n_reg) {
    if (!(m > 1.0) || !std::isfinite(m))
        throw std::invalid_argument("RegularizedPhi: exponent must satisfy m > 1");
    if (n_reg < 1)
        throw std::invalid_argument("RegularizedPhi: regularization index must be >= 1");
    if (c_ == 0.0) c_ = default_core_slope(m);
    if (!(c_ > 0.0))
        throw std::invalid_argument("RegularizedPhi: core slope must be positive");

    // tau = 2(s - 1/2) on the bridge, so slopes in s carry a factor 1/2 and
    // curvatures a factor 1/4 when expressed in tau.
    blend_ = hermite_quintic(0.5 * c_, 0.5 * c_, 0.0, 1.0, 0.5 * m_,
                             0.25 * m_ * (m_ - 1.0));

    constexpr int kSamples = 4096;
    for (int i = 0; i <= kSamples; ++i) {
        double tau = static_cast<double>(i) / kSamples;
        double dp = 0.0;
        for (int k = 1; k < 6; ++k) dp += k * blend_[k] * std::pow(tau, k - 1);
        if (!(dp > 0.0)) {
            std::ostringstream err;
            err << "RegularizedPhi: c_lin = " << c_ << " makes the bridge "
                << "non-monotone at s = " << 0.5 + 0.5 * tau << " for m = " << m_
                << " (the mean bridge slope is 2 - c_lin, so large c_lin cannot "
                << "stay increasing); the default " << default_core_slope(m_)
                << " is safe";
            throw std::invalid_argument(err.str());
        }
    }
}

double RegularizedPhi::phi1(double y) const {
    if (y <= 0.5) return c_ * y;
    if (y >= 1.0) return std::pow(y, m_);
    double tau = 2.0 * (y - 0.5);
    double p = 0.0;
    for (int k = 5; k >= 0; --k) p = p * tau + blend_[k];
    return p;
}

double RegularizedPhi::phi1_prime(double y) const {
    if (y <= 0.5) return c_;
    if (y >= 1.0) return m_ * std::pow(y, m_ - 1.0);
    double tau = 2.0 * (y - 0.5);
    double dp = 0.0;
    for (int k = 5; k >= 1; --k) dp = dp * tau + k * blend_[k];
    return 2.0 * dp;
}

double RegularizedPhi::psi1(double y) const {
    if (y <= 0.5) return 0.5 * c_ * y * y;
    // int_0^{1/2} c s ds + (1/2) int_0^tau p, by the change of variable.
    double tau = 2.0 * (std::min(y, 1.0) - 0.5);
    double q = 0.0;
    for (int k = 5; k >= 0; --k) q = (q + blend_[k] / (k + 1)) * tau;
    return 0.125 * c_ + 0.5 * q;
}

double RegularizedPhi::value(double s) const {
    double a = std::abs(s);
    if (a >= 1.0 / n_) return phi(s, m_);
    double v = std::pow(n_, -m_) * phi1(n_ * a);
    return s < 0 ? -v : v;
}

double RegularizedPhi::derivative(double s) const {
    double a = std::abs(s);
    if (a >= 1.0 / n_) return phi_prime(s, m_);
    return std::pow(n_, 1.0 - m_) * phi1_prime(n_ * a);
}

double RegularizedPhi::primitive(double s) const {
    double a = std::abs(s);
    double scale = std::pow(n_, -m_ - 1.0);
    if (a <= 1.0 / n_) return scale * psi1(n_ * a);
    // Psi_n(1/n) plus the exact power tail.
    return scale * psi1(1.0) +
           (std::pow(a, m_ + 1.0) - std::pow(1.0 / n_, m_ + 1.0)) / (m_ + 1.0);
}

}  // namespace pml
