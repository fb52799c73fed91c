#pragma once

#include <functional>

namespace pml {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // accumulated estimate, always >= 0
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod 7/15 integration of f over [a, b].  Subintervals
/// are bisected until the embedded error estimate meets
/// max(abs_tol, rel_tol * |value|) or max_depth is reached.  Intended for the
/// smooth (piecewise, after splitting at known kinks) integrands used as
/// oracles here; it is not a general-purpose improper-integral routine.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-13,
                           double rel_tol = 1e-11, int max_depth = 30);

}  // namespace pml
