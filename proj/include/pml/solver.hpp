#pragma once

#include <string>
#include <vector>

#include "pml/boundary_data.hpp"
#include "pml/grid_function.hpp"
#include "pml/mesh.hpp"

namespace pml {

/// Physics and numerics knobs shared by all solves.  The scheme is backward
/// Euler with the 3-point second difference acting on phi(u); each step is a
/// damped Newton solve with a bisection-safeguarded nodewise fallback.
struct SolverConfig {
    double m = 2.0;    // diffusion exponent, > 1
    int n_reg = 0;     // phi_n regularization index; 0 = exact nonlinearity
    double c_lin = 0.0;  // phi_n core slope; 0 = RegularizedPhi default

    double newton_tol = 1e-11;  // sup-norm residual target per step
    int max_newton_iters = 60;
    double damping = 0.5;  // backtracking shrink factor, in (0, 1)
    double min_step_fraction = 1e-10;
};

struct SolveReport {
    std::vector<int> newton_iters;       // per time step
    std::vector<double> step_residuals;  // final sup-norm residual per step
    std::vector<double> mass_trace;      // per time level
    bool converged = true;
    std::string diagnostic;  // filled when converged is false
};

struct SolveResult {
    GridFunction u;
    SolveReport report;
};

/// Dirichlet problem with nonnegative data: at every level the interior
/// residual (u^{k+1} - u^k)/tau - D2 phi(u^{k+1}) is driven below
/// cfg.newton_tol, wall nodes carry u = g^{1/m}, and iterates are clamped to
/// the data range (maximum principle), so the output is nonnegative.
SolveResult solve_bvp(const Cylinder& c, const BoundaryData& bd,
                      const SolverConfig& cfg = {});

/// Sign-changing variant using phi_n in place of phi.  Requires
/// cfg.n_reg >= 1: the exact nonlinearity has phi'(0) = 0, which degenerates
/// the Newton system exactly where the solution changes sign.
SolveResult solve_signed(const Cylinder& c, const BoundaryData& bd,
                         const SolverConfig& cfg);

/// Obstacle variant: per step solves the complementarity system
/// min(w - psi, scheme residual) = 0, so w >= psi, the residual is >= 0
/// everywhere and vanishes where w stays above the obstacle.  The boundary
/// data must dominate psi on the parabolic boundary.
SolveResult solve_obstacle(const Cylinder& c, const GridFunction& psi,
                           const BoundaryData& bd, const SolverConfig& cfg = {});

/// Trapezoidal integral of u(., level) over the spatial mesh.
double mass(const GridFunction& u, int level);

/// Space-time trapezoidal quadrature of (u - v)(phi(u) - phi(v)); always
/// >= 0 since phi is increasing.  Throws on lattice mismatch.
double oleinik_gap(const GridFunction& u, const GridFunction& v, double m);

std::string solve_report_json(const SolveReport& r);

}  // namespace pml
