#pragma once

#include <string>
#include <vector>

#include "pml/boundary_data.hpp"
#include "pml/grid_function.hpp"
#include "pml/mesh.hpp"
#include "pml/solver.hpp"

namespace pml {

struct PerturbationGap {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Quantitative data-perturbation estimate: lhs is the ordering gap
/// integral of (u_eps - u)(u_eps^m - u^m), rhs the closed-form bound
/// eps |domain| ((M+1) + (M+1)^m) valid when u <= M and u_eps solves data
/// lifted by eps.  Both sides are returned; the caller asserts the
/// inequality with whatever discretization slack applies.
PerturbationGap perturbation_gap(const GridFunction& u,
                                 const GridFunction& u_eps, double eps,
                                 double M, double m = 2.0);

struct LadderRung {
    double eps = 0.0;
    GridFunction lower;
    GridFunction upper;
    double sup_gap = 0.0;
    double gap_lhs = 0.0;
    double gap_rhs = 0.0;
};

struct PerturbationLadder {
    std::vector<LadderRung> rungs;
};

/// For each eps in the (strictly decreasing, nonnegative) sequence: solve
/// with the data shifted down by eps on the u-scale and clamped at 0, and
/// with that lower data lifted back up by eps.  The direct solution is
/// sandwiched between the two rung solutions, and the rung gap closes as
/// eps does.  Throws std::invalid_argument for an empty or non-decreasing
/// sequence; rung solve failures surface as std::runtime_error.
PerturbationLadder perron_ladder(const Cylinder& c, const BoundaryData& bd,
                                 const std::vector<double>& eps_sequence,
                                 const SolverConfig& cfg = {});

/// One row per rung: eps, sup_gap, gap_lhs, gap_rhs.
std::string ladder_csv(const PerturbationLadder& ladder);

/// Sup of |u - (prescribed value at xi)| over all lattice nodes within
/// box distance radius of the boundary node xi (distance measured as
/// max(|dx|, |dt|) in physical units).  xi must lie on the parabolic
/// boundary and radius must be positive.
double boundary_attainment(const GridFunction& u, const BoundaryData& bd,
                           double m, NodeIndex xi, double radius);

}  // namespace pml
