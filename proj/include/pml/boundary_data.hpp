#pragma once

#include <utility>
#include <vector>

#include "pml/grid_function.hpp"
#include "pml/mesh.hpp"
#include "pml/nonlinearity.hpp"

namespace pml {

/// Dirichlet data for the cylinder problem.  The initial slice lives on the
/// u scale; the lateral columns prescribe u^m (the wall condition is
/// u^m = g, so solvers impose u = g^{1/m} there).  lateral_*[0] duplicates
/// the corner for compatibility checking and is otherwise unused.
struct BoundaryData {
    std::vector<double> initial;        // size n_nodes
    std::vector<double> lateral_left;   // size n_levels, phi scale
    std::vector<double> lateral_right;  // size n_levels, phi scale
    double compatibility_tol = 1e-9;
};

/// Samples u0(x) (u scale) and g(x, t) (phi scale, evaluated at the walls).
template <class FU0, class FG>
BoundaryData boundary_from_functions(const Cylinder& c, FU0&& u0, FG&& g) {
    BoundaryData bd;
    bd.initial.resize(c.space.n_nodes());
    for (int i = 0; i <= c.space.n_cells; ++i)
        bd.initial[static_cast<std::size_t>(i)] = u0(c.space.node(i));
    bd.lateral_left.resize(c.time.n_levels());
    bd.lateral_right.resize(c.time.n_levels());
    for (int k = 0; k <= c.time.n_steps; ++k) {
        double t = c.time.level(k);
        bd.lateral_left[static_cast<std::size_t>(k)] = g(c.space.a, t);
        bd.lateral_right[static_cast<std::size_t>(k)] = g(c.space.b, t);
    }
    return bd;
}

/// Data carried by an existing grid function: its level-0 slice and the
/// phi(u) values along the two walls.
BoundaryData trace_data(const GridFunction& u, double m);

/// Size match, finiteness, corner compatibility |g^{1/m} - u0| <= tol at
/// both corners, and (for the nonnegative problem) sign constraints.
/// Throws std::invalid_argument with the offending detail.
void validate_boundary_data(const Cylinder& c, const BoundaryData& bd, double m,
                            bool require_nonnegative);

/// {min, max} of the prescribed data on the u scale.
std::pair<double, double> data_bounds(const BoundaryData& bd, double m);

}  // namespace pml
