#pragma once

#include <string>
#include <vector>

#include "pml/grid_function.hpp"
#include "pml/mesh.hpp"
#include "pml/solver.hpp"

namespace pml {

/// One full pass over the members, as recorded in the convergence history.
struct SweepRecord {
    int sweep = 0;
    double sup_change = 0.0;
    double min_iterate = 0.0;
    double max_iterate = 0.0;
};

/// Alternating-method state.  `data` lives on the ambient lattice and is read
/// only at the union's parabolic boundary nodes; `iterate` equals `data` there
/// and is advanced on the computed nodes.  Nodes outside the union stay 0.
struct SchwarzState {
    CylinderUnion domain;
    GridFunction data;
    GridFunction iterate;
    int sweeps_done = 0;
    std::vector<SweepRecord> history;
};

struct SchwarzResult {
    GridFunction u;
    bool converged = false;
    std::vector<SweepRecord> history;
};

/// Discrete subsolution attached to the prescribed values: per time level the
/// stationary profile through the slice's wall data, then the running minimum
/// in time, then the minimum with each column's entry value held constant.
/// Kinks of the envelope can still poke above the parabolic operator, so a
/// final lowering pass pushes every computed node back to residual <= 0 and
/// the result is verified nodewise before it is returned.  Equals the data on
/// the parabolic boundary; throws std::logic_error if verification fails.
GridFunction initial_subsolution(const CylinderUnion& k, const GridFunction& bd,
                                 const SolverConfig& cfg = {});

/// Start a fresh iteration at the initial subsolution.
SchwarzState make_schwarz_state(const CylinderUnion& k, const GridFunction& bd,
                                const SolverConfig& cfg = {});

/// One sweep over the members in index order.  Each member is solved with its
/// boundary values read from the current iterate and the result written to
/// the nodes that member computes.  The sequence must not decrease: a drop
/// beyond the solver's tolerance slack throws std::logic_error, a member
/// solve that fails to converge throws std::runtime_error naming the member.
void schwarz_sweep(SchwarzState& state, const SolverConfig& cfg = {});

/// Sweep until the sup-norm change over one full sweep falls below sweep_tol.
/// A run that exhausts max_sweeps returns converged = false with the partial
/// iterate and its history intact.
SchwarzResult schwarz_solve(const CylinderUnion& k, const GridFunction& bd,
                            const SolverConfig& cfg = {},
                            double sweep_tol = 1e-10, int max_sweeps = 200);

std::string schwarz_history_json(const SchwarzResult& r);

}  // namespace pml
