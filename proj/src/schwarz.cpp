#include "pml/schwarz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "pml/boundary_data.hpp"
#include "pml/nonlinearity.hpp"

namespace pml {

namespace {

// Same nonlinearity switch as the solver uses, plus an inverse: closed form
// for the pure power, bisection inside the regularized core.
struct Fn {
    double m;
    std::optional<RegularizedPhi> reg;

    Fn(const SolverConfig& cfg) : m(cfg.m) {
        if (cfg.n_reg >= 1) reg.emplace(cfg.m, cfg.n_reg, cfg.c_lin);
    }
    double value(double s) const { return reg ? reg->value(s) : phi(s, m); }
    double inverse(double y) const {
        if (!reg) return phi_inverse(y, m);
        double lo = 0.0, hi = std::max(1.0, phi_inverse(std::abs(y), m) * 2 + 1);
        if (y < 0) return -inverse(-y);
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1 + hi); ++it) {
            double mid = 0.5 * (lo + hi);
            (value(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

double residual_at(const GridFunction& v, int i, int k, const Fn& fn) {
    const Cylinder& c = v.domain();
    double h = c.space.spacing();
    double tau = c.time.dt();
    double lap = fn.value(v(i - 1, k)) - 2 * fn.value(v(i, k)) + fn.value(v(i + 1, k));
    return (v(i, k) - v(i, k - 1)) / tau - lap / (h * h);
}

// Lower v(i,k) until the residual there is nonpositive.  The residual grows
// strictly in the node value and is nonpositive at 0 for nonnegative
// neighbors, so the root sits in [0, current].
void lower_to_root(GridFunction& v, int i, int k, const Fn& fn) {
    double lo = 0.0, hi = v(i, k);
    for (int it = 0; it < 200 && hi - lo > 0; ++it) {
        double mid = 0.5 * (lo + hi);
        v(i, k) = mid;
        (residual_at(v, i, k, fn) > 0 ? hi : lo) = mid;
    }
    v(i, k) = lo;
}

bool is_computed(const CylinderUnion& u, int i, int k) {
    NodeClass c = u.node_class(i, k);
    return c == NodeClass::interior || c == NodeClass::final_slice;
}

void check_data(const CylinderUnion& u, const GridFunction& bd) {
    if (!same_lattice(bd, GridFunction(u.ambient())))
        throw std::invalid_argument("schwarz: data lattice differs from the ambient cylinder");
    ParabolicBoundarySet b = union_parabolic_boundary(u);
    auto inspect = [&](const NodeIndex& n) {
        double val = bd(n.ix, n.it);
        if (!std::isfinite(val))
            throw std::invalid_argument("schwarz: non-finite boundary value");
        if (val < 0)
            throw std::invalid_argument("schwarz: negative boundary value");
    };
    for (const auto& n : b.initial_nodes) inspect(n);
    for (const auto& n : b.lateral_nodes) inspect(n);
}

}  // namespace

GridFunction initial_subsolution(const CylinderUnion& k, const GridFunction& bd,
                                 const SolverConfig& cfg) {
    check_data(k, bd);
    Fn fn(cfg);
    const Cylinder& amb = k.ambient();
    int nx = amb.space.n_cells, nt = amb.time.n_steps;

    // stationary profile per level: the nonlinearity of the envelope is
    // affine across each maximal run of union nodes, matching the run's
    // endpoint data (endpoints are always prescribed nodes)
    GridFunction stat(amb, 0.0);
    for (int t = 0; t <= nt; ++t) {
        int i = 0;
        while (i <= nx) {
            if (!k.contains(i, t)) { ++i; continue; }
            int lo = i;
            while (i + 1 <= nx && k.contains(i + 1, t)) ++i;
            int hi = i;
            double flo = fn.value(bd(lo, t));
            double fhi = fn.value(bd(hi, t));
            for (int j = lo; j <= hi; ++j) {
                double w = (hi == lo) ? 0.0 : double(j - lo) / (hi - lo);
                stat(j, t) = fn.inverse(flo + (fhi - flo) * w);
            }
            ++i;
        }
    }

    // running minimum down each column, capped by the column's entry value
    GridFunction v(amb, 0.0);
    for (int i = 0; i <= nx; ++i) {
        double runmin = std::numeric_limits<double>::infinity();
        double entry = 0.0;
        for (int t = 0; t <= nt; ++t) {
            if (!k.contains(i, t)) {
                runmin = std::numeric_limits<double>::infinity();
                continue;
            }
            if (t == 0 || !k.contains(i, t - 1)) entry = bd(i, t);
            runmin = std::min(runmin, stat(i, t));
            v(i, t) = std::min(runmin, entry);
        }
    }

    // prescribed nodes carry the data itself; the envelope never exceeds it
    // there, so this only raises values, which relaxes neighboring residuals
    ParabolicBoundarySet b = union_parabolic_boundary(k);
    for (const auto& n : b.initial_nodes) v(n.ix, n.it) = bd(n.ix, n.it);
    for (const auto& n : b.lateral_nodes) v(n.ix, n.it) = bd(n.ix, n.it);

    // the envelope is nonincreasing in time but its spatial kinks can violate
    // the operator sign; sweep and lower until every computed node is clean
    const Cylinder& c = amb;
    double scale = (1 + fn.value(1 + v.max_value())) *
                   (1.0 / (c.space.spacing() * c.space.spacing()) + 1.0 / c.time.dt());
    double tol = 1e-12 * scale;
    for (int pass = 0; pass < 10000; ++pass) {
        bool changed = false;
        for (int t = 1; t <= nt; ++t)
            for (int i = 1; i < nx; ++i) {
                if (!is_computed(k, i, t)) continue;
                if (residual_at(v, i, t, fn) > tol) {
                    lower_to_root(v, i, t, fn);
                    changed = true;
                }
            }
        if (!changed) break;
        if (pass == 9999)
            throw std::logic_error("initial_subsolution: lowering pass did not settle");
    }
    for (int t = 1; t <= nt; ++t)
        for (int i = 1; i < nx; ++i)
            if (is_computed(k, i, t) && residual_at(v, i, t, fn) > 10 * tol)
                throw std::logic_error("initial_subsolution: residual positive after repair");
    return v;
}

SchwarzState make_schwarz_state(const CylinderUnion& k, const GridFunction& bd,
                                const SolverConfig& cfg) {
    SchwarzState s{k, bd, initial_subsolution(k, bd, cfg)};
    return s;
}

void schwarz_sweep(SchwarzState& state, const SolverConfig& cfg) {
    const CylinderUnion& u = state.domain;
    double slack = 1e4 * cfg.newton_tol * (1 + state.iterate.max_value());
    for (std::size_t mi = 0; mi < u.members().size(); ++mi) {
        const IndexBox& box = u.members()[mi];
        Cylinder mc = u.member_cylinder(mi);

        BoundaryData bdm;
        bdm.initial.resize(mc.space.n_cells + 1);
        for (int i = 0; i <= mc.space.n_cells; ++i)
            bdm.initial[i] = state.iterate(box.ix_lo + i, box.it_lo);
        bdm.lateral_left.resize(mc.time.n_steps + 1);
        bdm.lateral_right.resize(mc.time.n_steps + 1);
        Fn fn(cfg);
        for (int t = 0; t <= mc.time.n_steps; ++t) {
            bdm.lateral_left[t] = fn.value(state.iterate(box.ix_lo, box.it_lo + t));
            bdm.lateral_right[t] = fn.value(state.iterate(box.ix_hi, box.it_lo + t));
        }

        SolveResult r = solve_bvp(mc, bdm, cfg);
        if (!r.report.converged)
            throw std::runtime_error("schwarz_sweep: member " + std::to_string(mi) +
                                     " failed: " + r.report.diagnostic);

        for (int t = 1; t <= mc.time.n_steps; ++t)
            for (int i = 1; i < mc.space.n_cells; ++i) {
                double& cur = state.iterate(box.ix_lo + i, box.it_lo + t);
                double next = r.u(i, t);
                if (next < cur - slack)
                    throw std::logic_error(
                        "schwarz_sweep: member " + std::to_string(mi) +
                        " lowered a node by " + std::to_string(cur - next));
                cur = std::max(cur, next);
            }
    }
    ++state.sweeps_done;
}

SchwarzResult schwarz_solve(const CylinderUnion& k, const GridFunction& bd,
                            const SolverConfig& cfg, double sweep_tol,
                            int max_sweeps) {
    SchwarzState state = make_schwarz_state(k, bd, cfg);
    bool converged = false;
    for (int sweep = 1; sweep <= max_sweeps && !converged; ++sweep) {
        GridFunction before = state.iterate;
        schwarz_sweep(state, cfg);
        double change = sup_distance(before, state.iterate);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int t = 0; t <= k.ambient().time.n_steps; ++t)
            for (int i = 0; i <= k.ambient().space.n_cells; ++i)
                if (k.contains(i, t)) {
                    lo = std::min(lo, state.iterate(i, t));
                    hi = std::max(hi, state.iterate(i, t));
                }
        state.history.push_back({sweep, change, lo, hi});
        converged = change < sweep_tol;
    }
    return {std::move(state.iterate), converged, std::move(state.history)};
}

std::string schwarz_history_json(const SchwarzResult& r) {
    nlohmann::json j;
    j["converged"] = r.converged;
    j["sweeps"] = nlohmann::json::array();
    for (const auto& rec : r.history)
        j["sweeps"].push_back({{"sweep", rec.sweep},
                               {"sup_change", rec.sup_change},
                               {"min_iterate", rec.min_iterate},
                               {"max_iterate", rec.max_iterate}});
    return j.dump(2);
}

}  // namespace pml
