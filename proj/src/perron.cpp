#include "pml/perron.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pml/nonlinearity.hpp"

namespace pml {

namespace {

double cylinder_volume(const Cylinder& c) {
    return (c.space.b - c.space.a) * (c.time.t_end - c.time.t_begin);
}

double bound_rhs(double eps, double volume, double M, double m) {
    return eps * volume * ((M + 1.0) + std::pow(M + 1.0, m));
}

/// Data shifted down by eps on the u scale and clamped at 0.  Shifting both
/// corner values through the same 1-Lipschitz map keeps the compatibility
/// mismatch within the original tolerance.
BoundaryData shift_down(const BoundaryData& bd, double eps, double m) {
    BoundaryData out = bd;
    for (double& v : out.initial) v = std::max(v - eps, 0.0);
    for (double& g : out.lateral_left)
        g = phi(std::max(phi_inverse(g, m) - eps, 0.0), m);
    for (double& g : out.lateral_right)
        g = phi(std::max(phi_inverse(g, m) - eps, 0.0), m);
    return out;
}

BoundaryData lift_up(const BoundaryData& bd, double eps, double m) {
    BoundaryData out = bd;
    for (double& v : out.initial) v += eps;
    for (double& g : out.lateral_left) g = phi(phi_inverse(g, m) + eps, m);
    for (double& g : out.lateral_right) g = phi(phi_inverse(g, m) + eps, m);
    return out;
}

GridFunction solve_or_throw(const Cylinder& c, const BoundaryData& bd,
                            const SolverConfig& cfg, double eps,
                            const char* which) {
    SolveResult r = solve_bvp(c, bd, cfg);
    if (!r.report.converged)
        throw std::runtime_error("perron_ladder: " + std::string(which) +
                                 " solve at eps = " + std::to_string(eps) +
                                 " failed: " + r.report.diagnostic);
    return std::move(r.u);
}

}  // namespace

PerturbationGap perturbation_gap(const GridFunction& u,
                                 const GridFunction& u_eps, double eps,
                                 double M, double m) {
    if (!(eps >= 0.0))
        throw std::invalid_argument("perturbation_gap: eps must be >= 0");
    if (!(M >= 0.0))
        throw std::invalid_argument("perturbation_gap: M must be >= 0");
    PerturbationGap g;
    g.lhs = oleinik_gap(u_eps, u, m);
    g.rhs = bound_rhs(eps, cylinder_volume(u.domain()), M, m);
    return g;
}

PerturbationLadder perron_ladder(const Cylinder& c, const BoundaryData& bd,
                                 const std::vector<double>& eps_sequence,
                                 const SolverConfig& cfg) {
    if (eps_sequence.empty())
        throw std::invalid_argument("perron_ladder: empty eps sequence");
    for (std::size_t j = 0; j < eps_sequence.size(); ++j) {
        if (!(eps_sequence[j] >= 0.0))
            throw std::invalid_argument(
                "perron_ladder: eps sequence must be nonnegative");
        if (j > 0 && !(eps_sequence[j] < eps_sequence[j - 1]))
            throw std::invalid_argument(
                "perron_ladder: eps sequence must be strictly decreasing");
    }
    validate_boundary_data(c, bd, cfg.m, true);

    double volume = cylinder_volume(c);
    PerturbationLadder ladder;
    ladder.rungs.reserve(eps_sequence.size());
    for (double eps : eps_sequence) {
        BoundaryData low_bd = shift_down(bd, eps, cfg.m);
        BoundaryData up_bd = lift_up(low_bd, eps, cfg.m);
        GridFunction lower = solve_or_throw(c, low_bd, cfg, eps, "lower");
        GridFunction upper = solve_or_throw(c, up_bd, cfg, eps, "upper");

        double gap = 0.0;
        const auto& lo = lower.values();
        const auto& hi = upper.values();
        for (std::size_t i = 0; i < lo.size(); ++i)
            gap = std::max(gap, hi[i] - lo[i]);

        double lhs = oleinik_gap(upper, lower, cfg.m);
        double M = data_bounds(low_bd, cfg.m).second;
        double rhs = bound_rhs(eps, volume, M, cfg.m);
        ladder.rungs.push_back(
            {eps, std::move(lower), std::move(upper), gap, lhs, rhs});
    }
    return ladder;
}

std::string ladder_csv(const PerturbationLadder& ladder) {
    std::string out = "eps,sup_gap,gap_lhs,gap_rhs\n";
    char row[160];
    for (const LadderRung& r : ladder.rungs) {
        std::snprintf(row, sizeof(row), "%.17g,%.17g,%.17g,%.17g\n", r.eps,
                      r.sup_gap, r.gap_lhs, r.gap_rhs);
        out += row;
    }
    return out;
}

double boundary_attainment(const GridFunction& u, const BoundaryData& bd,
                           double m, NodeIndex xi, double radius) {
    const Cylinder& c = u.domain();
    int nx = c.space.n_cells;
    int nt = c.time.n_steps;
    if (xi.ix < 0 || xi.ix > nx || xi.it < 0 || xi.it > nt)
        throw std::invalid_argument("boundary_attainment: node outside lattice");
    bool on_initial = xi.it == 0;
    bool on_wall = xi.ix == 0 || xi.ix == nx;
    if (!on_initial && !on_wall)
        throw std::invalid_argument(
            "boundary_attainment: node not on the parabolic boundary");
    if (!(radius > 0.0))
        throw std::invalid_argument(
            "boundary_attainment: radius must be positive (empty neighborhood)");

    double target;
    if (on_initial) {
        target = bd.initial.at(static_cast<std::size_t>(xi.ix));
    } else {
        const auto& wall = xi.ix == 0 ? bd.lateral_left : bd.lateral_right;
        target = phi_inverse(wall.at(static_cast<std::size_t>(xi.it)), m);
    }

    double x0 = c.space.node(xi.ix);
    double t0 = c.time.level(xi.it);
    double slack = radius * 1e-12;
    double dev = 0.0;
    int hits = 0;
    for (int k = 0; k <= nt; ++k) {
        if (std::abs(c.time.level(k) - t0) > radius + slack) continue;
        for (int i = 0; i <= nx; ++i) {
            if (std::abs(c.space.node(i) - x0) > radius + slack) continue;
            dev = std::max(dev, std::abs(u(i, k) - target));
            ++hits;
        }
    }
    if (hits == 0)
        throw std::runtime_error("boundary_attainment: empty neighborhood");
    return dev;
}

}  // namespace pml
