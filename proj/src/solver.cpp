#include "pml/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pml/nonlinearity.hpp"

namespace pml {

namespace {

class Nonlin {
  public:
    explicit Nonlin(const SolverConfig& cfg) : m_(cfg.m) {
        if (cfg.n_reg > 0) reg_.emplace(cfg.m, cfg.n_reg, cfg.c_lin);
    }
    double value(double s) const { return reg_ ? reg_->value(s) : phi(s, m_); }
    double deriv(double s) const {
        return reg_ ? reg_->derivative(s) : phi_prime(s, m_);
    }

  private:
    double m_;
    std::optional<RegularizedPhi> reg_;
};

void check_config(const SolverConfig& cfg) {
    std::ostringstream err;
    if (!(cfg.m > 1.0))
        err << "SolverConfig: need m > 1, got " << cfg.m;
    else if (cfg.n_reg < 0)
        err << "SolverConfig: n_reg must be >= 0";
    else if (!(cfg.newton_tol > 0.0))
        err << "SolverConfig: newton_tol must be > 0";
    else if (cfg.max_newton_iters < 1)
        err << "SolverConfig: max_newton_iters must be >= 1";
    else if (!(cfg.damping > 0.0 && cfg.damping < 1.0))
        err << "SolverConfig: damping must lie in (0, 1)";
    else if (!(cfg.min_step_fraction > 0.0))
        err << "SolverConfig: min_step_fraction must be > 0";
    if (!err.str().empty()) throw std::invalid_argument(err.str());
}

// In-place Thomas solve of a tridiagonal system; the matrix produced by the
// scheme is an M-matrix (positive diagonal, nonpositive off-diagonals,
// columnwise dominant thanks to the 1/tau term), so elimination without
// pivoting is stable.
void thomas(std::vector<double>& lo, std::vector<double>& di,
            std::vector<double>& up, std::vector<double>& rhs) {
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        double w = lo[i] / di[i - 1];
        di[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

struct StepContext {
    double tau;
    double h;
    const Nonlin* f;
    double clamp_lo;
    double clamp_hi;
};

// Backward-Euler residual at the interior nodes.  u covers the whole level
// including both walls; F has size n_nodes - 2.
void scheme_residual(const std::vector<double>& u,
                     const std::vector<double>& uprev, const StepContext& ctx,
                     std::vector<double>& phiv, std::vector<double>& F) {
    const std::size_t n = u.size();
    phiv.resize(n);
    for (std::size_t i = 0; i < n; ++i) phiv[i] = ctx.f->value(u[i]);
    F.resize(n - 2);
    const double ih2 = 1.0 / (ctx.h * ctx.h);
    for (std::size_t i = 1; i + 1 < n; ++i)
        F[i - 1] = (u[i] - uprev[i]) / ctx.tau -
                   (phiv[i - 1] - 2.0 * phiv[i] + phiv[i + 1]) * ih2;
}

double sup(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// Scalar root of F_i(v) = (v - prev)/tau + (2 phi(v) - c)/h^2 in v, where c
// collects the fixed neighbor phi values.  F_i is strictly increasing in v,
// so bisection on a bracket always works.
double scalar_root(double prev, double c, const StepContext& ctx, double lo,
                   double hi) {
    auto fval = [&](double v) {
        return (v - prev) / ctx.tau +
               (2.0 * ctx.f->value(v) - c) / (ctx.h * ctx.h);
    };
    // widen until bracketed; the function grows without bound both ways
    double flo = fval(lo), fhi = fval(hi);
    double width = std::max(1.0, hi - lo);
    while (flo > 0.0) {
        lo -= width;
        width *= 2.0;
        flo = fval(lo);
    }
    while (fhi < 0.0) {
        hi += width;
        width *= 2.0;
        fhi = fval(hi);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (fval(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct StepOutcome {
    int iters = 0;
    double residual = 0.0;
    bool ok = false;
};

// One implicit step: damped Newton on the interior unknowns with clamping,
// falling back to a nodewise bisection (Gauss-Seidel) pass whenever the line
// search stalls, e.g. when phi' vanishes along the free boundary.
StepOutcome advance_level(std::vector<double>& u, const std::vector<double>& uprev,
                          const StepContext& ctx, const SolverConfig& cfg) {
    const std::size_t n = u.size();
    const std::size_t ni = n - 2;
    std::vector<double> phiv, F, Fc, lo(ni), di(ni), up(ni), rhs(ni);
    std::vector<double> cand(u);
    auto clamp = [&](double v) {
        return std::min(std::max(v, ctx.clamp_lo), ctx.clamp_hi);
    };

    scheme_residual(u, uprev, ctx, phiv, F);
    double normF = sup(F);
    StepOutcome out;
    const double ih2 = 1.0 / (ctx.h * ctx.h);
    for (out.iters = 0; out.iters < cfg.max_newton_iters; ++out.iters) {
        if (normF <= cfg.newton_tol) {
            out.ok = true;
            break;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            std::size_t r = i - 1;
            di[r] = 1.0 / ctx.tau + 2.0 * ctx.f->deriv(u[i]) * ih2;
            lo[r] = r == 0 ? 0.0 : -ctx.f->deriv(u[i - 1]) * ih2;
            up[r] = r == ni - 1 ? 0.0 : -ctx.f->deriv(u[i + 1]) * ih2;
            rhs[r] = -F[r];
        }
        thomas(lo, di, up, rhs);

        double lambda = 1.0;
        bool accepted = false;
        while (lambda >= cfg.min_step_fraction) {
            for (std::size_t i = 1; i + 1 < n; ++i)
                cand[i] = clamp(u[i] + lambda * rhs[i - 1]);
            scheme_residual(cand, uprev, ctx, phiv, Fc);
            double normC = sup(Fc);
            if (normC < normF * (1.0 - 1e-4 * lambda) || normC <= cfg.newton_tol) {
                u = cand;
                F = Fc;
                normF = normC;
                accepted = true;
                break;
            }
            lambda *= cfg.damping;
        }
        if (!accepted) {
            // Nodewise exact solves with frozen neighbors; unconditionally
            // reduces each local residual and escapes degenerate plateaus.
            for (std::size_t i = 1; i + 1 < n; ++i) {
                double c = ctx.f->value(u[i - 1]) + ctx.f->value(u[i + 1]);
                double blo = std::min({uprev[i], u[i - 1], u[i + 1]});
                double bhi = std::max({uprev[i], u[i - 1], u[i + 1]});
                u[i] = clamp(scalar_root(uprev[i], c, ctx, blo, bhi));
            }
            scheme_residual(u, uprev, ctx, phiv, F);
            normF = sup(F);
        }
    }
    if (!out.ok && normF <= cfg.newton_tol) out.ok = true;
    out.residual = normF;
    return out;
}

SolveResult march(const Cylinder& c, const BoundaryData& bd,
                  const SolverConfig& cfg, bool nonnegative) {
    check_config(cfg);
    validate_boundary_data(c, bd, cfg.m, nonnegative);
    Nonlin f(cfg);

    auto [dlo, dhi] = data_bounds(bd, cfg.m);
    StepContext ctx{c.time.dt(), c.space.spacing(), &f, dlo, dhi};

    GridFunction u(c);
    SolveReport rep;
    const int nx = c.space.n_cells;
    const int nt = c.time.n_steps;
    for (int i = 0; i <= nx; ++i) u(i, 0) = bd.initial[static_cast<std::size_t>(i)];

    std::vector<double> cur(static_cast<std::size_t>(nx) + 1);
    std::vector<double> prev(cur.size());
    for (int k = 1; k <= nt; ++k) {
        for (int i = 0; i <= nx; ++i)
            prev[static_cast<std::size_t>(i)] = u(i, k - 1);
        cur = prev;
        cur.front() = phi_inverse(bd.lateral_left[static_cast<std::size_t>(k)], cfg.m);
        cur.back() = phi_inverse(bd.lateral_right[static_cast<std::size_t>(k)], cfg.m);
        for (std::size_t i = 1; i + 1 < cur.size(); ++i)
            cur[i] = std::min(std::max(cur[i], dlo), dhi);

        StepOutcome so = advance_level(cur, prev, ctx, cfg);
        rep.newton_iters.push_back(so.iters);
        rep.step_residuals.push_back(so.residual);
        if (!so.ok && rep.converged) {
            rep.converged = false;
            std::ostringstream d;
            d << "Newton stalled at step " << k << " with residual "
              << so.residual << " (tol " << cfg.newton_tol << ")";
            rep.diagnostic = d.str();
        }
        for (int i = 0; i <= nx; ++i) u(i, k) = cur[static_cast<std::size_t>(i)];
    }
    for (int k = 0; k <= nt; ++k) rep.mass_trace.push_back(mass(u, k));
    return {std::move(u), std::move(rep)};
}

}  // namespace

SolveResult solve_bvp(const Cylinder& c, const BoundaryData& bd,
                      const SolverConfig& cfg) {
    return march(c, bd, cfg, true);
}

SolveResult solve_signed(const Cylinder& c, const BoundaryData& bd,
                         const SolverConfig& cfg) {
    if (cfg.n_reg < 1)
        throw std::invalid_argument(
            "solve_signed: n_reg >= 1 required (phi'(0) = 0 degenerates the "
            "Newton system at sign changes)");
    return march(c, bd, cfg, false);
}

SolveResult solve_obstacle(const Cylinder& c, const GridFunction& psi,
                           const BoundaryData& bd, const SolverConfig& cfg) {
    check_config(cfg);
    validate_boundary_data(c, bd, cfg.m, true);
    const Cylinder& pd = psi.domain();
    if (pd.space.n_cells != c.space.n_cells || pd.time.n_steps != c.time.n_steps)
        throw std::invalid_argument("solve_obstacle: obstacle lattice mismatch");

    const int nx = c.space.n_cells;
    const int nt = c.time.n_steps;
    for (int i = 0; i <= nx; ++i)
        if (bd.initial[static_cast<std::size_t>(i)] < psi(i, 0))
            throw std::invalid_argument(
                "solve_obstacle: initial data below the obstacle");
    for (int k = 0; k <= nt; ++k) {
        if (phi_inverse(bd.lateral_left[static_cast<std::size_t>(k)], cfg.m) <
                psi(0, k) ||
            phi_inverse(bd.lateral_right[static_cast<std::size_t>(k)], cfg.m) <
                psi(nx, k))
            throw std::invalid_argument(
                "solve_obstacle: lateral data below the obstacle");
    }

    Nonlin f(cfg);
    auto [dlo, dhi] = data_bounds(bd, cfg.m);
    dhi = std::max(dhi, psi.max_value());
    StepContext ctx{c.time.dt(), c.space.spacing(), &f, dlo, dhi};
    const double ih2 = 1.0 / (ctx.h * ctx.h);

    GridFunction w(c);
    SolveReport rep;
    for (int i = 0; i <= nx; ++i) w(i, 0) = bd.initial[static_cast<std::size_t>(i)];

    std::vector<double> cur(static_cast<std::size_t>(nx) + 1), prev(cur.size());
    std::vector<double> phiv, F, G, Gc, lo(static_cast<std::size_t>(nx) - 1),
        di(lo.size()), up(lo.size()), rhs(lo.size());
    std::vector<double> cand(cur.size());

    for (int k = 1; k <= nt; ++k) {
        for (int i = 0; i <= nx; ++i)
            prev[static_cast<std::size_t>(i)] = w(i, k - 1);
        cur = prev;
        cur.front() = phi_inverse(bd.lateral_left[static_cast<std::size_t>(k)], cfg.m);
        cur.back() = phi_inverse(bd.lateral_right[static_cast<std::size_t>(k)], cfg.m);
        for (int i = 1; i < nx; ++i)
            cur[static_cast<std::size_t>(i)] =
                std::max(cur[static_cast<std::size_t>(i)], psi(i, k));

        auto complementarity = [&](const std::vector<double>& v,
                                   std::vector<double>& out) {
            scheme_residual(v, prev, ctx, phiv, F);
            out.resize(F.size());
            for (int i = 1; i < nx; ++i)
                out[static_cast<std::size_t>(i - 1)] =
                    std::min(v[static_cast<std::size_t>(i)] - psi(i, k),
                             F[static_cast<std::size_t>(i - 1)]);
        };

        complementarity(cur, G);
        double normG = sup(G);
        int iters = 0;
        bool ok = false;
        for (; iters < cfg.max_newton_iters; ++iters) {
            if (normG <= cfg.newton_tol) {
                ok = true;
                break;
            }
            // semismooth Newton rows: identity on the active set, scheme
            // Jacobian elsewhere
            for (int i = 1; i < nx; ++i) {
                std::size_t r = static_cast<std::size_t>(i - 1);
                double slack = cur[static_cast<std::size_t>(i)] - psi(i, k);
                bool active = slack <= F[r];
                if (active) {
                    di[r] = 1.0;
                    lo[r] = up[r] = 0.0;
                    rhs[r] = -slack;
                } else {
                    di[r] = 1.0 / ctx.tau +
                            2.0 * f.deriv(cur[static_cast<std::size_t>(i)]) * ih2;
                    lo[r] = i == 1 ? 0.0
                                   : -f.deriv(cur[static_cast<std::size_t>(i - 1)]) * ih2;
                    up[r] = i == nx - 1
                                ? 0.0
                                : -f.deriv(cur[static_cast<std::size_t>(i + 1)]) * ih2;
                    rhs[r] = -F[r];
                }
            }
            thomas(lo, di, up, rhs);

            double lambda = 1.0;
            bool accepted = false;
            while (lambda >= cfg.min_step_fraction) {
                cand = cur;
                for (int i = 1; i < nx; ++i)
                    cand[static_cast<std::size_t>(i)] =
                        cur[static_cast<std::size_t>(i)] +
                        lambda * rhs[static_cast<std::size_t>(i - 1)];
                complementarity(cand, Gc);
                double normC = sup(Gc);
                if (normC < normG * (1.0 - 1e-4 * lambda) ||
                    normC <= cfg.newton_tol) {
                    cur = cand;
                    G = Gc;
                    normG = normC;
                    accepted = true;
                    break;
                }
                lambda *= cfg.damping;
            }
            if (!accepted) {
                // nodewise exact complementarity: w_i = max(psi, scalar root)
                for (int i = 1; i < nx; ++i) {
                    std::size_t s = static_cast<std::size_t>(i);
                    double cc = f.value(cur[s - 1]) + f.value(cur[s + 1]);
                    double blo = std::min({prev[s], cur[s - 1], cur[s + 1]});
                    double bhi = std::max({prev[s], cur[s - 1], cur[s + 1]});
                    cur[s] = std::max(psi(i, k),
                                      scalar_root(prev[s], cc, ctx, blo, bhi));
                }
                complementarity(cur, G);
                normG = sup(G);
            }
        }
        if (!ok && normG <= cfg.newton_tol) ok = true;
        rep.newton_iters.push_back(iters);
        rep.step_residuals.push_back(normG);
        if (!ok && rep.converged) {
            rep.converged = false;
            std::ostringstream d;
            d << "obstacle solve stalled at step " << k << " with residual "
              << normG;
            rep.diagnostic = d.str();
        }
        for (int i = 0; i <= nx; ++i) w(i, k) = cur[static_cast<std::size_t>(i)];
    }
    for (int k = 0; k <= nt; ++k) rep.mass_trace.push_back(mass(w, k));
    return {std::move(w), std::move(rep)};
}

double mass(const GridFunction& u, int level) {
    const Cylinder& c = u.domain();
    if (level < 0 || level > c.time.n_steps)
        throw std::invalid_argument("mass: level out of range");
    double h = c.space.spacing();
    double s = 0.5 * (u(0, level) + u(c.space.n_cells, level));
    for (int i = 1; i < c.space.n_cells; ++i) s += u(i, level);
    return h * s;
}

double oleinik_gap(const GridFunction& u, const GridFunction& v, double m) {
    if (!same_lattice(u, v))
        throw std::invalid_argument("oleinik_gap: lattice mismatch");
    if (!(m > 1.0)) throw std::invalid_argument("oleinik_gap: need m > 1");
    const Cylinder& c = u.domain();
    const double h = c.space.spacing();
    const double tau = c.time.dt();
    double total = 0.0;
    for (int k = 0; k <= c.time.n_steps; ++k) {
        double wt = (k == 0 || k == c.time.n_steps) ? 0.5 : 1.0;
        double row = 0.0;
        for (int i = 0; i <= c.space.n_cells; ++i) {
            double wx = (i == 0 || i == c.space.n_cells) ? 0.5 : 1.0;
            double du = u(i, k) - v(i, k);
            row += wx * du * (phi(u(i, k), m) - phi(v(i, k), m));
        }
        total += wt * row;
    }
    return total * h * tau;
}

std::string solve_report_json(const SolveReport& r) {
    nlohmann::json j;
    j["newton_iters"] = r.newton_iters;
    j["step_residuals"] = r.step_residuals;
    j["mass_trace"] = r.mass_trace;
    j["converged"] = r.converged;
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    return j.dump(2);
}

}  // namespace pml
