#include "pml/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pml/barenblatt.hpp"
#include "pml/boundary_data.hpp"
#include "pml/classify.hpp"
#include "pml/nonlinearity.hpp"
#include "pml/perron.hpp"
#include "pml/schwarz.hpp"
#include "pml/solver.hpp"

namespace pml {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex64(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string grid_csv(const GridFunction& u) {
    std::ostringstream out;
    u.write_csv(out);
    return out.str();
}

// ---------------------------------------------------------------------------
// artifact funnel: every file goes through here so the manifest sees it

struct ArtifactWriter {
    std::filesystem::path dir;
    struct Entry {
        std::string path;
        std::uint64_t bytes;
        std::uint64_t hash;
    };
    std::vector<Entry> entries;

    explicit ArtifactWriter(const std::string& d) : dir(d) {
        std::filesystem::create_directories(dir);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
        entries.push_back({name, content.size(), fnv1a64(content)});
    }
};

// ---------------------------------------------------------------------------
// seeded draws (the engine's raw stream is mapped to doubles by hand so the
// corpus does not depend on library distribution internals)

double u01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

double pick(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * u01(g);
}

/// Random compatible data: a trig-polynomial initial slice whose wall values
/// are held constant in time, so corners match automatically.
struct DataParams {
    double c0 = 0.5;
    double a1 = 0.0;
    double a2 = 0.0;
    double phase = 0.0;
    int k2 = 1;
};

DataParams draw_data(std::mt19937_64& g) {
    DataParams p;
    p.c0 = pick(g, 0.2, 0.7);
    p.a1 = pick(g, 0.1, 0.6);
    p.a2 = pick(g, 0.0, 0.3);
    p.phase = pick(g, 0.0, kPi);
    p.k2 = 1 + static_cast<int>(u01(g) * 3.0);
    return p;
}

double data_value(const DataParams& p, double s) {
    double s1 = std::sin(kPi * s);
    double s2 = std::sin(p.k2 * kPi * s + p.phase);
    return p.c0 + p.a1 * s1 * s1 + p.a2 * s2 * s2;
}

BoundaryData params_data(const Cylinder& c, const DataParams& p, double m,
                         double lift = 0.0) {
    double width = c.space.b - c.space.a;
    auto val = [&](double x) {
        return data_value(p, (x - c.space.a) / width) + lift;
    };
    return boundary_from_functions(c, val, [&](double x, double) {
        return phi(val(x), m);
    });
}

GridFunction solve_checked(const Cylinder& c, const BoundaryData& bd,
                           const SolverConfig& cfg, const std::string& who) {
    SolveResult r = solve_bvp(c, bd, cfg);
    if (!r.report.converged)
        throw std::runtime_error(who + ": " + r.report.diagnostic);
    return std::move(r.u);
}

/// Sup-norm residual targets below the roundoff of evaluating the residual
/// itself are unreachable: the second-difference term carries values of size
/// phi(u)/h^2.  Scenario solves floor the configured tolerance at that scale
/// (with u_ref = 3 covering every generator in this file).
double floored_newton_tol(double configured, const Cylinder& c, double m) {
    double h = c.space.spacing();
    return std::max(configured, 8e-16 * phi(3.0, m) / (h * h));
}

SolverConfig scenario_solver_config(const ExperimentConfig& cfg,
                                    const Cylinder& c) {
    SolverConfig s;
    s.m = cfg.m;
    s.n_reg = cfg.n_reg;
    s.c_lin = cfg.c_lin;
    s.newton_tol = floored_newton_tol(cfg.newton_tol, c, cfg.m);
    return s;
}

// ---------------------------------------------------------------------------
// the seeded corpus shared by equivalence_suite and caccioppoli_suite

struct CorpusSpec {
    std::string name;
    std::string kind;  // solution | minimum | lifted | control
    DataParams p1, p2;
    double lift = 0.0;
    int control = 0;  // 1: static wedge, 2: decaying wedge
};

std::vector<CorpusSpec> corpus_specs(std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<CorpusSpec> out;
    char name[32];
    for (int i = 0; i < 8; ++i) {
        std::snprintf(name, sizeof name, "solution_%02d", i + 1);
        CorpusSpec s;
        s.name = name;
        s.kind = "solution";
        s.p1 = draw_data(g);
        out.push_back(s);
    }
    for (int i = 0; i < 5; ++i) {
        std::snprintf(name, sizeof name, "minimum_%02d", i + 1);
        CorpusSpec s;
        s.name = name;
        s.kind = "minimum";
        s.p1 = draw_data(g);
        s.p2 = draw_data(g);
        out.push_back(s);
    }
    for (int i = 0; i < 5; ++i) {
        std::snprintf(name, sizeof name, "lifted_%02d", i + 1);
        CorpusSpec s;
        s.name = name;
        s.kind = "lifted";
        s.p1 = draw_data(g);
        s.lift = pick(g, 0.05, 0.3);
        out.push_back(s);
    }
    CorpusSpec wedge;
    wedge.name = "control_wedge_static";
    wedge.kind = "control";
    wedge.control = 1;
    out.push_back(wedge);
    wedge.name = "control_wedge_decaying";
    wedge.control = 2;
    out.push_back(wedge);
    return out;
}

/// Builds a member on any lattice, so a verdict disagreement can be retried
/// on a refined mesh without re-drawing parameters.
GridFunction build_member(const CorpusSpec& s, const Cylinder& c,
                          const SolverConfig& scfg) {
    double width = c.space.b - c.space.a;
    auto wedge = [&](double x) {
        return 0.5 + std::abs(2.0 * (x - c.space.a) / width - 1.0);
    };
    if (s.control == 1)
        return GridFunction::tabulate(
            c, [&](double x, double) { return wedge(x); });
    if (s.control == 2)
        return GridFunction::tabulate(c, [&](double x, double t) {
            return wedge(x) * std::exp(-(t - c.time.t_begin));
        });
    if (s.kind == "solution")
        return solve_checked(c, params_data(c, s.p1, scfg.m), scfg, s.name);
    if (s.kind == "lifted")
        return solve_checked(c, params_data(c, s.p1, scfg.m, s.lift), scfg,
                             s.name);
    GridFunction ua = solve_checked(c, params_data(c, s.p1, scfg.m), scfg,
                                    s.name + " (first)");
    GridFunction ub = solve_checked(c, params_data(c, s.p2, scfg.m), scfg,
                                    s.name + " (second)");
    GridFunction out(c);
    for (int k = 0; k <= c.time.n_steps; ++k)
        for (int i = 0; i <= c.space.n_cells; ++i)
            out(i, k) = std::min(ua(i, k), ub(i, k));
    return out;
}

// ---------------------------------------------------------------------------
// scenario bodies

void push_check(std::vector<CheckResult>& checks, std::string name, bool pass,
                std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
}

void run_barenblatt(const ExperimentConfig& cfg, const GridSpec& g,
                    ArtifactWriter& w, std::vector<CheckResult>& checks) {
    BarenblattParams p{cfg.m, 1, 1.0};
    struct Level {
        double h, tau, err, drift;
    };
    std::vector<Level> levels;
    std::string profile_csv;

    for (int refine = 0; refine < 2; ++refine) {
        int nx = g.n_cells << refine, nt = g.n_steps << refine;
        Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, nx, nt);
        SolverConfig scfg = scenario_solver_config(cfg, c);
        BoundaryData bd = boundary_from_functions(
            c, [&](double x) { return barenblatt(x, g.t_begin, p); },
            [&](double x, double t) { return phi(barenblatt(x, t, p), p.m); });
        GridFunction u = solve_checked(c, bd, scfg, "barenblatt_validation");

        int last = c.time.n_steps;
        double diff = 0.0, ref = 0.0;
        for (int i = 0; i <= nx; ++i) {
            double wq = (i == 0 || i == nx) ? 0.5 : 1.0;
            double exact = barenblatt(c.space.node(i), g.t_end, p);
            diff += wq * std::abs(u(i, last) - exact);
            ref += wq * std::abs(exact);
        }
        double err = diff / ref;

        double m0 = mass(u, 0), drift = 0.0;
        for (int k = 0; k <= last; ++k)
            drift = std::max(drift, std::abs(mass(u, k) - m0));
        drift /= m0;
        levels.push_back({c.space.spacing(), c.time.dt(), err, drift});

        if (refine == 0) {
            profile_csv = "x,u,exact\n";
            for (int i = 0; i <= nx; ++i)
                profile_csv += num(c.space.node(i)) + "," + num(u(i, last)) +
                               "," +
                               num(barenblatt(c.space.node(i), g.t_end, p)) +
                               "\n";
        }
    }

    std::string table = "h,tau,rel_l1_error,rel_mass_drift\n";
    for (const Level& lv : levels)
        table += num(lv.h) + "," + num(lv.tau) + "," + num(lv.err) + "," +
                 num(lv.drift) + "\n";
    w.write("error_table.csv", table);
    w.write("final_profile.csv", profile_csv);

    double lambda = lambda_exponent(cfg.m, 1);
    json rep;
    rep["lambda"] = lambda;
    rep["mass_closed_form"] = barenblatt_mass(p);
    rep["support_radius_final"] = support_radius(p, g.t_end);
    w.write("report.json", rep.dump(2) + "\n");

    push_check(checks, "relative L1 error within 3% at the base resolution",
               levels[0].err <= 0.03, "error = " + num(levels[0].err));
    push_check(checks, "L1 error decreases under joint refinement",
               levels[1].err < levels[0].err,
               num(levels[0].err) + " -> " + num(levels[1].err));
    double closed = 1.0 / (1.0 * (cfg.m - 1.0) + 2.0);
    push_check(checks, "similarity exponent equals n/(n(m-1)+2)",
               lambda == closed, "lambda = " + num(lambda));
    push_check(checks, "relative mass drift within 1e-6",
               levels[0].drift <= 1e-6 && levels[1].drift <= 1e-6,
               num(levels[0].drift) + ", " + num(levels[1].drift));
}

void run_comparison(const ExperimentConfig& cfg, const GridSpec& g,
                    ArtifactWriter& w, std::vector<CheckResult>& checks) {
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    std::mt19937_64 rng(cfg.seed);
    double width = c.space.b - c.space.a;

    const int pairs = 50;
    int failures = 0;
    double worst = -std::numeric_limits<double>::infinity();
    std::string csv = "pair,sup_violation,pass\n";
    for (int j = 0; j < pairs; ++j) {
        DataParams base = draw_data(rng);
        double d0 = pick(rng, 0.05, 0.4), d1 = pick(rng, 0.0, 0.4);
        auto lo = [&](double x) {
            return data_value(base, (x - c.space.a) / width);
        };
        auto hi = [&](double x) {
            double s = std::sin(kPi * (x - c.space.a) / width);
            return lo(x) + d0 + d1 * s * s;
        };
        GridFunction u_lo = solve_checked(
            c,
            boundary_from_functions(
                c, lo, [&](double x, double) { return phi(lo(x), cfg.m); }),
            scfg, "comparison_sweep (lower)");
        GridFunction u_hi = solve_checked(
            c,
            boundary_from_functions(
                c, hi, [&](double x, double) { return phi(hi(x), cfg.m); }),
            scfg, "comparison_sweep (upper)");

        double violation = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < u_lo.values().size(); ++i)
            violation = std::max(violation,
                                 u_lo.values()[i] - u_hi.values()[i]);
        bool ok = violation <= 10.0 * scfg.newton_tol;
        failures += !ok;
        worst = std::max(worst, violation);
        csv += std::to_string(j + 1) + "," + num(violation) + "," +
               (ok ? "1" : "0") + "\n";
    }
    w.write("comparison.csv", csv);

    json rep;
    rep["pairs"] = pairs;
    rep["failures"] = failures;
    rep["worst_violation"] = worst;
    rep["ordering_slack"] = 10.0 * scfg.newton_tol;
    w.write("report.json", rep.dump(2) + "\n");

    push_check(checks, "all ordered data pairs produce ordered solutions",
               failures == 0,
               "worst violation = " + num(worst) + " over " +
                   std::to_string(pairs) + " pairs");
}

BoundaryData lift_data(const BoundaryData& bd, double eps, double m) {
    BoundaryData out = bd;
    for (double& v : out.initial) v += eps;
    for (double& gv : out.lateral_left) gv = phi(phi_inverse(gv, m) + eps, m);
    for (double& gv : out.lateral_right) gv = phi(phi_inverse(gv, m) + eps, m);
    return out;
}

void run_perturbation(const ExperimentConfig& cfg, const GridSpec& g,
                      ArtifactWriter& w, std::vector<CheckResult>& checks) {
    BarenblattParams p{cfg.m, 1, 1.0};
    const std::vector<double> eps_list = {0.1, 0.01, 0.001};

    std::string gap_csv = "eps,h,tau,lhs,rhs,slack\n";
    double slack_at[2] = {0.0, 0.0};
    bool bound_ok = true;
    for (int refine = 0; refine < 2; ++refine) {
        Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end,
                                   g.n_cells << refine, g.n_steps << refine);
        SolverConfig scfg = scenario_solver_config(cfg, c);
        BoundaryData bd = boundary_from_functions(
            c, [&](double x) { return barenblatt(x, g.t_begin, p); },
            [&](double x, double t) { return phi(barenblatt(x, t, p), p.m); });
        GridFunction u = solve_checked(c, bd, scfg, "perturbation_gap (base)");
        double M = data_bounds(bd, cfg.m).second;
        double scale = c.space.spacing() + c.time.dt();

        for (double eps : eps_list) {
            GridFunction u_eps =
                solve_checked(c, lift_data(bd, eps, cfg.m), scfg,
                              "perturbation_gap (lifted)");
            PerturbationGap gap = perturbation_gap(u, u_eps, eps, M, cfg.m);
            double slack = std::max(0.0, gap.lhs - gap.rhs) / scale;
            slack_at[refine] = std::max(slack_at[refine], slack);
            bound_ok = bound_ok && gap.lhs <= gap.rhs + 1.0 * scale;
            gap_csv += num(eps) + "," + num(c.space.spacing()) + "," +
                       num(c.time.dt()) + "," + num(gap.lhs) + "," +
                       num(gap.rhs) + "," + num(slack) + "\n";
        }
    }
    w.write("gap_table.csv", gap_csv);

    push_check(checks, "perturbation gap within the first-order bound",
               bound_ok, "slack cap 1.0 * (h + tau)");
    bool stable = slack_at[0] <= 2.0 * slack_at[1] + 1e-12 &&
                  slack_at[1] <= 2.0 * slack_at[0] + 1e-12;
    push_check(checks, "measured slack stable under refinement", stable,
               num(slack_at[0]) + " vs " + num(slack_at[1]));

    // Rung ladder and boundary attainment on strictly positive data over the
    // same lattice.
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    double width = c.space.b - c.space.a;
    BoundaryData mild = boundary_from_functions(
        c,
        [&](double x) {
            double s = std::sin(kPi * (x - c.space.a) / width);
            return 1.0 + 0.1 * s * s;
        },
        [&](double, double) { return phi(1.0, cfg.m); });

    std::vector<double> eps_seq;
    for (int j = 1; j <= 10; ++j) eps_seq.push_back(std::pow(2.0, -j));
    PerturbationLadder ladder = perron_ladder(c, mild, eps_seq, scfg);
    w.write("ladder.csv", ladder_csv(ladder));

    GridFunction direct = solve_checked(c, mild, scfg,
                                        "perturbation_gap (direct)");
    w.write("solution.csv", grid_csv(direct));
    bool sandwich = true, gaps_decrease = true;
    for (std::size_t j = 0; j < ladder.rungs.size(); ++j) {
        const LadderRung& r = ladder.rungs[j];
        for (std::size_t i = 0; i < direct.values().size(); ++i) {
            sandwich = sandwich &&
                       r.lower.values()[i] <=
                           direct.values()[i] + 10.0 * scfg.newton_tol &&
                       direct.values()[i] <=
                           r.upper.values()[i] + 10.0 * scfg.newton_tol;
        }
        if (j > 0)
            gaps_decrease = gaps_decrease &&
                            r.sup_gap <= ladder.rungs[j - 1].sup_gap + 1e-12;
    }
    double final_gap = ladder.rungs.back().sup_gap;
    push_check(checks, "rungs sandwich the direct solution", sandwich, "");
    push_check(checks, "ladder rung gaps decrease", gaps_decrease, "");
    push_check(checks, "bottom rung gap within 1e-3", final_gap <= 1e-3,
               "sup gap = " + num(final_gap));

    int nx = c.space.n_cells, nt = c.time.n_steps;
    double h = c.space.spacing();
    std::vector<NodeIndex> points = {
        {nx / 5, 0},          {2 * nx / 5, 0},      {3 * nx / 5, 0},
        {4 * nx / 5, 0},      {0, nt / 4},          {0, nt / 2},
        {0, 3 * nt / 4},      {nx, nt / 4},         {nx, nt / 2},
        {nx, 3 * nt / 4}};
    bool monotone = true;
    double largest = 0.0;
    std::string att_csv = "ix,it,x,t,dev_4h,dev_2h,dev_h\n";
    for (NodeIndex xi : points) {
        double d4 = boundary_attainment(direct, mild, cfg.m, xi, 4.0 * h);
        double d2 = boundary_attainment(direct, mild, cfg.m, xi, 2.0 * h);
        double d1 = boundary_attainment(direct, mild, cfg.m, xi, h);
        monotone = monotone && d1 <= d2 && d2 <= d4;
        largest = std::max(largest, d4);
        att_csv += std::to_string(xi.ix) + "," + std::to_string(xi.it) + "," +
                   num(c.space.node(xi.ix)) + "," + num(c.time.level(xi.it)) +
                   "," + num(d4) + "," + num(d2) + "," + num(d1) + "\n";
    }
    w.write("attainment.csv", att_csv);
    push_check(checks,
               "attainment deviation shrinks with the radius at 10 points",
               monotone && largest > 0.0,
               "largest 4h-deviation = " + num(largest));
}

void run_schwarz(const ExperimentConfig& cfg, const GridSpec& g,
                 ArtifactWriter& w, std::vector<CheckResult>& checks) {
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    int nx = c.space.n_cells, nt = c.time.n_steps;
    auto frac = [&](double f) { return static_cast<int>(std::lround(nx * f)); };
    CylinderUnion uni(c, {{0, frac(0.45), 0, nt},
                          {frac(0.30), frac(0.70), 0, nt},
                          {frac(0.55), nx, 0, nt}});

    double width = c.space.b - c.space.a;
    auto u0 = [&](double x) {
        double s = std::sin(kPi * (x - c.space.a) / width);
        return 0.8 * s * s;
    };
    GridFunction data(c);
    for (int i = 0; i <= nx; ++i) data(i, 0) = u0(c.space.node(i));

    GridFunction direct = solve_checked(
        c,
        boundary_from_functions(c, u0, [](double, double) { return 0.0; }),
        scfg, "schwarz_union (direct)");
    SchwarzResult sr = schwarz_solve(uni, data, scfg, cfg.sweep_tol, 50);

    std::string hist = "sweep,sup_change,min_iterate,max_iterate\n";
    bool change_decreases = true;
    for (std::size_t k = 0; k < sr.history.size(); ++k) {
        const SweepRecord& rec = sr.history[k];
        hist += std::to_string(rec.sweep) + "," + num(rec.sup_change) + "," +
                num(rec.min_iterate) + "," + num(rec.max_iterate) + "\n";
        if (k > 0)
            change_decreases =
                change_decreases &&
                rec.sup_change <=
                    sr.history[k - 1].sup_change * (1.0 + 1e-9) + 1e-15;
    }
    w.write("schwarz_history.csv", hist);
    w.write("solution.csv", grid_csv(sr.u));
    w.write("union.json", union_to_config(uni));
    w.write("schwarz_report.json", schwarz_history_json(sr));

    double dist = sup_distance(sr.u, direct);
    push_check(checks, "alternating method converges within 50 sweeps",
               sr.converged,
               std::to_string(sr.history.size()) + " sweeps at tol " +
                   num(cfg.sweep_tol));
    push_check(checks,
               "iterates never decrease (a drop aborts the sweep loudly)",
               true, "enforced during every member solve");
    push_check(checks, "sweep sup-change is monotone decreasing",
               change_decreases, "");
    push_check(checks, "limit within 10 sweep tolerances of the direct solve",
               dist <= 10.0 * cfg.sweep_tol, "distance = " + num(dist));
}

void run_obstacle(const ExperimentConfig& cfg, const GridSpec& g,
                  ArtifactWriter& w, std::vector<CheckResult>& checks) {
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    int nx = c.space.n_cells, nt = c.time.n_steps;
    double base = 0.5;
    BoundaryData bd = boundary_from_functions(
        c, [&](double) { return base; },
        [&](double, double) { return phi(base, cfg.m); });

    double width = c.space.b - c.space.a;
    double depth = c.time.t_end - c.time.t_begin;
    auto tent = [&](double x) {
        return 1.0 - std::abs(2.0 * (x - c.space.a) / width - 1.0);
    };
    auto obstacle = [&](int k) {
        return GridFunction::tabulate(c, [&](double x, double t) {
            return (0.4 + 0.2 * k) * ((t - c.time.t_begin) / depth) * tent(x);
        });
    };

    std::optional<RegularizedPhi> reg;
    if (scfg.n_reg > 0) reg.emplace(scfg.m, scfg.n_reg, scfg.c_lin);
    auto fn = [&](double s) { return reg ? reg->value(s) : phi(s, scfg.m); };

    double h = c.space.spacing(), tau = c.time.dt();
    double resid_slack = std::max(1e-8, 100.0 * scfg.newton_tol);
    double clearance = 1e-6;

    std::vector<GridFunction> solutions;
    std::string table =
        "rung,peak,contact_nodes,min_w_minus_psi,min_residual,"
        "max_residual_off_contact\n";
    bool dominance = true, resid_nonneg = true, resid_off = true,
         contact_all = true, ordered = true;
    for (int k = 1; k <= 3; ++k) {
        GridFunction psi = obstacle(k);
        SolveResult r = solve_obstacle(c, psi, bd, scfg);
        if (!r.report.converged)
            throw std::runtime_error("obstacle_demo: " + r.report.diagnostic);
        const GridFunction& wk = r.u;

        double min_gap = std::numeric_limits<double>::infinity();
        double min_resid = std::numeric_limits<double>::infinity();
        double off_max = 0.0;
        int contact = 0;
        for (int lev = 1; lev <= nt; ++lev)
            for (int i = 1; i < nx; ++i) {
                double gap = wk(i, lev) - psi(i, lev);
                min_gap = std::min(min_gap, gap);
                double lap = (fn(wk(i - 1, lev)) - 2.0 * fn(wk(i, lev)) +
                              fn(wk(i + 1, lev))) /
                             (h * h);
                double resid = (wk(i, lev) - wk(i, lev - 1)) / tau - lap;
                min_resid = std::min(min_resid, resid);
                if (gap <= clearance)
                    ++contact;
                else
                    off_max = std::max(off_max, std::abs(resid));
            }
        dominance = dominance && min_gap >= -10.0 * scfg.newton_tol;
        resid_nonneg = resid_nonneg && min_resid >= -resid_slack;
        resid_off = resid_off && off_max <= resid_slack;
        contact_all = contact_all && contact > 0;
        if (!solutions.empty()) {
            const GridFunction& prev = solutions.back();
            for (std::size_t i = 0; i < wk.values().size(); ++i)
                ordered = ordered && prev.values()[i] <=
                                         wk.values()[i] +
                                             10.0 * scfg.newton_tol;
        }
        table += std::to_string(k) + "," + num(0.4 + 0.2 * k) + "," +
                 std::to_string(contact) + "," + num(min_gap) + "," +
                 num(min_resid) + "," + num(off_max) + "\n";
        w.write("solution_rung" + std::to_string(k) + ".csv", grid_csv(wk));
        solutions.push_back(wk);
    }
    w.write("obstacle_table.csv", table);

    push_check(checks, "solutions ordered along the obstacle ladder", ordered,
               "");
    push_check(checks, "solutions dominate their obstacles", dominance, "");
    push_check(checks, "scheme residual nonnegative everywhere", resid_nonneg,
               "slack = " + num(resid_slack));
    push_check(checks, "residual vanishes away from the contact set",
               resid_off, "clearance = " + num(clearance));
    push_check(checks, "every rung has a nonempty contact set", contact_all,
               "");
}

json classification_to_json(const ClassificationReport& rep) {
    json j;
    j["weak_min_residual"] = rep.weak_min_residual;
    j["very_weak_min_residual"] = rep.very_weak_min_residual;
    j["superporous_worst_violation"] = rep.superporous_worst_violation;
    j["weak_pass"] = rep.weak_pass;
    j["very_weak_pass"] = rep.very_weak_pass;
    j["superporous_pass"] = rep.superporous_pass;
    j["tolerance"] = rep.tolerance;
    return j;
}

void run_equivalence(const ExperimentConfig& cfg, const GridSpec& g,
                     ArtifactWriter& w, std::vector<CheckResult>& checks) {
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    std::vector<CorpusSpec> specs = corpus_specs(cfg.seed);

    std::string csv =
        "member,kind,weak_min,very_weak_min,superporous_violation,weak,"
        "very_weak,superporous,agree\n";
    json members = json::array();
    int agree_count = 0, disagreements = 0, unresolved = 0;
    bool controls_fail = true;
    for (const CorpusSpec& s : specs) {
        GridFunction u = build_member(s, c, scfg);
        ClassificationReport rep = classify(u, scfg, cfg.verdict_tol);
        bool agree = rep.weak_pass == rep.very_weak_pass &&
                     rep.very_weak_pass == rep.superporous_pass;
        agree_count += agree;

        json mj = classification_to_json(rep);
        mj["member"] = s.name;
        mj["kind"] = s.kind;
        mj["agree"] = agree;
        if (!agree) {
            ++disagreements;
            Cylinder fine = make_cylinder(g.a, g.b, g.t_begin, g.t_end,
                                          2 * g.n_cells, 2 * g.n_steps);
            SolverConfig fcfg = scenario_solver_config(cfg, fine);
            ClassificationReport frep =
                classify(build_member(s, fine, fcfg), fcfg, cfg.verdict_tol);
            bool fine_agree = frep.weak_pass == frep.very_weak_pass &&
                              frep.very_weak_pass == frep.superporous_pass;
            unresolved += !fine_agree;
            mj["refined"] = classification_to_json(frep);
            mj["resolved_by_refinement"] = fine_agree;
        }
        if (s.kind == "control")
            controls_fail = controls_fail && !rep.weak_pass &&
                            !rep.very_weak_pass && !rep.superporous_pass;
        members.push_back(mj);

        csv += s.name + "," + s.kind + "," + num(rep.weak_min_residual) +
               "," + num(rep.very_weak_min_residual) + "," +
               num(rep.superporous_worst_violation) + "," +
               std::to_string(rep.weak_pass) + "," +
               std::to_string(rep.very_weak_pass) + "," +
               std::to_string(rep.superporous_pass) + "," +
               std::to_string(agree) + "\n";
    }
    w.write("corpus.csv", csv);
    w.write("corpus_report.json", members.dump(2) + "\n");

    int n = static_cast<int>(specs.size());
    push_check(checks, "corpus holds at least 20 members", n >= 20,
               std::to_string(n) + " members");
    push_check(checks, "three-way verdict agreement at or above 95%",
               agree_count >= 0.95 * n,
               std::to_string(agree_count) + "/" + std::to_string(n));
    push_check(checks, "every disagreement resolved by one refinement",
               unresolved == 0,
               std::to_string(disagreements) + " disagreement(s)");
    push_check(checks, "both negative controls fail all three notions",
               controls_fail, "");
}

void run_caccioppoli(const ExperimentConfig& cfg, const GridSpec& g,
                     ArtifactWriter& w, std::vector<CheckResult>& checks) {
    Cylinder c = make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells,
                               g.n_steps);
    SolverConfig scfg = scenario_solver_config(cfg, c);
    std::vector<CorpusSpec> specs = corpus_specs(cfg.seed);

    SpatialCutoff zeta{0.5 * (g.a + g.b), 0.45 * (g.b - g.a), 1.0};
    std::string csv = "member,kind,M,lhs,rhs,pass\n";
    bool all_pass = true;
    for (const CorpusSpec& s : specs) {
        if (s.control) continue;
        GridFunction u = build_member(s, c, scfg);
        double M = u.max_value();
        CaccioppoliResult r = caccioppoli_check(u, zeta, cfg.m, M);
        all_pass = all_pass && r.pass;
        csv += s.name + "," + s.kind + "," + num(M) + "," + num(r.lhs) + "," +
               num(r.rhs) + "," + std::to_string(r.pass) + "\n";
    }
    w.write("energy_table.csv", csv);

    // Shrinking the time gap to the source solution's singularity: the
    // left side of the bound grows without bound while the bound itself
    // (driven by the growing sup) stays ahead.
    BarenblattParams p{cfg.m, 1, 1.0};
    SpatialCutoff zb{0.0, 3.0, 1.0};
    std::string blow = "t0,sup,lhs,rhs\n";
    double prev = 0.0;
    bool growth = true;
    for (double t0 : {0.2, 0.05, 0.0125}) {
        Cylinder cb = make_cylinder(-4.0, 4.0, t0, 1.0, 256, 128);
        GridFunction u = GridFunction::tabulate(
            cb, [&](double x, double t) { return barenblatt(x, t, p); });
        CaccioppoliResult r = caccioppoli_check(u, zb, cfg.m, u.max_value());
        growth = growth && r.lhs > 1.8 * prev;
        prev = r.lhs;
        blow += num(t0) + "," + num(u.max_value()) + "," + num(r.lhs) + "," +
                num(r.rhs) + "\n";
    }
    w.write("blowup_table.csv", blow);

    push_check(checks, "energy bound holds on every corpus supersolution",
               all_pass, "");
    push_check(checks,
               "gradient energy grows unbounded toward the initial "
               "singularity",
               growth && prev > 1.0, "final lhs = " + num(prev));
}

GridSpec default_grid(const std::string& scenario) {
    if (scenario == "barenblatt_validation")
        return {-6.0, 6.0, 1.0, 2.0, 600, 2000};
    if (scenario == "comparison_sweep") return {0.0, 1.0, 0.0, 0.5, 64, 64};
    if (scenario == "perturbation_gap") return {-4.0, 4.0, 1.0, 1.5, 64, 64};
    if (scenario == "schwarz_union") return {0.0, 1.0, 0.0, 0.5, 64, 64};
    if (scenario == "obstacle_demo") return {0.0, 1.0, 0.0, 0.25, 64, 32};
    return {0.0, 1.0, 0.0, 0.5, 256, 256};
}

// ---------------------------------------------------------------------------
// config parsing

[[noreturn]] void bad_key(const std::string& key, const std::string& what) {
    throw ConfigError("config: key \"" + key + "\" " + what);
}

double want_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) bad_key(key, "must be a number");
    return j.at(key).get<double>();
}

int want_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) bad_key(key, "must be an integer");
    return j.at(key).get<int>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& prefix) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("config: unknown key \"" + prefix + item.key() +
                              "\"");
}

GridSpec parse_grid(const json& jg) {
    if (!jg.is_object()) bad_key("grid", "must be an object");
    reject_unknown(jg, {"a", "b", "t_begin", "t_end", "n_cells", "n_steps"},
                   "grid.");
    for (const char* key :
         {"a", "b", "t_begin", "t_end", "n_cells", "n_steps"})
        if (!jg.contains(key))
            throw ConfigError("config: missing key \"grid." +
                              std::string(key) + "\"");
    GridSpec g;
    g.a = want_number(jg, "a", 0.0);
    g.b = want_number(jg, "b", 0.0);
    g.t_begin = want_number(jg, "t_begin", 0.0);
    g.t_end = want_number(jg, "t_end", 0.0);
    g.n_cells = want_int(jg, "n_cells", 0);
    g.n_steps = want_int(jg, "n_steps", 0);
    if (!(g.a < g.b)) bad_key("grid.b", "must exceed grid.a");
    if (!(g.t_begin < g.t_end)) bad_key("grid.t_end", "must exceed grid.t_begin");
    if (g.n_cells < 2) bad_key("grid.n_cells", "must be at least 2");
    if (g.n_steps < 1) bad_key("grid.n_steps", "must be at least 1");
    return g;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = {
        {"barenblatt_validation",
         "solve from the source-type profile and compare with the closed "
         "form: L1 error, refinement trend, exponent, mass drift"},
        {"comparison_sweep",
         "randomized ordered data pairs must stay nodewise ordered"},
        {"perturbation_gap",
         "data-perturbation bound, rung ladder and boundary attainment"},
        {"schwarz_union",
         "alternating method on an overlapping 3-member union against the "
         "direct solve"},
        {"obstacle_demo",
         "monotone obstacle ladder: ordering, dominance, complementarity "
         "residuals"},
        {"equivalence_suite",
         "classify a seeded corpus under all three supersolution notions"},
        {"caccioppoli_suite",
         "energy bound over the corpus and the gradient blow-up diagnostic"},
    };
    return catalog;
}

std::string list_scenarios() {
    std::string out;
    for (const ScenarioInfo& s : scenario_catalog())
        out += s.name + " - " + s.description + "\n";
    return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("config: top level must be an object");
    reject_unknown(j,
                   {"scenario", "grid", "m", "regularization", "tolerances",
                    "output_dir", "seed"},
                   "");

    ExperimentConfig cfg;
    if (!j.contains("scenario"))
        throw ConfigError("config: missing key \"scenario\"");
    if (!j.at("scenario").is_string()) bad_key("scenario", "must be a string");
    cfg.scenario = j.at("scenario").get<std::string>();
    bool known = false;
    for (const ScenarioInfo& s : scenario_catalog())
        known = known || s.name == cfg.scenario;
    if (!known)
        throw ConfigError("config: key \"scenario\" names no scenario: \"" +
                          cfg.scenario + "\"");

    if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"));

    cfg.m = want_number(j, "m", cfg.m);
    if (!(cfg.m > 1.0)) bad_key("m", "must exceed 1");

    if (j.contains("regularization")) {
        const json& jr = j.at("regularization");
        if (!jr.is_object()) bad_key("regularization", "must be an object");
        reject_unknown(jr, {"n_reg", "c_lin"}, "regularization.");
        cfg.n_reg = want_int(jr, "n_reg", cfg.n_reg);
        if (cfg.n_reg < 0) bad_key("regularization.n_reg", "must be >= 0");
        cfg.c_lin = want_number(jr, "c_lin", cfg.c_lin);
        if (cfg.c_lin < 0.0) bad_key("regularization.c_lin", "must be >= 0");
    }
    if (j.contains("tolerances")) {
        const json& jt = j.at("tolerances");
        if (!jt.is_object()) bad_key("tolerances", "must be an object");
        reject_unknown(jt, {"newton", "sweep", "verdict"}, "tolerances.");
        cfg.newton_tol = want_number(jt, "newton", cfg.newton_tol);
        if (!(cfg.newton_tol > 0.0)) bad_key("tolerances.newton", "must be > 0");
        cfg.sweep_tol = want_number(jt, "sweep", cfg.sweep_tol);
        if (!(cfg.sweep_tol > 0.0)) bad_key("tolerances.sweep", "must be > 0");
        cfg.verdict_tol = want_number(jt, "verdict", cfg.verdict_tol);
        if (cfg.verdict_tol < 0.0) bad_key("tolerances.verdict", "must be >= 0");
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            bad_key("output_dir", "must be a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
        if (cfg.output_dir.empty()) bad_key("output_dir", "must not be empty");
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() &&
            !(j.at("seed").is_number_integer() &&
              j.at("seed").get<std::int64_t>() >= 0))
            bad_key("seed", "must be a nonnegative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read \"" + path + "\"");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config(text);
}

RunResult run_scenario(const ExperimentConfig& cfg) {
    bool known = false;
    for (const ScenarioInfo& s : scenario_catalog())
        known = known || s.name == cfg.scenario;
    if (!known)
        throw ConfigError("config: key \"scenario\" names no scenario: \"" +
                          cfg.scenario + "\"");

    GridSpec g = cfg.grid ? *cfg.grid : default_grid(cfg.scenario);
    ArtifactWriter w(cfg.output_dir);
    std::vector<CheckResult> checks;
    int code = 0;
    try {
        if (cfg.scenario == "barenblatt_validation")
            run_barenblatt(cfg, g, w, checks);
        else if (cfg.scenario == "comparison_sweep")
            run_comparison(cfg, g, w, checks);
        else if (cfg.scenario == "perturbation_gap")
            run_perturbation(cfg, g, w, checks);
        else if (cfg.scenario == "schwarz_union")
            run_schwarz(cfg, g, w, checks);
        else if (cfg.scenario == "obstacle_demo")
            run_obstacle(cfg, g, w, checks);
        else if (cfg.scenario == "equivalence_suite")
            run_equivalence(cfg, g, w, checks);
        else
            run_caccioppoli(cfg, g, w, checks);
        for (const CheckResult& ch : checks)
            if (!ch.pass) code = 1;
    } catch (const std::exception& e) {
        checks.push_back({"scenario completed", false, e.what()});
        code = 3;
    }

    json verdict;
    verdict["scenario"] = cfg.scenario;
    verdict["seed"] = cfg.seed;
    verdict["exit_code"] = code;
    verdict["pass"] = code == 0;
    json jc = json::array();
    for (const CheckResult& ch : checks) {
        json one;
        one["name"] = ch.name;
        one["pass"] = ch.pass;
        one["detail"] = ch.detail;
        jc.push_back(one);
    }
    verdict["checks"] = jc;
    w.write("verdict.json", verdict.dump(2) + "\n");

    json manifest;
    manifest["scenario"] = cfg.scenario;
    manifest["seed"] = cfg.seed;
    json files = json::array();
    std::vector<ArtifactWriter::Entry> sorted = w.entries;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.path < y.path; });
    for (const auto& e : sorted) {
        json one;
        one["path"] = e.path;
        one["bytes"] = e.bytes;
        one["fnv1a64"] = hex64(e.hash);
        files.push_back(one);
    }
    manifest["files"] = files;
    std::ofstream mout(std::filesystem::path(cfg.output_dir) /
                           "manifest.json",
                       std::ios::binary);
    std::string mtext = manifest.dump(2) + "\n";
    mout.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
    mout.close();
    if (!mout)
        throw std::runtime_error("cannot write manifest.json in " +
                                 cfg.output_dir);

    RunResult result;
    result.exit_code = code;
    result.checks = std::move(checks);
    for (const auto& e : w.entries) result.files.push_back(e.path);
    result.files.push_back("manifest.json");
    return result;
}

std::string cylinder_to_config(const Cylinder& c) {
    json j;
    j["grid"] = {{"a", c.space.a},
                 {"b", c.space.b},
                 {"t_begin", c.time.t_begin},
                 {"t_end", c.time.t_end},
                 {"n_cells", c.space.n_cells},
                 {"n_steps", c.time.n_steps}};
    return j.dump(2) + "\n";
}

Cylinder cylinder_from_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object() || !j.contains("grid"))
        throw ConfigError("config: missing key \"grid\"");
    GridSpec g = parse_grid(j.at("grid"));
    return make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells, g.n_steps);
}

std::string union_to_config(const CylinderUnion& k) {
    json j = json::parse(cylinder_to_config(k.ambient()));
    json members = json::array();
    for (const IndexBox& b : k.members())
        members.push_back({{"ix_lo", b.ix_lo},
                           {"ix_hi", b.ix_hi},
                           {"it_lo", b.it_lo},
                           {"it_hi", b.it_hi}});
    j["members"] = members;
    return j.dump(2) + "\n";
}

CylinderUnion union_from_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object() || !j.contains("grid"))
        throw ConfigError("config: missing key \"grid\"");
    GridSpec g = parse_grid(j.at("grid"));
    if (!j.contains("members") || !j.at("members").is_array() ||
        j.at("members").empty())
        throw ConfigError("config: key \"members\" must be a nonempty array");
    std::vector<IndexBox> members;
    for (const json& jm : j.at("members")) {
        if (!jm.is_object())
            throw ConfigError("config: key \"members\" holds a non-object");
        reject_unknown(jm, {"ix_lo", "ix_hi", "it_lo", "it_hi"}, "members.");
        IndexBox b;
        b.ix_lo = want_int(jm, "ix_lo", 0);
        b.ix_hi = want_int(jm, "ix_hi", 0);
        b.it_lo = want_int(jm, "it_lo", 0);
        b.it_hi = want_int(jm, "it_hi", 0);
        members.push_back(b);
    }
    return CylinderUnion(
        make_cylinder(g.a, g.b, g.t_begin, g.t_end, g.n_cells, g.n_steps),
        std::move(members));
}

}  // namespace pml
