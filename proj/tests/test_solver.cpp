#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "pml/barenblatt.hpp"
#include "pml/boundary_data.hpp"
#include "pml/solver.hpp"

using namespace pml;

namespace {

BoundaryData constant_data(const Cylinder& c, double value, double m) {
    return boundary_from_functions(
        c, [=](double) { return value; },
        [=](double, double) { return phi(value, m); });
}

// residual of the implicit step at one interior node, recomputed from scratch
double step_residual(const GridFunction& u, int i, int k, double m) {
    double h = u.domain().space.spacing();
    double tau = u.domain().time.dt();
    double lap = phi(u(i - 1, k), m) - 2.0 * phi(u(i, k), m) + phi(u(i + 1, k), m);
    return (u(i, k) - u(i, k - 1)) / tau - lap / (h * h);
}

}  // namespace

TEST_CASE("constant data is reproduced to solver tolerance") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 20, 10);
    for (double value : {0.0, 1.0, 2.5}) {
        SolveResult r = solve_bvp(c, constant_data(c, value, 2.0));
        CHECK(r.report.converged);
        for (int k = 0; k <= 10; ++k)
            for (int i = 0; i <= 20; ++i)
                CHECK(std::abs(r.u(i, k) - value) <= 1e-12);
    }
}

TEST_CASE("stationary profile with affine pressure is a discrete fixed point") {
    // (w^m)'' = 0 exactly on the grid, so w repeats at every level
    SteadyState w{1.0, 0.5, 2.0};
    Cylinder c = make_cylinder(0.0, 2.0, 0.0, 1.0, 16, 8);
    BoundaryData bd = boundary_from_functions(
        c, [&](double x) { return w(x); },
        [&](double x, double) { return phi(w(x), 2.0); });
    SolveResult r = solve_bvp(c, bd);
    CHECK(r.report.converged);
    for (int k = 0; k <= 8; ++k)
        for (int i = 0; i <= 16; ++i)
            CHECK(r.u(i, k) == doctest::Approx(w(c.space.node(i))).epsilon(1e-10));
}

TEST_CASE("source solution: sup error shrinks under refinement") {
    BarenblattParams p;   // m = 2, n = 1, C = 1
    double errs[3];
    int cells[3] = {60, 120, 240};
    int steps[3] = {50, 100, 200};
    for (int lvl = 0; lvl < 3; ++lvl) {
        Cylinder c = make_cylinder(-6.0, 6.0, 1.0, 2.0, cells[lvl], steps[lvl]);
        BoundaryData bd = boundary_from_functions(
            c, [&](double x) { return barenblatt(x, 1.0, p); },
            [&](double x, double t) { return phi(barenblatt(x, t, p), 2.0); });
        SolveResult r = solve_bvp(c, bd);
        CHECK(r.report.converged);
        double err = 0.0;
        for (int k = 0; k <= c.time.n_steps; ++k)
            for (int i = 0; i <= c.space.n_cells; ++i)
                err = std::max(err, std::abs(r.u(i, k) -
                                             barenblatt(c.space.node(i),
                                                        c.time.level(k), p)));
        errs[lvl] = err;
    }
    CHECK(errs[0] < 0.05);
    CHECK(errs[1] < errs[0]);
    CHECK(errs[2] < errs[1]);
    // the interface limits the scheme to roughly first order; just require
    // a sustained decrease rate
    double rate = std::log2(errs[0] / errs[2]) / 2.0;
    CHECK(rate >= 0.8);
}

TEST_CASE("discrete comparison principle on randomized ordered data") {
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 0.5, 24, 12);
    for (int trial = 0; trial < 4; ++trial) {
        // random smooth-ish lower data, then an ordered lift of it
        double a0 = 0.2 + unif(rng), a1 = unif(rng), w0 = 2.0 + 4.0 * unif(rng);
        double lift = 0.05 + 0.5 * unif(rng);
        auto u0 = [&](double x) { return a0 + a1 * 0.5 * (1 + std::sin(w0 * x)); };
        auto g = [&](double x, double t) {
            return phi(u0(x) * std::exp(-t), 2.0);
        };
        auto u0hi = [&](double x) { return u0(x) + lift; };
        auto ghi = [&](double x, double t) {
            return phi(u0(x) * std::exp(-t) + lift, 2.0);
        };
        SolveResult lo = solve_bvp(c, boundary_from_functions(c, u0, g));
        SolveResult hi = solve_bvp(c, boundary_from_functions(c, u0hi, ghi));
        REQUIRE(lo.report.converged);
        REQUIRE(hi.report.converged);
        for (int k = 0; k <= 12; ++k)
            for (int i = 0; i <= 24; ++i)
                CHECK(lo.u(i, k) <= hi.u(i, k) + 1e-10);
    }
}

TEST_CASE("solutions stay inside the bounds of their data") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 30, 15);
    BoundaryData bd = boundary_from_functions(
        c, [](double x) {
            double s = std::sin(M_PI * x);
            return 0.25 + 0.5 * x + 0.8 * s * s;
        },
        [](double x, double t) { return phi(0.25 + 0.5 * x + 0.2 * t, 2.0); });
    auto [lo, hi] = data_bounds(bd, 2.0);
    SolveResult r = solve_bvp(c, bd);
    CHECK(r.report.converged);
    CHECK(r.u.min_value() >= lo - 1e-12);
    CHECK(r.u.max_value() <= hi + 1e-12);
}

TEST_CASE("regularized runs converge to the degenerate one") {
    Cylinder c = make_cylinder(-2.0, 2.0, 0.1, 0.6, 40, 25);
    BarenblattParams p{2.0, 1, 0.1};
    BoundaryData bd = boundary_from_functions(
        c, [&](double x) { return barenblatt(x, 0.1, p); },
        [&](double x, double t) { return phi(barenblatt(x, t, p), 2.0); });

    SolverConfig cfg;
    SolveResult exact = solve_bvp(c, bd, cfg);

    SUBCASE("huge regularization index is indistinguishable") {
        cfg.n_reg = 1000000;
        SolveResult reg = solve_bvp(c, bd, cfg);
        CHECK(sup_distance(exact.u, reg.u) <= 1e-9);
    }
    SUBCASE("successive gaps shrink along n = 4, 16, 64, 256") {
        double prevgap = std::numeric_limits<double>::infinity();
        GridFunction prev(c);
        bool first = true;
        for (int n : {4, 16, 64, 256}) {
            cfg.n_reg = n;
            SolveResult reg = solve_bvp(c, bd, cfg);
            CHECK(reg.report.converged);
            if (!first) {
                double gap = sup_distance(prev, reg.u);
                CHECK(gap < prevgap + 1e-14);
                prevgap = gap;
            }
            prev = reg.u;
            first = false;
        }
        CHECK(prevgap < 5e-4);
        CHECK(sup_distance(prev, exact.u) < 1e-4);
    }
}

TEST_CASE("sign-changing problems") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 0.5, 16, 8);
    SolverConfig cfg;
    CHECK_THROWS_AS(solve_signed(c, constant_data(c, -1.0, 2.0), cfg),
                    std::invalid_argument);
    cfg.n_reg = 32;

    SUBCASE("negative constants are reproduced") {
        BoundaryData bd = boundary_from_functions(
            c, [](double) { return -1.0; },
            [&](double, double) { return -1.0; });   // odd power: phi(-1) = -1
        SolveResult r = solve_signed(c, bd, cfg);
        CHECK(r.report.converged);
        for (int k = 0; k <= 8; ++k)
            for (int i = 0; i <= 16; ++i)
                CHECK(std::abs(r.u(i, k) + 1.0) <= 1e-10);
    }
    SUBCASE("odd data produce an odd solution") {
        Cylinder sym = make_cylinder(-1.0, 1.0, 0.0, 0.5, 20, 10);
        auto u0 = [](double x) { return std::sin(M_PI * x); };
        BoundaryData bd = boundary_from_functions(
            sym, u0, [&](double x, double t) { return phi(u0(x) * (1 + t), 2.0); });
        SolveResult r = solve_signed(sym, bd, cfg);
        CHECK(r.report.converged);
        for (int k = 0; k <= 10; ++k)
            for (int i = 0; i <= 20; ++i)
                CHECK(r.u(i, k) + r.u(20 - i, k) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
}

TEST_CASE("mass accounting") {
    SUBCASE("constants on the unit interval have mass equal to the constant") {
        Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 10, 5);
        SolveResult r = solve_bvp(c, constant_data(c, 1.0, 2.0));
        for (int k = 0; k <= 5; ++k)
            CHECK(mass(r.u, k) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("compactly supported bump conserves mass exactly") {
        // support spreads at most one cell per step, so with enough margin
        // no flux ever reaches the walls and the update telescopes
        Cylinder c = make_cylinder(-4.0, 4.0, 0.0, 0.25, 64, 16);
        auto hat = [](double x) { return std::max(0.0, 1.0 - std::abs(x)); };
        BoundaryData bd = boundary_from_functions(
            c, hat, [](double, double) { return 0.0; });
        SolveResult r = solve_bvp(c, bd);
        CHECK(r.report.converged);
        double m0 = mass(r.u, 0);
        CHECK(m0 == doctest::Approx(1.0).epsilon(1e-12));   // trapezoid is exact on the hat
        for (int k = 1; k <= 16; ++k)
            CHECK(std::abs(mass(r.u, k) - m0) <= 1e-9);
        CHECK(r.report.mass_trace.size() == 17);
        CHECK(r.report.mass_trace[16] == doctest::Approx(mass(r.u, 16)).epsilon(1e-13));
    }
    SUBCASE("source solution keeps its mass while inside the window") {
        BarenblattParams p;
        Cylinder c = make_cylinder(-6.0, 6.0, 1.0, 2.0, 120, 100);
        BoundaryData bd = boundary_from_functions(
            c, [&](double x) { return barenblatt(x, 1.0, p); },
            [](double, double) { return 0.0; });
        SolveResult r = solve_bvp(c, bd);
        CHECK(r.report.converged);
        CHECK(std::abs(mass(r.u, 100) - mass(r.u, 0)) <= 1e-8);
    }
}

TEST_CASE("ordering gap functional") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 12, 6);
    GridFunction ones = GridFunction::tabulate(c, [](double, double) { return 1.0; });
    GridFunction zeros(c, 0.0);
    SUBCASE("vanishes for equal arguments") {
        CHECK(oleinik_gap(ones, ones, 2.0) == 0.0);
        CHECK(oleinik_gap(zeros, zeros, 2.0) == 0.0);
    }
    SUBCASE("constants integrate the box volume") {
        CHECK(oleinik_gap(ones, zeros, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
        GridFunction threes(c, 3.0);
        // (3 - 1)(9 - 1) = 16 over the unit box
        CHECK(oleinik_gap(threes, ones, 2.0) == doctest::Approx(16.0).epsilon(1e-12));
    }
    SUBCASE("nonnegative whenever the first argument dominates") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        GridFunction u(c), v(c);
        for (int k = 0; k <= 6; ++k)
            for (int i = 0; i <= 12; ++i) {
                double base = unif(rng);
                v(i, k) = base;
                u(i, k) = base + 0.5 * unif(rng);
            }
        CHECK(oleinik_gap(u, v, 2.0) >= 0.0);
        // and it is symmetric under swapping, both factors flip sign
        CHECK(oleinik_gap(v, u, 2.0) == doctest::Approx(oleinik_gap(u, v, 2.0)).epsilon(1e-13));
    }
    SUBCASE("mismatched lattices are rejected") {
        Cylinder other = make_cylinder(0.0, 1.0, 0.0, 1.0, 13, 6);
        GridFunction w(other, 1.0);
        CHECK_THROWS_AS(oleinik_gap(ones, w, 2.0), std::invalid_argument);
    }
}

TEST_CASE("boundary data validation") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 8, 4);
    SUBCASE("size mismatch") {
        BoundaryData bd = constant_data(c, 1.0, 2.0);
        bd.initial.pop_back();
        CHECK_THROWS_AS(solve_bvp(c, bd), std::invalid_argument);
    }
    SUBCASE("negative data rejected by the nonnegative solver") {
        BoundaryData bd = constant_data(c, 1.0, 2.0);
        bd.initial[3] = -0.2;
        CHECK_THROWS_AS(solve_bvp(c, bd), std::invalid_argument);
    }
    SUBCASE("corner incompatibility") {
        BoundaryData bd = constant_data(c, 1.0, 2.0);
        bd.lateral_left[0] = phi(2.0, 2.0);
        CHECK_THROWS_AS(solve_bvp(c, bd), std::invalid_argument);
        bd.compatibility_tol = 2.0;
        CHECK_NOTHROW(solve_bvp(c, bd));
    }
    SUBCASE("non-finite entries") {
        BoundaryData bd = constant_data(c, 1.0, 2.0);
        bd.lateral_right[2] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(solve_bvp(c, bd), std::invalid_argument);
    }
}

TEST_CASE("a starved iteration budget is reported, not hidden") {
    Cylinder c = make_cylinder(-2.0, 2.0, 0.0, 10.0, 24, 1);
    auto bump = [](double x) { return 5.0 * std::max(0.0, 1.0 - std::abs(x)); };
    BoundaryData bd = boundary_from_functions(
        c, bump, [](double, double) { return 0.0; });
    SolverConfig cfg;
    cfg.max_newton_iters = 1;
    cfg.newton_tol = 1e-14;
    SolveResult r = solve_bvp(c, bd, cfg);
    CHECK_FALSE(r.report.converged);
    CHECK_FALSE(r.report.diagnostic.empty());
    CHECK(r.u.all_finite());
}

TEST_CASE("report serializes to JSON") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 10, 4);
    SolveResult r = solve_bvp(c, constant_data(c, 1.5, 2.0));
    nlohmann::json j = nlohmann::json::parse(solve_report_json(r.report));
    CHECK(j["converged"].get<bool>());
    CHECK(j["newton_iters"].is_array());
    CHECK(j["newton_iters"].size() == 4);
    CHECK(j["mass_trace"].size() == 5);
    CHECK(j["mass_trace"][0].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(j["step_residuals"].size() == 4);
}

// obstacle problems -----------------------------------------------------------

TEST_CASE("an obstacle far below the data changes nothing") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 0.5, 16, 8);
    BoundaryData bd = boundary_from_functions(
        c, [](double x) { return 1.0 + x * (1 - x); },
        [](double, double t) { return phi(1.0, 2.0) + 0.1 * t; });
    GridFunction psi(c, -1000.0);
    SolveResult plain = solve_bvp(c, bd);
    SolveResult obst = solve_obstacle(c, psi, bd);
    CHECK(obst.report.converged);
    CHECK(sup_distance(plain.u, obst.u) <= 1e-12);
}

TEST_CASE("constant obstacle touching constant data pins the solution") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 0.5, 12, 6);
    GridFunction psi(c, 2.0);
    SolveResult r = solve_obstacle(c, psi, constant_data(c, 2.0, 2.0));
    CHECK(r.report.converged);
    for (int k = 0; k <= 6; ++k)
        for (int i = 0; i <= 12; ++i)
            CHECK(std::abs(r.u(i, k) - 2.0) <= 1e-12);
}

TEST_CASE("rising obstacle creates genuine contact with valid complementarity") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 32, 16);
    BoundaryData bd = constant_data(c, 0.5, 2.0);
    // tent in space growing linearly in time; beats 0.5 near the center later on
    GridFunction psi = GridFunction::tabulate(c, [](double x, double t) {
        return 0.9 * t * std::max(0.0, 1.0 - 4.0 * std::abs(x - 0.5));
    });
    SolveResult r = solve_obstacle(c, psi, bd);
    REQUIRE(r.report.converged);

    int contact = 0;
    for (int k = 1; k <= 16; ++k)
        for (int i = 1; i < 32; ++i) {
            double slack = r.u(i, k) - psi(i, k);
            CHECK(slack >= -1e-10);
            double res = step_residual(r.u, i, k, 2.0);
            if (slack <= 1e-9) {
                ++contact;
                CHECK(res >= -1e-7);        // pushing up against the obstacle
            } else if (slack >= 1e-6) {
                CHECK(std::abs(res) <= 1e-6);   // free region solves the PDE step
            }
        }
    CHECK(contact > 0);
    // contact must occur where the obstacle exceeds the unconstrained solution
    CHECK(r.u(16, 16) == doctest::Approx(psi(16, 16)).epsilon(1e-8));
}

TEST_CASE("solutions respond monotonically to the obstacle") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 20, 10);
    BoundaryData bd = constant_data(c, 0.5, 2.0);
    auto make_psi = [&](double height) {
        return GridFunction::tabulate(c, [=](double x, double t) {
            return height * t * std::max(0.0, 1.0 - 2.0 * std::abs(x - 0.5));
        });
    };
    GridFunction lowpsi = make_psi(0.2);
    GridFunction highpsi = make_psi(0.4);
    SolveResult wlow = solve_obstacle(c, lowpsi, bd);
    SolveResult whigh = solve_obstacle(c, highpsi, bd);
    REQUIRE(wlow.report.converged);
    REQUIRE(whigh.report.converged);
    for (int k = 0; k <= 10; ++k)
        for (int i = 0; i <= 20; ++i) {
            CHECK(wlow.u(i, k) <= whigh.u(i, k) + 1e-9);
            // and both dominate the unconstrained evolution
        }
    SolveResult plain = solve_bvp(c, bd);
    for (int k = 0; k <= 10; ++k)
        for (int i = 0; i <= 20; ++i)
            CHECK(plain.u(i, k) <= wlow.u(i, k) + 1e-9);
}

TEST_CASE("boundary data below the obstacle is rejected") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 1.0, 8, 4);
    BoundaryData bd = constant_data(c, 0.5, 2.0);
    SUBCASE("initial violation") {
        GridFunction psi(c, 0.0);
        psi(4, 0) = 0.7;
        CHECK_THROWS_AS(solve_obstacle(c, psi, bd), std::invalid_argument);
    }
    SUBCASE("lateral violation") {
        GridFunction psi(c, 0.0);
        psi(0, 2) = 0.7;
        CHECK_THROWS_AS(solve_obstacle(c, psi, bd), std::invalid_argument);
    }
    SUBCASE("lattice mismatch") {
        Cylinder other = make_cylinder(0.0, 1.0, 0.0, 1.0, 9, 4);
        GridFunction psi(other, 0.0);
        CHECK_THROWS_AS(solve_obstacle(c, psi, bd), std::invalid_argument);
    }
}

// Independent oracle: one implicit step with 5 interior unknowns, obstacle
// handled by enumerating all 32 active sets and solving the reduced nonlinear
// system densely.  The candidate that satisfies both inequality branches is
// the exact discrete solution.
namespace {

struct TinyStep {
    int n = 6;          // cells; unknowns are i = 1..5
    double h, tau, m = 2.0;
    std::vector<double> prev, psi, walls;  // walls: value at i = 0 and i = n

    std::vector<double> residual(const std::vector<double>& w) const {
        std::vector<double> full(n + 1);
        full[0] = walls[0];
        full[n] = walls[1];
        for (int i = 1; i < n; ++i) full[i] = w[i - 1];
        std::vector<double> F(n - 1);
        for (int i = 1; i < n; ++i) {
            double lap = phi(full[i - 1], m) - 2 * phi(full[i], m) + phi(full[i + 1], m);
            F[i - 1] = (full[i] - prev[i]) / tau - lap / (h * h);
        }
        return F;
    }

    // Newton on the nodes not in `active`, with w fixed to psi on `active`
    bool solve_inactive(unsigned active, std::vector<double>& w) const {
        for (int it = 0; it < 200; ++it) {
            std::vector<double> F = residual(w);
            double nrm = 0.0;
            std::vector<int> freeidx;
            for (int j = 0; j < 5; ++j)
                if (!(active >> j & 1u)) {
                    freeidx.push_back(j);
                    nrm = std::max(nrm, std::abs(F[j]));
                }
            if (nrm < 1e-13) return true;
            int nf = static_cast<int>(freeidx.size());
            if (nf == 0) return true;
            // dense Jacobian restricted to the free set
            std::vector<std::vector<double>> J(nf, std::vector<double>(nf, 0.0));
            std::vector<double> rhs(nf);
            for (int r = 0; r < nf; ++r) {
                int j = freeidx[r];
                rhs[r] = -F[j];
                for (int s = 0; s < nf; ++s) {
                    int kcol = freeidx[s];
                    if (kcol == j)
                        J[r][s] = 1.0 / tau + 2.0 * phi_prime(w[j], m) / (h * h);
                    else if (kcol == j - 1 || kcol == j + 1)
                        J[r][s] = -phi_prime(w[kcol], m) / (h * h);
                }
            }
            // gaussian elimination with partial pivoting
            for (int col = 0; col < nf; ++col) {
                int piv = col;
                for (int r = col + 1; r < nf; ++r)
                    if (std::abs(J[r][col]) > std::abs(J[piv][col])) piv = r;
                std::swap(J[piv], J[col]);
                std::swap(rhs[piv], rhs[col]);
                if (std::abs(J[col][col]) < 1e-300) return false;
                for (int r = col + 1; r < nf; ++r) {
                    double f = J[r][col] / J[col][col];
                    for (int s = col; s < nf; ++s) J[r][s] -= f * J[col][s];
                    rhs[r] -= f * rhs[col];
                }
            }
            for (int r = nf - 1; r >= 0; --r) {
                double s = rhs[r];
                for (int q = r + 1; q < nf; ++q) s -= J[r][q] * rhs[q];
                rhs[r] = s / J[r][r];
            }
            for (int r = 0; r < nf; ++r) w[freeidx[r]] += rhs[r];
        }
        return false;
    }

    // enumerate active sets; return interior values of the verified solution
    std::vector<double> brute_force() const {
        for (unsigned active = 0; active < 32; ++active) {
            std::vector<double> w(5);
            for (int j = 0; j < 5; ++j)
                w[j] = (active >> j & 1u) ? psi[j + 1] : std::max(prev[j + 1], psi[j + 1]);
            if (!solve_inactive(active, w)) continue;
            std::vector<double> F = residual(w);
            bool ok = true;
            for (int j = 0; j < 5; ++j) {
                if (active >> j & 1u) {
                    if (F[j] < -1e-9) ok = false;          // obstacle must push up
                } else {
                    if (w[j] < psi[j + 1] - 1e-9) ok = false;
                }
            }
            if (ok) return w;
        }
        throw std::runtime_error("no active set admitted a valid solution");
    }
};

}  // namespace

TEST_CASE("one constrained step agrees with active set enumeration") {
    Cylinder c = make_cylinder(0.0, 1.0, 0.0, 0.05, 6, 1);
    TinyStep ts;
    ts.h = c.space.spacing();
    ts.tau = c.time.dt();

    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        ts.prev.assign(7, 0.0);
        ts.psi.assign(7, 0.0);
        for (int i = 0; i <= 6; ++i) {
            ts.prev[i] = 0.3 + unif(rng);
            ts.psi[i] = unif(rng);   // sometimes above prev, sometimes below
        }
        // keep the boundary admissible: walls and the whole first level
        ts.psi[0] = std::min(ts.psi[0], ts.prev[0]);
        ts.psi[6] = std::min(ts.psi[6], ts.prev[6]);
        ts.walls = {ts.prev[0], ts.prev[6]};

        BoundaryData bd;
        bd.initial = ts.prev;
        bd.lateral_left = {phi(ts.prev[0], 2.0), phi(ts.prev[0], 2.0)};
        bd.lateral_right = {phi(ts.prev[6], 2.0), phi(ts.prev[6], 2.0)};

        GridFunction psi(c, 0.0);
        for (int i = 0; i <= 6; ++i) {
            psi(i, 0) = std::min(ts.psi[i], ts.prev[i]);
            psi(i, 1) = ts.psi[i];
        }
        ts.psi[0] = psi(0, 1) = std::min(ts.psi[0], ts.prev[0]);
        ts.psi[6] = psi(6, 1) = std::min(ts.psi[6], ts.prev[6]);

        std::vector<double> expect = ts.brute_force();
        SolveResult r = solve_obstacle(c, psi, bd);
        REQUIRE(r.report.converged);
        for (int j = 0; j < 5; ++j)
            CHECK(r.u(j + 1, 1) == doctest::Approx(expect[j]).epsilon(1e-8));
    }
}
