#include "pml/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "pml/boundary_data.hpp"
#include "pml/nonlinearity.hpp"
#include "pml/quadrature.hpp"

namespace pml {

namespace {

double bump(double q) {
    if (std::abs(q) >= 1.0) return 0.0;
    double w = 1.0 - q * q;
    double w2 = w * w;
    return w2 * w2;
}

double bump_d1(double q) {
    if (std::abs(q) >= 1.0) return 0.0;
    double w = 1.0 - q * q;
    return -8.0 * q * w * w * w;
}

double bump_d2(double q) {
    if (std::abs(q) >= 1.0) return 0.0;
    double w = 1.0 - q * q;
    return 8.0 * w * w * (7.0 * q * q - 1.0);
}

// centered interior, one-sided at the walls
double diff_x(const std::vector<double>& f, int i, int n, double h) {
    if (i == 0) return (f[1] - f[0]) / h;
    if (i == n) return (f[n] - f[n - 1]) / h;
    return (f[i + 1] - f[i - 1]) / (2 * h);
}

struct LatticeQuad {
    const Cylinder& c;
    double wx(int i) const {
        double h = c.space.spacing();
        return (i == 0 || i == c.space.n_cells) ? h / 2 : h;
    }
    double wt(int k) const {
        double tau = c.time.dt();
        return (k == 0 || k == c.time.n_steps) ? tau / 2 : tau;
    }
};

void require_supported(const BumpTestFunction& tf, const Cylinder& c) {
    if (!tf.supported_inside(c))
        throw std::invalid_argument(
            "test function support is not inside the cylinder");
}

// nodes whose coordinate can see the bump; conservative by one node
std::pair<int, int> x_range(const BumpTestFunction& tf, const Cylinder& c) {
    double h = c.space.spacing();
    int lo = std::max(0, int(std::floor((tf.x0 - tf.rx - c.space.a) / h)) - 1);
    int hi = std::min(c.space.n_cells,
                      int(std::ceil((tf.x0 + tf.rx - c.space.a) / h)) + 1);
    return {lo, hi};
}

std::pair<int, int> t_range(const BumpTestFunction& tf, const Cylinder& c) {
    double tau = c.time.dt();
    int lo = std::max(0, int(std::floor((tf.t0 - tf.rt - c.time.t_begin) / tau)) - 1);
    int hi = std::min(c.time.n_steps,
                      int(std::ceil((tf.t0 + tf.rt - c.time.t_begin) / tau)) + 1);
    return {lo, hi};
}

double bump_integral_on_lattice(const BumpTestFunction& tf, const Cylinder& c) {
    LatticeQuad q{c};
    auto [ilo, ihi] = x_range(tf, c);
    auto [klo, khi] = t_range(tf, c);
    double sx = 0.0;
    for (int i = ilo; i <= ihi; ++i)
        sx += q.wx(i) * bump((c.space.node(i) - tf.x0) / tf.rx);
    double st = 0.0;
    for (int k = klo; k <= khi; ++k)
        st += q.wt(k) * bump((c.time.level(k) - tf.t0) / tf.rt);
    return tf.amplitude * sx * st;
}

}  // namespace

double BumpTestFunction::value(double x, double t) const {
    return amplitude * bump((x - x0) / rx) * bump((t - t0) / rt);
}

double BumpTestFunction::dt(double x, double t) const {
    return amplitude * bump((x - x0) / rx) * bump_d1((t - t0) / rt) / rt;
}

double BumpTestFunction::dx(double x, double t) const {
    return amplitude * bump_d1((x - x0) / rx) / rx * bump((t - t0) / rt);
}

double BumpTestFunction::dxx(double x, double t) const {
    return amplitude * bump_d2((x - x0) / rx) / (rx * rx) * bump((t - t0) / rt);
}

bool BumpTestFunction::supported_inside(const Cylinder& c) const {
    if (!(rx > 0) || !(rt > 0)) return false;
    return x0 - rx > c.space.a && x0 + rx < c.space.b &&
           t0 - rt > c.time.t_begin && t0 + rt < c.time.t_end;
}

namespace {

// power values for one whole grid, shared across a scan's many bumps
std::vector<double> power_grid(const GridFunction& u, double m) {
    std::vector<double> pw(u.values().size());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = phi(u.values()[i], m);
    return pw;
}

double weak_residual_cached(const GridFunction& u, const BumpTestFunction& tf,
                            const std::vector<double>& pw) {
    const Cylinder& c = u.domain();
    require_supported(tf, c);
    LatticeQuad q{c};
    int n = c.space.n_cells;
    double h = c.space.spacing();
    auto [ilo, ihi] = x_range(tf, c);
    auto [klo, khi] = t_range(tf, c);

    double acc = 0.0;
    for (int k = klo; k <= khi; ++k) {
        double t = c.time.level(k);
        const double* row_pw = pw.data() + c.node_index(0, k);
        double row = 0.0;
        for (int i = ilo; i <= ihi; ++i) {
            double x = c.space.node(i);
            double g = (i == 0)   ? (row_pw[1] - row_pw[0]) / h
                       : (i == n) ? (row_pw[n] - row_pw[n - 1]) / h
                                  : (row_pw[i + 1] - row_pw[i - 1]) / (2 * h);
            row += q.wx(i) * (-u(i, k) * tf.dt(x, t) + g * tf.dx(x, t));
        }
        acc += q.wt(k) * row;
    }
    return acc;
}

double very_weak_residual_cached(const GridFunction& u,
                                 const BumpTestFunction& tf,
                                 const std::vector<double>& pw) {
    const Cylinder& c = u.domain();
    require_supported(tf, c);
    LatticeQuad q{c};
    auto [ilo, ihi] = x_range(tf, c);
    auto [klo, khi] = t_range(tf, c);

    double acc = 0.0;
    for (int k = klo; k <= khi; ++k) {
        double t = c.time.level(k);
        const double* row_pw = pw.data() + c.node_index(0, k);
        double row = 0.0;
        for (int i = ilo; i <= ihi; ++i) {
            double x = c.space.node(i);
            row += q.wx(i) *
                   (-u(i, k) * tf.dt(x, t) - row_pw[i] * tf.dxx(x, t));
        }
        acc += q.wt(k) * row;
    }
    return acc;
}

}  // namespace

double weak_residual(const GridFunction& u, const BumpTestFunction& tf,
                     double m) {
    return weak_residual_cached(u, tf, power_grid(u, m));
}

double very_weak_residual(const GridFunction& u, const BumpTestFunction& tf,
                          double m) {
    return very_weak_residual_cached(u, tf, power_grid(u, m));
}

std::vector<BumpTestFunction> default_bump_family(const Cylinder& c) {
    std::vector<BumpTestFunction> family;
    int n = c.space.n_cells, nt = c.time.n_steps;
    double h = c.space.spacing(), tau = c.time.dt();
    for (double scale : {0.5, 0.25, 0.125}) {
        // radii snapped to whole cells so support edges land on lattice nodes
        int cx = std::max(2, int(std::lround(scale * n / 2.0)));
        int ct = std::max(2, int(std::lround(scale * nt / 2.0)));
        for (int k = 2; k <= nt - 2; k += 2) {
            if (k - ct < 1 || k + ct > nt - 1) continue;
            for (int i = 2; i <= n - 2; i += 2) {
                if (i - cx < 1 || i + cx > n - 1) continue;
                family.push_back({c.space.node(i), c.time.level(k), cx * h,
                                  ct * tau, 1.0});
            }
        }
    }
    return family;
}

ScanResult residual_scan(const GridFunction& u,
                         const std::vector<BumpTestFunction>& family,
                         double m) {
    if (family.empty())
        throw std::invalid_argument("residual_scan: empty test family");
    ScanResult r;
    r.family_size = family.size();
    std::vector<double> pw = power_grid(u, m);
    bool first = true;
    for (const auto& tf : family) {
        double vol = bump_integral_on_lattice(tf, u.domain());
        double w = weak_residual_cached(u, tf, pw) / vol;
        double vw = very_weak_residual_cached(u, tf, pw) / vol;
        if (first) {
            r.weak_min = w;
            r.very_weak_min = vw;
            first = false;
        } else {
            r.weak_min = std::min(r.weak_min, w);
            r.very_weak_min = std::min(r.very_weak_min, vw);
        }
    }
    return r;
}

std::vector<IndexBox> default_superporous_samples(const Cylinder& c) {
    std::vector<IndexBox> samples;
    int n = c.space.n_cells, nt = c.time.n_steps;
    for (int denomw : {4, 2}) {
        int w = std::max(2, n / denomw);
        for (int denomd : {4, 2}) {
            int d = std::max(1, nt / denomd);
            int stridex = std::max(1, w / 2);
            int stridet = std::max(1, d / 2);
            for (int it = 0; it + d <= nt; it += stridet)
                for (int ix = 0; ix + w <= n; ix += stridex)
                    samples.push_back({ix, ix + w, it, it + d});
        }
    }
    return samples;
}

double superporous_check(const GridFunction& u,
                         const std::vector<IndexBox>& samples,
                         const SolverConfig& cfg, double /*tol*/) {
    const Cylinder& c = u.domain();
    double worst = 0.0;
    for (const auto& box : samples) {
        if (box.ix_lo < 0 || box.ix_hi > c.space.n_cells || box.it_lo < 0 ||
            box.it_hi > c.time.n_steps || box.ix_hi - box.ix_lo < 2 ||
            box.it_hi - box.it_lo < 1)
            throw std::invalid_argument("superporous_check: sample outside lattice");

        Cylinder sub = make_cylinder(
            c.space.node(box.ix_lo), c.space.node(box.ix_hi),
            c.time.level(box.it_lo), c.time.level(box.it_hi),
            box.ix_hi - box.ix_lo, box.it_hi - box.it_lo);

        BoundaryData bd;
        bd.initial.resize(sub.space.n_cells + 1);
        for (int i = 0; i <= sub.space.n_cells; ++i)
            bd.initial[i] = u(box.ix_lo + i, box.it_lo);
        bd.lateral_left.resize(sub.time.n_steps + 1);
        bd.lateral_right.resize(sub.time.n_steps + 1);
        for (int k = 0; k <= sub.time.n_steps; ++k) {
            bd.lateral_left[k] = phi(u(box.ix_lo, box.it_lo + k), cfg.m);
            bd.lateral_right[k] = phi(u(box.ix_hi, box.it_lo + k), cfg.m);
        }

        SolveResult h = solve_bvp(sub, bd, cfg);
        if (!h.report.converged)
            throw std::runtime_error("superporous_check: inner solve failed: " +
                                     h.report.diagnostic);
        for (int k = 1; k <= sub.time.n_steps; ++k)
            for (int i = 1; i < sub.space.n_cells; ++i)
                worst = std::max(worst,
                                 h.u(i, k) - u(box.ix_lo + i, box.it_lo + k));
    }
    return worst;
}

double SpatialCutoff::value(double x) const {
    return amplitude * bump((x - x0) / rx);
}

double SpatialCutoff::dx(double x) const {
    return amplitude * bump_d1((x - x0) / rx) / rx;
}

bool SpatialCutoff::supported_inside(const SpatialMesh& mesh) const {
    return rx > 0 && x0 - rx > mesh.a && x0 + rx < mesh.b;
}

CaccioppoliResult caccioppoli_check(const GridFunction& u,
                                    const SpatialCutoff& zeta, double m,
                                    double M) {
    const Cylinder& c = u.domain();
    if (u.max_value() > M)
        throw std::invalid_argument("caccioppoli_check: u exceeds the bound M");
    if (!zeta.supported_inside(c.space))
        throw std::invalid_argument(
            "caccioppoli_check: cutoff not supported inside the interval");

    LatticeQuad q{c};
    int n = c.space.n_cells;
    double h = c.space.spacing();
    std::vector<double> pw(n + 1);
    double lhs = 0.0;
    for (int k = 0; k <= c.time.n_steps; ++k) {
        for (int i = 0; i <= n; ++i) pw[i] = phi(u(i, k), m);
        double row = 0.0;
        for (int i = 0; i <= n; ++i) {
            double z = zeta.value(c.space.node(i));
            double g = diff_x(pw, i, n, h);
            row += q.wx(i) * z * z * g * g;
        }
        lhs += q.wt(k) * row;
    }

    double T = c.time.t_end - c.time.t_begin;
    double grad2 = integrate([&](double x) {
                       double g = zeta.dx(x);
                       return g * g;
                   }, zeta.x0 - zeta.rx, zeta.x0 + zeta.rx).value;
    double val2 = integrate([&](double x) {
                      double z = zeta.value(x);
                      return z * z;
                  }, zeta.x0 - zeta.rx, zeta.x0 + zeta.rx).value;
    double rhs = 16.0 * std::pow(M, 2 * m) * T * grad2 +
                 4.0 * std::pow(M, m + 1) * val2;
    return {lhs, rhs, lhs <= rhs};
}

ClassificationReport classify(const GridFunction& u, const SolverConfig& cfg,
                              double tol) {
    const Cylinder& c = u.domain();
    if (u.min_value() < 0)
        throw std::invalid_argument("classify: input must be nonnegative");
    double sup = u.max_value();
    if (tol <= 0)
        tol = 5.0 * (c.space.spacing() + c.time.dt()) *
              std::pow(1.0 + sup, cfg.m);

    ClassificationReport rep;
    ScanResult scan = residual_scan(u, default_bump_family(c), cfg.m);
    rep.weak_min_residual = scan.weak_min;
    rep.very_weak_min_residual = scan.very_weak_min;
    rep.superporous_worst_violation =
        superporous_check(u, default_superporous_samples(c), cfg, tol);
    rep.tolerance = tol;
    rep.weak_pass = scan.weak_min >= -tol;
    rep.very_weak_pass = scan.very_weak_min >= -tol;
    rep.superporous_pass = rep.superporous_worst_violation <= tol;
    rep.family = "bumps: centers every 2nd node, radius scales {1/2,1/4,1/8} "
                 "of half-extents; samples: width {1/4,1/2} x depth {1/4,1/2}, "
                 "half-stride anchors; tolerance 5(h+tau)(1+sup u)^m";
    return rep;
}

std::string classification_json(const ClassificationReport& r) {
    nlohmann::json j;
    j["weak_min_residual"] = r.weak_min_residual;
    j["very_weak_min_residual"] = r.very_weak_min_residual;
    j["superporous_worst_violation"] = r.superporous_worst_violation;
    j["weak_pass"] = r.weak_pass;
    j["very_weak_pass"] = r.very_weak_pass;
    j["superporous_pass"] = r.superporous_pass;
    j["tolerance"] = r.tolerance;
    j["family"] = r.family;
    return j.dump(2);
}

}  // namespace pml
