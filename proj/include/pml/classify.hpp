#pragma once

#include <string>
#include <vector>

#include "pml/grid_function.hpp"
#include "pml/mesh.hpp"
#include "pml/solver.hpp"

namespace pml {

/// Separable space-time bump  amplitude * b((x-x0)/rx) * b((t-t0)/rt)  with
/// b(q) = (1 - q^2)^4 on |q| < 1 and 0 outside: nonnegative, C^3, compactly
/// supported.  All derivative evaluators are analytic, so integrating against
/// lattice data adds no differentiation error on the test-function side.
struct BumpTestFunction {
    double x0 = 0.0;
    double t0 = 0.0;
    double rx = 1.0;
    double rt = 1.0;
    double amplitude = 1.0;

    double value(double x, double t) const;
    double dt(double x, double t) const;
    double dx(double x, double t) const;
    double dxx(double x, double t) const;

    /// Support contained in the open cylinder (support edges may touch
    /// interior lattice nodes, never the walls or the first/last level).
    bool supported_inside(const Cylinder& c) const;
};

/// Trapezoidal quadrature of  -u dphi/dt + D(u^m) dphi/dx  where D is the
/// centered first difference of the nodewise values of u^m (one-sided at the
/// walls, where the bump vanishes anyway).  Nonnegative values mean the input
/// behaves like a supersolution against this test function.  Throws
/// std::invalid_argument when the bump is not supported inside u's cylinder.
double weak_residual(const GridFunction& u, const BumpTestFunction& tf,
                     double m = 2.0);

/// Quadrature of  -u dphi/dt - u^m d2phi/dx2; both derivatives sit on the
/// test function and no difference of u is taken.
double very_weak_residual(const GridFunction& u, const BumpTestFunction& tf,
                          double m = 2.0);

struct ScanResult {
    double weak_min = 0.0;
    double very_weak_min = 0.0;
    std::size_t family_size = 0;
};

/// Bumps centered on every 2nd lattice node at radius scales 1/2, 1/4, 1/8 of
/// the half-extents, radii snapped to whole cells so support edges land on
/// nodes (this makes the time-derivative quadrature cancel exactly by
/// symmetry).  Only bumps supported inside the cylinder are kept.
std::vector<BumpTestFunction> default_bump_family(const Cylinder& c);

/// Minima over the family of the two residuals, each divided by the bump's
/// own integral so values are comparable across bump sizes (a raw residual
/// scales with the bump volume and would drown small-bump violations).
/// Throws std::invalid_argument for an empty family.
ScanResult residual_scan(const GridFunction& u,
                         const std::vector<BumpTestFunction>& family,
                         double m = 2.0);

/// Subcylinders of spatial width 1/4 and 1/2 of the domain and time depth 1/4
/// and 1/2, anchored on a half-width stride: finite and deterministic.
std::vector<IndexBox> default_superporous_samples(const Cylinder& c);

/// Comparison test behind the superporous notion: for every sample, solve the
/// equation with boundary data equal to u's trace on the sample's parabolic
/// boundary and record how far that solution rises above u inside.  Returns
/// the worst rise over all samples (<= tol means the comparison property held
/// on this family).  Inner solve failures propagate as std::runtime_error.
double superporous_check(const GridFunction& u,
                         const std::vector<IndexBox>& samples,
                         const SolverConfig& cfg = {}, double tol = 0.0);

/// Spatial cutoff amplitude * b((x-x0)/rx), same bump profile as above.
struct SpatialCutoff {
    double x0 = 0.0;
    double rx = 1.0;
    double amplitude = 1.0;

    double value(double x) const;
    double dx(double x) const;
    bool supported_inside(const SpatialMesh& mesh) const;
};

struct CaccioppoliResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = true;
};

/// Energy bound for bounded supersolutions:
///   integral of zeta^2 |D(u^m)|^2  <=  16 M^{2m} T |zeta'|_2^2 + 4 M^{m+1} |zeta|_2^2.
/// lhs by lattice quadrature with the centered difference of u^m, rhs by
/// adaptive quadrature of the analytic cutoff.  Requires u <= M nodewise and
/// the cutoff supported inside the spatial interval.
CaccioppoliResult caccioppoli_check(const GridFunction& u,
                                    const SpatialCutoff& zeta, double m,
                                    double M);

struct ClassificationReport {
    double weak_min_residual = 0.0;
    double very_weak_min_residual = 0.0;
    double superporous_worst_violation = 0.0;
    bool weak_pass = false;
    bool very_weak_pass = false;
    bool superporous_pass = false;
    double tolerance = 0.0;
    std::string family;
};

/// Runs residual_scan over the default bump family and superporous_check over
/// the default samples, then applies one verdict tolerance to all three.
/// tol = 0 selects the default 5 (h + tau) (1 + sup u)^m.  Requires u >= 0.
ClassificationReport classify(const GridFunction& u,
                              const SolverConfig& cfg = {}, double tol = 0.0);

std::string classification_json(const ClassificationReport& r);

}  // namespace pml
