#include "pml/boundary_data.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pml {

BoundaryData trace_data(const GridFunction& u, double m) {
    const Cylinder& c = u.domain();
    BoundaryData bd;
    auto first = u.level(0);
    bd.initial.assign(first.begin(), first.end());
    bd.lateral_left.resize(c.time.n_levels());
    bd.lateral_right.resize(c.time.n_levels());
    for (int k = 0; k <= c.time.n_steps; ++k) {
        bd.lateral_left[static_cast<std::size_t>(k)] = phi(u(0, k), m);
        bd.lateral_right[static_cast<std::size_t>(k)] =
            phi(u(c.space.n_cells, k), m);
    }
    return bd;
}

void validate_boundary_data(const Cylinder& c, const BoundaryData& bd, double m,
                            bool require_nonnegative) {
    std::ostringstream err;
    if (bd.initial.size() != static_cast<std::size_t>(c.space.n_nodes()))
        err << "boundary data: initial slice has " << bd.initial.size()
            << " values, lattice has " << c.space.n_nodes() << " nodes";
    else if (bd.lateral_left.size() != static_cast<std::size_t>(c.time.n_levels()) ||
             bd.lateral_right.size() != static_cast<std::size_t>(c.time.n_levels()))
        err << "boundary data: lateral columns need " << c.time.n_levels()
            << " values";
    else if (bd.compatibility_tol < 0.0)
        err << "boundary data: compatibility_tol must be >= 0";
    if (!err.str().empty()) throw std::invalid_argument(err.str());

    auto all_finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(),
                           [](double x) { return std::isfinite(x); });
    };
    if (!all_finite(bd.initial) || !all_finite(bd.lateral_left) ||
        !all_finite(bd.lateral_right))
        throw std::invalid_argument("boundary data: non-finite value");

    if (require_nonnegative) {
        if (*std::min_element(bd.initial.begin(), bd.initial.end()) < 0.0)
            throw std::invalid_argument(
                "boundary data: negative initial value in the nonnegative "
                "problem; use solve_signed");
        double gl = *std::min_element(bd.lateral_left.begin(), bd.lateral_left.end());
        double gr =
            *std::min_element(bd.lateral_right.begin(), bd.lateral_right.end());
        if (gl < 0.0 || gr < 0.0)
            throw std::invalid_argument(
                "boundary data: negative lateral value in the nonnegative "
                "problem; use solve_signed");
    }

    double dl = std::abs(phi_inverse(bd.lateral_left[0], m) - bd.initial.front());
    double dr = std::abs(phi_inverse(bd.lateral_right[0], m) - bd.initial.back());
    if (dl > bd.compatibility_tol || dr > bd.compatibility_tol) {
        std::ostringstream mismatch;
        mismatch << "boundary data: corner mismatch |g^{1/m} - u0| = "
                 << std::max(dl, dr) << " exceeds compatibility_tol = "
                 << bd.compatibility_tol;
        throw std::invalid_argument(mismatch.str());
    }
}

std::pair<double, double> data_bounds(const BoundaryData& bd, double m) {
    double lo = bd.initial.front(), hi = bd.initial.front();
    for (double v : bd.initial) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    auto walls = [&](const std::vector<double>& g) {
        for (double v : g) {
            double uv = phi_inverse(v, m);
            lo = std::min(lo, uv);
            hi = std::max(hi, uv);
        }
    };
    walls(bd.lateral_left);
    walls(bd.lateral_right);
    return {lo, hi};
}

}  // namespace pml
