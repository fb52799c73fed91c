#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pml/mesh.hpp"

namespace pml {

/// Nodal values over a cylinder's lattice, stored row-major by time level.
class GridFunction {
  public:
    explicit GridFunction(const Cylinder& c, double fill = 0.0);

    template <class F>
    static GridFunction tabulate(const Cylinder& c, F&& f) {
        GridFunction u(c);
        for (int k = 0; k <= c.time.n_steps; ++k) {
            double t = c.time.level(k);
            for (int i = 0; i <= c.space.n_cells; ++i)
                u(i, k) = f(c.space.node(i), t);
        }
        return u;
    }

    const Cylinder& domain() const { return domain_; }

    double operator()(int ix, int it) const {
        return values_[domain_.node_index(ix, it)];
    }
    double& operator()(int ix, int it) {
        return values_[domain_.node_index(ix, it)];
    }
    /// Bounds-checked access; throws std::out_of_range.
    double at(int ix, int it) const;

    std::span<const double> level(int k) const;
    std::span<double> level(int k);
    const std::vector<double>& values() const { return values_; }

    double min_value() const;
    double max_value() const;
    double sup_norm() const;
    bool all_finite() const;

    /// Header "x,t,u", one row per node, time level major.  Fields printed
    /// with enough digits to round-trip doubles.
    void write_csv(std::ostream& out) const;
    static GridFunction read_csv(std::istream& in);

    /// Compact binary dump (magic, lattice descriptor, raw doubles);
    /// bit-exact round trip.
    void write_binary(std::ostream& out) const;
    static GridFunction read_binary(std::istream& in);

  private:
    Cylinder domain_;
    std::vector<double> values_;
};

/// True when the two lattices have equal shape and coordinates agree to a
/// 1e-12 relative tolerance.
bool same_lattice(const GridFunction& u, const GridFunction& v);

/// max over nodes of |u - v|; throws std::invalid_argument on lattice
/// mismatch.
double sup_distance(const GridFunction& u, const GridFunction& v);

}  // namespace pml
