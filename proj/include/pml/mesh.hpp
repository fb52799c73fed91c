#pragma once

#include <cstddef>
#include <vector>

namespace pml {

/// Uniform mesh on [a, b] with n_cells cells, so n_cells + 1 nodes.
struct SpatialMesh {
    double a = 0.0;
    double b = 1.0;
    int n_cells = 2;

    int n_nodes() const { return n_cells + 1; }
    double spacing() const { return (b - a) / n_cells; }
    /// Node coordinate; exact at both endpoints.
    double node(int i) const;
};

/// Uniform grid on [t_begin, t_end] with n_steps backward-Euler steps.
struct TimeGrid {
    double t_begin = 0.0;
    double t_end = 1.0;
    int n_steps = 1;

    int n_levels() const { return n_steps + 1; }
    double dt() const { return (t_end - t_begin) / n_steps; }
    double level(int k) const;
};

/// Space-time lattice for the cylinder (a, b) x (t_begin, t_end].
struct Cylinder {
    SpatialMesh space;
    TimeGrid time;

    int n_nodes() const { return space.n_nodes() * time.n_levels(); }
    /// Flat index of lattice node (ix, it), row-major by time level.
    int node_index(int ix, int it) const { return it * space.n_nodes() + ix; }
};

/// Validates and assembles a cylinder.  Throws std::invalid_argument when
/// a >= b, t_begin >= t_end, n_cells < 2 or n_steps < 1.
Cylinder make_cylinder(double a, double b, double t_begin, double t_end,
                       int n_cells, int n_steps);

struct NodeIndex {
    int ix = 0;
    int it = 0;
    friend bool operator==(NodeIndex, NodeIndex) = default;
};

/// Nodes where data is prescribed: the whole earliest time level
/// (initial_nodes) plus the two extreme spatial columns at every later level
/// (lateral_nodes).  The two lists are disjoint; corner nodes count as
/// initial.  For a union the same split applies per column: a boundary node
/// with no lattice node of the union directly below it is initial-type.
struct ParabolicBoundarySet {
    std::vector<NodeIndex> initial_nodes;
    std::vector<NodeIndex> lateral_nodes;

    std::size_t node_count() const {
        return initial_nodes.size() + lateral_nodes.size();
    }
    bool contains(NodeIndex n) const;
};

ParabolicBoundarySet parabolic_boundary(const Cylinder& c);

/// Role of an ambient lattice node relative to a cylinder union.
///
/// A node is `boundary` when no member computes it, i.e. every member
/// containing it places it on that member's own parabolic boundary.
/// Non-boundary nodes split into `interior` (some member still evolves the
/// node to a later level) and `final_slice` (computed, but only as the last
/// level of every member reaching it).
enum class NodeClass { outside, boundary, interior, final_slice };

/// Member of a cylinder union: inclusive node/level ranges into the ambient
/// lattice.  Spatially it spans nodes ix_lo..ix_hi, in time levels
/// it_lo..it_hi.
struct IndexBox {
    int ix_lo = 0;
    int ix_hi = 0;
    int it_lo = 0;
    int it_hi = 0;

    bool contains(int ix, int it) const {
        return ix_lo <= ix && ix <= ix_hi && it_lo <= it && it <= it_hi;
    }
    friend bool operator==(IndexBox, IndexBox) = default;
};

/// Finite union of axis-aligned space-time boxes sharing one ambient lattice.
///
/// Construction validates every member (at least 2 cells wide, at least one
/// time step, inside the ambient lattice) and requires the union's computed
/// nodes to form one 4-neighbor-connected component; a disconnected union is
/// rejected.  Members may overlap arbitrarily and duplicates are harmless.
class CylinderUnion {
  public:
    CylinderUnion(Cylinder ambient, std::vector<IndexBox> members);

    const Cylinder& ambient() const { return ambient_; }
    const std::vector<IndexBox>& members() const { return members_; }

    bool contains(int ix, int it) const;
    NodeClass node_class(int ix, int it) const;

    /// Materializes member i as a standalone cylinder with the coordinates it
    /// inherits from the ambient lattice.
    Cylinder member_cylinder(std::size_t i) const;

  private:
    Cylinder ambient_;
    std::vector<IndexBox> members_;
};

/// Parabolic boundary of the union: nodes not computed by any member.  The
/// initial/lateral split is per column (see ParabolicBoundarySet).  Both
/// lists come back sorted by (it, ix).
ParabolicBoundarySet union_parabolic_boundary(const CylinderUnion& u);

}  // namespace pml
