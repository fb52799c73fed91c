#include "pml/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace pml {

double SpatialMesh::node(int i) const {
    return std::lerp(a, b, static_cast<double>(i) / n_cells);
}

double TimeGrid::level(int k) const {
    return std::lerp(t_begin, t_end, static_cast<double>(k) / n_steps);
}

Cylinder make_cylinder(double a, double b, double t_begin, double t_end,
                       int n_cells, int n_steps) {
    std::ostringstream err;
    if (!(a < b))
        err << "make_cylinder: need a < b, got a = " << a << ", b = " << b;
    else if (!(t_begin < t_end))
        err << "make_cylinder: need t_begin < t_end, got t_begin = " << t_begin
            << ", t_end = " << t_end;
    else if (n_cells < 2)
        err << "make_cylinder: need n_cells >= 2, got " << n_cells;
    else if (n_steps < 1)
        err << "make_cylinder: need n_steps >= 1, got " << n_steps;
    if (!err.str().empty()) throw std::invalid_argument(err.str());
    return Cylinder{SpatialMesh{a, b, n_cells}, TimeGrid{t_begin, t_end, n_steps}};
}

bool ParabolicBoundarySet::contains(NodeIndex n) const {
    auto hit = [&](const std::vector<NodeIndex>& v) {
        return std::find(v.begin(), v.end(), n) != v.end();
    };
    return hit(initial_nodes) || hit(lateral_nodes);
}

ParabolicBoundarySet parabolic_boundary(const Cylinder& c) {
    ParabolicBoundarySet bset;
    const int nx = c.space.n_cells;
    const int nt = c.time.n_steps;
    bset.initial_nodes.reserve(nx + 1);
    for (int i = 0; i <= nx; ++i) bset.initial_nodes.push_back({i, 0});
    bset.lateral_nodes.reserve(2 * nt);
    for (int k = 1; k <= nt; ++k) {
        bset.lateral_nodes.push_back({0, k});
        bset.lateral_nodes.push_back({nx, k});
    }
    return bset;
}

namespace {

// A member computes node (ix, it) when the node is spatially interior to it
// and sits on one of the member's evolved levels.
bool computed_by_some(const std::vector<IndexBox>& ms, int ix, int it) {
    for (const auto& m : ms)
        if (m.ix_lo < ix && ix < m.ix_hi && m.it_lo < it && it <= m.it_hi)
            return true;
    return false;
}

// Some member evolves the node further, i.e. holds it spatially interior at a
// level that is not that member's last.
bool continued_by_some(const std::vector<IndexBox>& ms, int ix, int it) {
    for (const auto& m : ms)
        if (m.ix_lo < ix && ix < m.ix_hi && m.it_lo <= it && it < m.it_hi)
            return true;
    return false;
}

}  // namespace

CylinderUnion::CylinderUnion(Cylinder ambient, std::vector<IndexBox> members)
    : ambient_(ambient), members_(std::move(members)) {
    if (members_.empty())
        throw std::invalid_argument("CylinderUnion: no members given");
    const int nx = ambient_.space.n_cells;
    const int nt = ambient_.time.n_steps;
    for (std::size_t j = 0; j < members_.size(); ++j) {
        const auto& m = members_[j];
        std::ostringstream err;
        if (m.ix_lo < 0 || m.ix_hi > nx || m.it_lo < 0 || m.it_hi > nt)
            err << "CylinderUnion: member " << j << " exceeds the ambient lattice";
        else if (m.ix_hi - m.ix_lo < 2)
            err << "CylinderUnion: member " << j << " needs at least 2 cells, has "
                << m.ix_hi - m.ix_lo;
        else if (m.it_hi - m.it_lo < 1)
            err << "CylinderUnion: member " << j << " needs at least 1 time step";
        if (!err.str().empty()) throw std::invalid_argument(err.str());
    }

    // Connectivity of the computed-node graph (4-neighbor).  Checking the
    // computed nodes rather than the strict interior keeps one-step members
    // meaningful: their interior is empty but their final slice is not.
    std::vector<char> computed(static_cast<std::size_t>(ambient_.n_nodes()), 0);
    int total = 0;
    NodeIndex seed{-1, -1};
    for (int k = 0; k <= nt; ++k)
        for (int i = 0; i <= nx; ++i)
            if (computed_by_some(members_, i, k)) {
                computed[ambient_.node_index(i, k)] = 1;
                ++total;
                if (seed.ix < 0) seed = {i, k};
            }
    if (total == 0)
        throw std::invalid_argument("CylinderUnion: union computes no nodes");
    std::queue<NodeIndex> frontier;
    std::vector<char> seen(computed.size(), 0);
    frontier.push(seed);
    seen[ambient_.node_index(seed.ix, seed.it)] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        auto [i, k] = frontier.front();
        frontier.pop();
        const int di[4] = {1, -1, 0, 0};
        const int dk[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            int ni = i + di[d], nk = k + dk[d];
            if (ni < 0 || ni > nx || nk < 0 || nk > nt) continue;
            int id = ambient_.node_index(ni, nk);
            if (computed[id] && !seen[id]) {
                seen[id] = 1;
                ++reached;
                frontier.push({ni, nk});
            }
        }
    }
    if (reached != total)
        throw std::invalid_argument(
            "CylinderUnion: union is disconnected (computed nodes split into "
            "multiple components)");
}

bool CylinderUnion::contains(int ix, int it) const {
    for (const auto& m : members_)
        if (m.contains(ix, it)) return true;
    return false;
}

NodeClass CylinderUnion::node_class(int ix, int it) const {
    if (!contains(ix, it)) return NodeClass::outside;
    if (!computed_by_some(members_, ix, it)) return NodeClass::boundary;
    return continued_by_some(members_, ix, it) ? NodeClass::interior
                                               : NodeClass::final_slice;
}

Cylinder CylinderUnion::member_cylinder(std::size_t i) const {
    const auto& m = members_.at(i);
    Cylinder c;
    c.space = SpatialMesh{ambient_.space.node(m.ix_lo), ambient_.space.node(m.ix_hi),
                          m.ix_hi - m.ix_lo};
    c.time = TimeGrid{ambient_.time.level(m.it_lo), ambient_.time.level(m.it_hi),
                      m.it_hi - m.it_lo};
    return c;
}

ParabolicBoundarySet union_parabolic_boundary(const CylinderUnion& u) {
    ParabolicBoundarySet bset;
    const auto& amb = u.ambient();
    for (int k = 0; k <= amb.time.n_steps; ++k)
        for (int i = 0; i <= amb.space.n_cells; ++i) {
            if (u.node_class(i, k) != NodeClass::boundary) continue;
            bool has_below = k > 0 && u.contains(i, k - 1);
            (has_below ? bset.lateral_nodes : bset.initial_nodes).push_back({i, k});
        }
    return bset;
}

}  // namespace pml
