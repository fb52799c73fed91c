#include "pml/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pml {

GridFunction::GridFunction(const Cylinder& c, double fill)
    : domain_(c), values_(static_cast<std::size_t>(c.n_nodes()), fill) {}

double GridFunction::at(int ix, int it) const {
    if (ix < 0 || ix > domain_.space.n_cells || it < 0 || it > domain_.time.n_steps) {
        std::ostringstream err;
        err << "GridFunction::at: node (" << ix << ", " << it
            << ") outside lattice " << domain_.space.n_cells + 1 << " x "
            << domain_.time.n_steps + 1;
        throw std::out_of_range(err.str());
    }
    return (*this)(ix, it);
}

std::span<const double> GridFunction::level(int k) const {
    return {values_.data() + domain_.node_index(0, k),
            static_cast<std::size_t>(domain_.space.n_nodes())};
}

std::span<double> GridFunction::level(int k) {
    return {values_.data() + domain_.node_index(0, k),
            static_cast<std::size_t>(domain_.space.n_nodes())};
}

double GridFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double GridFunction::sup_norm() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

void GridFunction::write_csv(std::ostream& out) const {
    out << "x,t,u\n";
    out.precision(17);
    for (int k = 0; k <= domain_.time.n_steps; ++k) {
        double t = domain_.time.level(k);
        for (int i = 0; i <= domain_.space.n_cells; ++i)
            out << domain_.space.node(i) << ',' << t << ',' << (*this)(i, k)
                << '\n';
    }
}

GridFunction GridFunction::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,t,u", 0) != 0)
        throw std::runtime_error("GridFunction::read_csv: missing x,t,u header");
    std::vector<double> xs, ts, us;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double x, t, u;
        char c1, c2;
        if (!(row >> x >> c1 >> t >> c2 >> u) || c1 != ',' || c2 != ',')
            throw std::runtime_error("GridFunction::read_csv: bad row: " + line);
        xs.push_back(x);
        ts.push_back(t);
        us.push_back(u);
    }
    if (us.size() < 6)
        throw std::runtime_error("GridFunction::read_csv: too few rows");
    // The first block shares one t; its length gives the spatial node count.
    std::size_t nxn = 1;
    while (nxn < ts.size() && ts[nxn] == ts[0]) ++nxn;
    if (nxn < 3 || us.size() % nxn != 0)
        throw std::runtime_error("GridFunction::read_csv: ragged lattice");
    std::size_t ntn = us.size() / nxn;
    if (ntn < 2) throw std::runtime_error("GridFunction::read_csv: single level");
    Cylinder c = make_cylinder(xs.front(), xs[nxn - 1], ts.front(), ts.back(),
                               static_cast<int>(nxn) - 1,
                               static_cast<int>(ntn) - 1);
    GridFunction u(c);
    double scale = std::max({1.0, std::abs(xs.front()), std::abs(xs[nxn - 1])});
    for (std::size_t k = 0; k < ntn; ++k)
        for (std::size_t i = 0; i < nxn; ++i) {
            std::size_t r = k * nxn + i;
            if (std::abs(xs[r] - c.space.node(static_cast<int>(i))) >
                1e-9 * scale)
                throw std::runtime_error(
                    "GridFunction::read_csv: non-uniform x column");
            u(static_cast<int>(i), static_cast<int>(k)) = us[r];
        }
    return u;
}

namespace {
constexpr char kMagic[8] = {'P', 'M', 'L', 'G', 'R', 'I', 'D', '1'};
}

void GridFunction::write_binary(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    double header[4] = {domain_.space.a, domain_.space.b, domain_.time.t_begin,
                        domain_.time.t_end};
    std::int64_t dims[2] = {domain_.space.n_cells, domain_.time.n_steps};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GridFunction GridFunction::read_binary(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error("GridFunction::read_binary: bad magic");
    double header[4];
    std::int64_t dims[2];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in) throw std::runtime_error("GridFunction::read_binary: truncated header");
    Cylinder c = make_cylinder(header[0], header[1], header[2], header[3],
                               static_cast<int>(dims[0]),
                               static_cast<int>(dims[1]));
    GridFunction u(c);
    in.read(reinterpret_cast<char*>(u.values_.data()),
            static_cast<std::streamsize>(u.values_.size() * sizeof(double)));
    if (!in) throw std::runtime_error("GridFunction::read_binary: truncated data");
    return u;
}

bool same_lattice(const GridFunction& u, const GridFunction& v) {
    const Cylinder& a = u.domain();
    const Cylinder& b = v.domain();
    if (a.space.n_cells != b.space.n_cells || a.time.n_steps != b.time.n_steps)
        return false;
    double sx = std::max({1.0, std::abs(a.space.a), std::abs(a.space.b)});
    double st = std::max({1.0, std::abs(a.time.t_begin), std::abs(a.time.t_end)});
    return std::abs(a.space.a - b.space.a) <= 1e-12 * sx &&
           std::abs(a.space.b - b.space.b) <= 1e-12 * sx &&
           std::abs(a.time.t_begin - b.time.t_begin) <= 1e-12 * st &&
           std::abs(a.time.t_end - b.time.t_end) <= 1e-12 * st;
}

double sup_distance(const GridFunction& u, const GridFunction& v) {
    if (!same_lattice(u, v))
        throw std::invalid_argument("sup_distance: lattice mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i)
        s = std::max(s, std::abs(u.values()[i] - v.values()[i]));
    return s;
}

}  // namespace pml
