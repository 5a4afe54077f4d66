#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace virodyn {

/// Homogeneous boundary condition applied to all three species.
enum class BoundaryKind { Dirichlet0, Neumann0 };

inline const char* to_string(BoundaryKind bc) {
    return bc == BoundaryKind::Dirichlet0 ? "dirichlet" : "neumann";
}

/// Uniform Cartesian mesh on a rectangle (1D or 2D).
///
/// Node layout depends on the boundary condition:
///  - Dirichlet0: only interior unknowns are stored, boundary values are
///    identically zero; spacing = length/(n+1), node i sits at (i+1)*h.
///  - Neumann0: cell-centered; spacing = length/n, node i sits at (i+1/2)*h.
/// Node ordering is lexicographic with the x axis fastest.
struct Grid {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    std::array<int, 2> nodes{3, 1};
    std::array<double, 2> spacing{0.0, 0.0};
    BoundaryKind bc = BoundaryKind::Neumann0;

    int num_nodes() const { return dim == 1 ? nodes[0] : nodes[0] * nodes[1]; }

    double coordinate(int axis, int index) const {
        const double h = spacing[axis];
        return bc == BoundaryKind::Dirichlet0 ? (index + 1) * h : (index + 0.5) * h;
    }

    /// Quadrature weight of one node (product of spacings).
    double cell_volume() const {
        return dim == 1 ? spacing[0] : spacing[0] * spacing[1];
    }

    double min_spacing() const {
        return dim == 1 ? spacing[0] : std::min(spacing[0], spacing[1]);
    }

    bool same_layout(const Grid& other) const {
        return dim == other.dim && bc == other.bc && nodes == other.nodes &&
               lengths == other.lengths;
    }
};

inline Grid build_grid(int dim, const std::vector<double>& lengths,
                       const std::vector<int>& nodes_per_axis, BoundaryKind bc) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("build_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (static_cast<int>(lengths.size()) != dim)
        throw std::invalid_argument("build_grid: expected " + std::to_string(dim) + " lengths");
    if (static_cast<int>(nodes_per_axis.size()) != dim)
        throw std::invalid_argument("build_grid: expected " + std::to_string(dim) + " node counts");

    Grid g;
    g.dim = dim;
    g.bc = bc;
    for (int a = 0; a < dim; ++a) {
        if (!(lengths[a] > 0.0))
            throw std::invalid_argument("build_grid: lengths must be positive");
        if (nodes_per_axis[a] < 3)
            throw std::invalid_argument("build_grid: nodes_per_axis must be >= 3");
        g.lengths[a] = lengths[a];
        g.nodes[a] = nodes_per_axis[a];
        const int scale = bc == BoundaryKind::Dirichlet0 ? nodes_per_axis[a] + 1
                                                         : nodes_per_axis[a];
        g.spacing[a] = lengths[a] / scale;
    }
    if (dim == 1) {
        g.lengths[1] = 1.0;
        g.nodes[1] = 1;
        g.spacing[1] = 0.0;
    }
    return g;
}

}  // namespace virodyn
