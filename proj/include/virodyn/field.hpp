#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "virodyn/grid.hpp"

namespace virodyn {

/// Scalar nodal values over a Grid. Value semantics; the grid travels with
/// the data so fields from different meshes cannot be mixed silently.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.num_nodes()), fill) {}
    Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.num_nodes())
            throw std::invalid_argument("Field: value count does not match grid");
    }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

inline void require_same_grid(const Field& a, const Field& b, const char* what) {
    if (!a.grid.same_layout(b.grid))
        throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error(std::string(what) + ": non-finite value encountered");
}

inline double sup_norm(const Field& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

inline double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Discrete L2 norm with quadrature weight = product of spacings.
inline double l2_norm(const Field& f) {
    double s = 0.0;
    for (double x : f.values) s += x * x;
    return std::sqrt(s * f.grid.cell_volume());
}

inline double min_value(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::min(m, x);
    return m;
}

inline double max_value(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::max(m, x);
    return m;
}

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace detail

}  // namespace virodyn
