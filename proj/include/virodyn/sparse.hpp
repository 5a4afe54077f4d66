#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"

namespace virodyn {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square sparse operator stored in CSR; built from coordinate triplets
/// (duplicates summed, exact zeros dropped).
class SparseOperator {
public:
    SparseOperator() = default;

    static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet> entries) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("SparseOperator: dimensions must be positive");
        for (const auto& t : entries)
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw std::invalid_argument("SparseOperator: entry out of range");

        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });

        SparseOperator op;
        op.rows_ = rows;
        op.cols_ = cols;
        op.row_ptr_.assign(rows + 1, 0);
        std::size_t i = 0;
        while (i < entries.size()) {
            std::size_t j = i;
            double sum = 0.0;
            while (j < entries.size() && entries[j].row == entries[i].row &&
                   entries[j].col == entries[i].col) {
                sum += entries[j].value;
                ++j;
            }
            if (sum != 0.0) {
                op.col_idx_.push_back(entries[i].col);
                op.vals_.push_back(sum);
                ++op.row_ptr_[entries[i].row + 1];
            }
            i = j;
        }
        for (int r = 0; r < rows; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
        return op;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return vals_.size(); }

    void apply(std::span<const double> x, std::span<double> y) const {
        if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
            throw std::invalid_argument("SparseOperator::apply: length mismatch");
        for (int r = 0; r < rows_; ++r) {
            double s = 0.0;
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                s += vals_[k] * x[col_idx_[k]];
            y[r] = s;
        }
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(rows_);
        apply(x, y);
        return y;
    }

    std::vector<double> apply(const Field& f) const { return apply(std::span(f.values)); }

    double diagonal_entry(int r) const {
        for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            if (col_idx_[k] == r) return vals_[k];
        return 0.0;
    }

    std::vector<Triplet> triplets() const {
        std::vector<Triplet> out;
        out.reserve(vals_.size());
        for (int r = 0; r < rows_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                out.push_back({r, col_idx_[k], vals_[k]});
        return out;
    }

    std::vector<double> to_dense() const {
        std::vector<double> d(static_cast<std::size_t>(rows_) * cols_, 0.0);
        for (int r = 0; r < rows_; ++r)
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                d[static_cast<std::size_t>(r) * cols_ + col_idx_[k]] = vals_[k];
        return d;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> vals_;
};

inline SparseOperator identity_operator(int n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseOperator::from_triplets(n, n, std::move(t));
}

/// c*I + s*A
inline SparseOperator scaled_shift(const SparseOperator& a, double c, double s) {
    auto t = a.triplets();
    for (auto& e : t) e.value *= s;
    for (int i = 0; i < a.rows(); ++i) t.push_back({i, i, c});
    return SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
}

namespace detail {

inline void append_axis_stencil(std::vector<Triplet>& out, const Grid& g, int axis,
                                double diffusion) {
    const double w = diffusion / (g.spacing[axis] * g.spacing[axis]);
    const int nx = g.nodes[0];
    const int ny = g.dim == 2 ? g.nodes[1] : 1;
    const int n_axis = axis == 0 ? nx : ny;

    auto node = [nx](int ix, int iy) { return ix + nx * iy; };

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int row = node(ix, iy);
            const int i = axis == 0 ? ix : iy;
            const bool has_lo = i > 0;
            const bool has_hi = i < n_axis - 1;
            if (g.bc == BoundaryKind::Dirichlet0) {
                // missing neighbors are boundary zeros
                out.push_back({row, row, -2.0 * w});
                if (has_lo) out.push_back({row, axis == 0 ? node(ix - 1, iy) : node(ix, iy - 1), w});
                if (has_hi) out.push_back({row, axis == 0 ? node(ix + 1, iy) : node(ix, iy + 1), w});
            } else {
                // mirror ghosts: boundary rows reduce to one-sided differences
                const double diag = -w * ((has_lo ? 1.0 : 0.0) + (has_hi ? 1.0 : 0.0));
                out.push_back({row, row, diag});
                if (has_lo) out.push_back({row, axis == 0 ? node(ix - 1, iy) : node(ix, iy - 1), w});
                if (has_hi) out.push_back({row, axis == 0 ? node(ix + 1, iy) : node(ix, iy + 1), w});
            }
        }
    }
}

}  // namespace detail

/// Second-order central-difference Laplacian scaled by the diffusion
/// coefficient: symmetric, negative definite (Dirichlet) or negative
/// semidefinite with exact zero row sums (Neumann, mirror ghosts).
inline SparseOperator assemble_laplacian(const Grid& g, double diffusion) {
    if (!(diffusion > 0.0))
        throw std::invalid_argument("assemble_laplacian: diffusion must be positive");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(g.num_nodes()) * (2 * g.dim + 1));
    detail::append_axis_stencil(t, g, 0, diffusion);
    if (g.dim == 2) detail::append_axis_stencil(t, g, 1, diffusion);
    return SparseOperator::from_triplets(g.num_nodes(), g.num_nodes(), std::move(t));
}

}  // namespace virodyn
