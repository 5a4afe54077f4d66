#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/sparse.hpp"

namespace virodyn {

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& msg, double residual, int iterations)
        : std::runtime_error(msg + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          residual(residual),
          iterations(iterations) {}
    double residual;
    int iterations;
};

namespace detail {

/// In-place dense LU with partial pivoting; a is row-major n x n.
inline std::vector<double> dense_lu_solve(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            const double cand = std::abs(a[static_cast<std::size_t>(r) * n + k]);
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw SolveFailure("dense LU: singular system", best, k);
        if (piv != k) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(piv) * n + c],
                          a[static_cast<std::size_t>(k) * n + c]);
            std::swap(b[piv], b[k]);
        }
        const double d = a[static_cast<std::size_t>(k) * n + k];
        for (int r = k + 1; r < n; ++r) {
            const double m = a[static_cast<std::size_t>(r) * n + k] / d;
            if (m == 0.0) continue;
            a[static_cast<std::size_t>(r) * n + k] = 0.0;
            for (int c = k + 1; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= m * a[static_cast<std::size_t>(k) * n + c];
            b[r] -= m * b[k];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[static_cast<std::size_t>(r) * n + c] * b[c];
        b[r] = s / a[static_cast<std::size_t>(r) * n + r];
    }
    return b;
}

}  // namespace detail

/// Preconditioned conjugate gradient (Jacobi) for the SPD systems this
/// project assembles as (cI - D*Laplacian). Falls back to a dense
/// factorization for small systems if CG stalls; throws SolveFailure
/// otherwise with the final residual.
inline std::vector<double> solve_linear(const SparseOperator& op, std::span<const double> rhs,
                                        double tol = 1e-10, int max_iter = 0) {
    const int n = op.rows();
    if (op.cols() != n) throw std::invalid_argument("solve_linear: operator must be square");
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_linear: rhs length mismatch");
    if (max_iter <= 0) max_iter = 10 * n;

    const double bnorm = detail::norm2(rhs);
    if (!std::isfinite(bnorm)) throw SolveFailure("solve_linear: non-finite rhs", bnorm, 0);
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);
    const double target = tol * bnorm;

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = op.diagonal_entry(i);
        inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
    }

    std::vector<double> x(n, 0.0), r(rhs.begin(), rhs.end()), z(n), p(n), ap(n);
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = detail::dot(r, z);
    double rnorm = bnorm;

    int it = 0;
    for (; it < max_iter; ++it) {
        if (rnorm <= target) break;
        op.apply(p, ap);
        const double pap = detail::dot(p, ap);
        if (pap <= 0.0 || !std::isfinite(pap)) break;  // not SPD along p; bail to fallback
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (it % 50 == 49) {  // guard against residual drift
            op.apply(x, ap);
            for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
        }
        rnorm = detail::norm2(r);
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = detail::dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    // true residual check
    op.apply(x, ap);
    for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    rnorm = detail::norm2(r);
    if (rnorm <= target) return x;

    if (n <= 400) {
        auto xd = detail::dense_lu_solve(op.to_dense(), std::vector<double>(rhs.begin(), rhs.end()));
        op.apply(xd, ap);
        for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
        if (detail::norm2(r) <= std::max(target, 1e-12 * bnorm)) return xd;
        rnorm = std::min(rnorm, detail::norm2(r));
    }
    throw SolveFailure("solve_linear: CG did not converge", rnorm / bnorm, it);
}

/// BiCGStab with Jacobi preconditioning, for the nonsymmetric Newton
/// Jacobians. Returns the solution or throws SolveFailure.
inline std::vector<double> solve_bicgstab(const SparseOperator& op, std::span<const double> rhs,
                                          double tol = 1e-10, int max_iter = 0) {
    const int n = op.rows();
    if (op.cols() != n) throw std::invalid_argument("solve_bicgstab: operator must be square");
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_bicgstab: rhs length mismatch");
    if (max_iter <= 0) max_iter = 20 * n;

    const double bnorm = detail::norm2(rhs);
    if (!std::isfinite(bnorm)) throw SolveFailure("solve_bicgstab: non-finite rhs", bnorm, 0);
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);
    const double target = tol * bnorm;

    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = op.diagonal_entry(i);
        inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
    }

    std::vector<double> x(n, 0.0), r(rhs.begin(), rhs.end());
    std::vector<double> r0 = r, p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    int it = 0;
    for (; it < max_iter; ++it) {
        const double rho_next = detail::dot(r0, r);
        if (rho_next == 0.0) break;
        const double beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        for (int i = 0; i < n; ++i) ph[i] = inv_diag[i] * p[i];
        op.apply(ph, v);
        alpha = rho / detail::dot(r0, v);
        if (!std::isfinite(alpha)) break;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (detail::norm2(s) <= target) {
            for (int i = 0; i < n; ++i) x[i] += alpha * ph[i];
            return x;
        }
        for (int i = 0; i < n; ++i) sh[i] = inv_diag[i] * s[i];
        op.apply(sh, t);
        const double tt = detail::dot(t, t);
        if (tt == 0.0) break;
        omega = detail::dot(t, s) / tt;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        if (detail::norm2(r) <= target) return x;
        if (omega == 0.0) break;
    }

    std::vector<double> ax(n);
    op.apply(x, ax);
    for (int i = 0; i < n; ++i) ax[i] = rhs[i] - ax[i];
    const double rnorm = detail::norm2(ax);
    if (rnorm <= target) return x;
    throw SolveFailure("solve_bicgstab: did not converge", rnorm / bnorm, it);
}

}  // namespace virodyn
