#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/model.hpp"
#include "virodyn/sparse.hpp"
#include "virodyn/steady.hpp"

namespace virodyn {

/// Discrete linearization of the infected subsystem about the clearance
/// state: diag(D_I*Lap, D_V*Lap) plus the nodewise coupling
/// M(x) = [[-mu_I, k*T_inf(x)], [N*mu_I, -mu_V]]. Ordering: I block first,
/// V block second. All off-diagonal entries are nonnegative (cooperative).
inline SparseOperator assemble_linearized(const Parameters& p, const Field& T_inf,
                                          const Grid& g) {
    if (!T_inf.grid.same_layout(g))
        throw std::invalid_argument("assemble_linearized: T_inf grid mismatch");
    const int n = g.num_nodes();
    std::vector<Triplet> t;
    t.reserve(8 * static_cast<std::size_t>(n));
    for (auto e : assemble_laplacian(g, p.D_I).triplets()) t.push_back(e);
    for (auto e : assemble_laplacian(g, p.D_V).triplets())
        t.push_back({e.row + n, e.col + n, e.value});
    for (int j = 0; j < n; ++j) {
        t.push_back({j, j, -p.mu_I});
        t.push_back({j, n + j, p.k * T_inf[j]});
        t.push_back({n + j, j, p.N * p.mu_I});
        t.push_back({n + j, n + j, -p.mu_V});
    }
    return SparseOperator::from_triplets(2 * n, 2 * n, std::move(t));
}

struct SpectralResult {
    double eta0 = 0.0;
    std::vector<double> eigenvector_I;
    std::vector<double> eigenvector_V;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Principal eigenvalue by power iteration on the shifted operator
/// op + sigma*I with sigma = max|diag| + 1, which is entrywise nonnegative
/// for cooperative off-diagonals; its Perron value is eta0 + sigma.
inline SpectralResult principal_eigenvalue(const SparseOperator& op, double tol = 1e-10,
                                           int max_iter = 50000, double shift_override = 0.0) {
    const int n = op.rows();
    if (op.cols() != n)
        throw std::invalid_argument("principal_eigenvalue: operator must be square");
    if (n % 2 != 0)
        throw std::invalid_argument("principal_eigenvalue: expected a 2-block operator");

    double sigma = shift_override;
    if (sigma <= 0.0) {
        double max_diag = 0.0;
        for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(op.diagonal_entry(i)));
        sigma = max_diag + 1.0;
    }

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> w(n);
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    bool converged = false;

    for (; it < max_iter; ++it) {
        op.apply(v, w);
        for (int i = 0; i < n; ++i) w[i] += sigma * v[i];
        const double lambda_next = detail::dot(v, w);  // v normalized in l2

        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = w[i] - lambda_next * v[i];
            res += d * d;
        }
        residual = std::sqrt(res);

        const double change = std::abs(lambda_next - lambda);
        lambda = lambda_next;

        const double wn = detail::norm2(w);
        if (wn == 0.0) break;  // op = -sigma*I exactly
        for (int i = 0; i < n; ++i) v[i] = w[i] / wn;

        if (it > 0 && change < tol && residual < 100.0 * tol) {
            converged = true;
            ++it;
            break;
        }
    }

    SpectralResult out;
    out.eta0 = lambda - sigma;
    out.iterations = it;
    out.residual = residual;
    out.converged = converged;

    const double sup = sup_norm(std::span<const double>(v));
    const double scale = sup > 0.0 ? 1.0 / sup : 1.0;
    out.eigenvector_I.assign(v.begin(), v.begin() + n / 2);
    out.eigenvector_V.assign(v.begin() + n / 2, v.end());
    for (auto& x : out.eigenvector_I) x *= scale;
    for (auto& x : out.eigenvector_V) x *= scale;
    return out;
}

/// R0(x) = N*k*T_inf(x)/mu_V.
inline Field compute_R0_field(const Field& T_inf, const Parameters& p) {
    Field r = T_inf;
    const double c = p.N * p.k / p.mu_V;
    for (auto& v : r.values) v *= c;
    return r;
}

enum class Classification {
    globally_stable_by_corollary,
    globally_stable_by_R0,
    locally_stable,
    unstable,
    marginal,
};

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::globally_stable_by_corollary: return "globally_stable_by_corollary";
        case Classification::globally_stable_by_R0: return "globally_stable_by_R0";
        case Classification::locally_stable: return "locally_stable";
        case Classification::unstable: return "unstable";
        case Classification::marginal: return "marginal";
    }
    return "unknown";
}

struct StabilityReport {
    double eta0 = 0.0;
    double R0_sup = 0.0;
    double corollary_bound = 0.0;
    Classification classification = Classification::marginal;
    Field T_inf;
    SpectralResult spectral;
};

inline Classification classify_from_values(double eta0, double R0_sup, double corollary_bound,
                                           double margin = 1e-6) {
    if (corollary_bound < 1.0) return Classification::globally_stable_by_corollary;
    if (R0_sup < 1.0) return Classification::globally_stable_by_R0;
    if (eta0 < -margin) return Classification::locally_stable;
    if (eta0 > margin) return Classification::unstable;
    return Classification::marginal;
}

inline StabilityReport classify_stability(const Parameters& p, const Grid& g,
                                          double eig_tol = 1e-10) {
    StabilityReport rep;
    rep.T_inf = solve_T_infinity(p, g);
    rep.R0_sup = sup_norm(compute_R0_field(rep.T_inf, p));
    rep.corollary_bound = p.N * p.k * sup_norm(p.lambda) / (p.mu_T * p.mu_V);
    rep.spectral = principal_eigenvalue(assemble_linearized(p, rep.T_inf, g), eig_tol);
    rep.eta0 = rep.spectral.eta0;
    rep.classification = classify_from_values(rep.eta0, rep.R0_sup, rep.corollary_bound);
    return rep;
}

}  // namespace virodyn
