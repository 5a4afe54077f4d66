#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/linear_solver.hpp"
#include "virodyn/model.hpp"
#include "virodyn/sparse.hpp"

namespace virodyn {

/// Uninfected steady state: (mu_T*I - D_T*Laplacian) T_inf = lambda.
inline Field solve_T_infinity(const Parameters& p, const Grid& g, double tol = 1e-10) {
    if (!p.lambda.grid.same_layout(g))
        throw std::invalid_argument("solve_T_infinity: lambda grid mismatch");
    const SparseOperator lap = assemble_laplacian(g, p.D_T);
    const SparseOperator a = scaled_shift(lap, p.mu_T, -1.0);
    Field out(g, 0.0);
    out.values = solve_linear(a, p.lambda.values, tol);
    require_finite(out.values, "solve_T_infinity");
    return out;
}

/// L2 norm (grid quadrature) of the stacked residual of the full
/// stationary system at the given state.
inline double steady_residual(const State& s, const Parameters& p, const Laplacians& ops) {
    const Reaction r = reaction(s, p);
    const auto lap_T = ops.T.apply(s.T);
    const auto lap_I = ops.I.apply(s.I);
    const auto lap_V = ops.V.apply(s.V);
    double sum = 0.0;
    for (std::size_t j = 0; j < s.T.size(); ++j) {
        const double rT = lap_T[j] + r.f_T[j];
        const double rI = lap_I[j] + r.f_I[j];
        const double rV = lap_V[j] + r.f_V[j];
        sum += rT * rT + rI * rI + rV * rV;
    }
    return std::sqrt(sum * s.grid().cell_volume());
}

struct NewtonResult {
    State state;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    bool nonnegative = false;
    std::string failure;  // empty on success
};

namespace detail {

/// Jacobian of the stationary residual F(T,I,V) = D*Lap(u) + f(u), in the
/// stacked ordering (T-block, I-block, V-block).
inline SparseOperator steady_jacobian(const State& s, const Parameters& p,
                                      const Laplacians& ops) {
    const int n = static_cast<int>(s.T.size());
    std::vector<Triplet> t;
    t.reserve(10 * static_cast<std::size_t>(n));
    auto add_block = [&t, n](const SparseOperator& op, int br, int bc) {
        for (auto e : op.triplets()) t.push_back({e.row + br * n, e.col + bc * n, e.value});
    };
    add_block(ops.T, 0, 0);
    add_block(ops.I, 1, 1);
    add_block(ops.V, 2, 2);
    for (int j = 0; j < n; ++j) {
        const double kT = p.k * s.T[j];
        const double kV = p.k * s.V[j];
        t.push_back({j, j, -p.mu_T - kV});          // dF_T/dT
        t.push_back({j, 2 * n + j, -kT});           // dF_T/dV
        t.push_back({n + j, j, kV});                // dF_I/dT
        t.push_back({n + j, n + j, -p.mu_I});       // dF_I/dI
        t.push_back({n + j, 2 * n + j, kT});        // dF_I/dV
        t.push_back({2 * n + j, n + j, p.N * p.mu_I});  // dF_V/dI
        t.push_back({2 * n + j, 2 * n + j, -p.mu_V});   // dF_V/dV
    }
    return SparseOperator::from_triplets(3 * n, 3 * n, std::move(t));
}

inline std::vector<double> steady_residual_vector(const State& s, const Parameters& p,
                                                  const Laplacians& ops) {
    const Reaction r = reaction(s, p);
    const auto lap_T = ops.T.apply(s.T);
    const auto lap_I = ops.I.apply(s.I);
    const auto lap_V = ops.V.apply(s.V);
    const std::size_t n = s.T.size();
    std::vector<double> f(3 * n);
    for (std::size_t j = 0; j < n; ++j) {
        f[j] = lap_T[j] + r.f_T[j];
        f[n + j] = lap_I[j] + r.f_I[j];
        f[2 * n + j] = lap_V[j] + r.f_V[j];
    }
    return f;
}

}  // namespace detail

/// Damped Newton search for steady states of the full nonlinear system.
/// Nonnegativity of the limit is reported, never enforced.
inline NewtonResult newton_steady(const State& initial, const Parameters& p, double tol = 1e-10,
                                  int max_iter = 50) {
    const Grid& g = initial.grid();
    const Laplacians ops = assemble_laplacians(g, p);
    const int n = g.num_nodes();

    NewtonResult res;
    res.state = initial;
    res.residual = steady_residual(res.state, p, ops);

    int growth_streak = 0;
    for (int it = 0; it < max_iter; ++it) {
        if (res.residual <= tol) {
            res.converged = true;
            break;
        }
        const SparseOperator jac = detail::steady_jacobian(res.state, p, ops);
        auto f = detail::steady_residual_vector(res.state, p, ops);
        for (auto& v : f) v = -v;

        std::vector<double> delta;
        try {
            delta = 3 * n <= 1500 ? detail::dense_lu_solve(jac.to_dense(), f)
                                  : solve_bicgstab(jac, f, 1e-12);
        } catch (const SolveFailure& e) {
            res.failure = std::string("singular Jacobian: ") + e.what();
            return res;
        }

        // half-step damping until the residual decreases
        double step = 1.0;
        State trial = res.state;
        double trial_res = 0.0;
        bool improved = false;
        for (int halving = 0; halving < 30; ++halving) {
            for (int j = 0; j < n; ++j) {
                trial.T[j] = res.state.T[j] + step * delta[j];
                trial.I[j] = res.state.I[j] + step * delta[n + j];
                trial.V[j] = res.state.V[j] + step * delta[2 * n + j];
            }
            trial_res = steady_residual(trial, p, ops);
            if (std::isfinite(trial_res) && trial_res < res.residual) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        res.state = trial;
        res.iterations = it + 1;
        if (!improved) {
            ++growth_streak;
            if (growth_streak >= 5) {
                res.residual = trial_res;
                res.failure = "divergence: residual failed to decrease over 5 consecutive steps";
                return res;
            }
        } else {
            growth_streak = 0;
        }
        res.residual = trial_res;
    }

    if (!res.converged && res.residual <= tol) res.converged = true;
    if (!res.converged && res.failure.empty())
        res.failure = "max_iter exceeded (residual " + std::to_string(res.residual) + ")";
    res.nonnegative = min_value(res.state.T) >= -1e-12 && min_value(res.state.I) >= -1e-12 &&
                      min_value(res.state.V) >= -1e-12;
    return res;
}

}  // namespace virodyn
