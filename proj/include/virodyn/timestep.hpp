#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/linear_solver.hpp"
#include "virodyn/model.hpp"
#include "virodyn/sparse.hpp"

namespace virodyn {

enum class Scheme { explicit_euler, imex_be };

struct MonitorFlags {
    bool positivity = true;
    bool sup_bound_T = true;
    bool gronwall_IV = true;
};

struct StepperConfig {
    Scheme scheme = Scheme::imex_be;
    double dt = 0.0;  // <= 0: use default_dt(params)
    double t_end = 0.0;
    int snapshot_every = 1;
    MonitorFlags monitors;
};

/// Default step: two orders below the fastest reaction scale.
inline double default_dt(const Parameters& p) {
    return 0.01 * std::min({1.0 / p.mu_T, 1.0 / p.mu_I, 1.0 / p.mu_V});
}

inline double cfl_limit(const Grid& g, const Parameters& p) {
    const double h = g.min_spacing();
    const double d = std::max({p.D_T, p.D_I, p.D_V});
    return h * h / (2.0 * g.dim * d);
}

/// Reaction rates as a function of state; the standard kinetics close over
/// Parameters, the dimensionless system supplies its own.
using KineticsFn = std::function<Reaction(const State&)>;

inline KineticsFn standard_kinetics(const Parameters& p) {
    return [p](const State& s) { return reaction(s, p); };
}

struct Diffusivities {
    double T = 0.0;
    double I = 0.0;
    double V = 0.0;
};

inline Diffusivities diffusivities_of(const Parameters& p) { return {p.D_T, p.D_I, p.D_V}; }

namespace detail {

struct ImexMatrices {
    double dt = -1.0;
    SparseOperator T;
    SparseOperator I;
    SparseOperator V;

    void ensure(const Laplacians& laps, double step) {
        if (step == dt) return;
        T = scaled_shift(laps.T, 1.0, -step);
        I = scaled_shift(laps.I, 1.0, -step);
        V = scaled_shift(laps.V, 1.0, -step);
        dt = step;
    }
};

inline State advance_explicit(const State& s, const KineticsFn& kinetics, const Laplacians& laps,
                              double dt) {
    const Reaction r = kinetics(s);
    const auto lap_T = laps.T.apply(s.T);
    const auto lap_I = laps.I.apply(s.I);
    const auto lap_V = laps.V.apply(s.V);
    State next = s;
    next.time = s.time + dt;
    for (std::size_t j = 0; j < s.T.size(); ++j) {
        next.T[j] = s.T[j] + dt * (lap_T[j] + r.f_T[j]);
        next.I[j] = s.I[j] + dt * (lap_I[j] + r.f_I[j]);
        next.V[j] = s.V[j] + dt * (lap_V[j] + r.f_V[j]);
    }
    require_finite(next.T.values, "step_explicit T");
    require_finite(next.I.values, "step_explicit I");
    require_finite(next.V.values, "step_explicit V");
    return next;
}

inline State advance_imex(const State& s, const KineticsFn& kinetics, ImexMatrices& mats,
                          double dt, double tol) {
    const Reaction r = kinetics(s);
    const std::size_t n = s.T.size();
    std::vector<double> rhs(n);
    State next = s;
    next.time = s.time + dt;

    auto solve_component = [&](const SparseOperator& a, const Field& u,
                               const std::vector<double>& f, Field& out, const char* what) {
        for (std::size_t j = 0; j < n; ++j) rhs[j] = u[j] + dt * f[j];
        out.values = solve_linear(a, rhs, tol);
        require_finite(out.values, what);
    };
    solve_component(mats.T, s.T, r.f_T, next.T, "step_imex T");
    solve_component(mats.I, s.I, r.f_I, next.I, "step_imex I");
    solve_component(mats.V, s.V, r.f_V, next.V, "step_imex V");
    return next;
}

}  // namespace detail

/// One forward-Euler step. The diffusive CFL bound is enforced.
inline State step_explicit(const State& s, const Parameters& p, const Laplacians& laps,
                           double dt) {
    const double limit = cfl_limit(s.grid(), p);
    if (dt > limit)
        throw std::invalid_argument("step_explicit: dt " + std::to_string(dt) +
                                    " exceeds diffusive CFL bound " + std::to_string(limit));
    return detail::advance_explicit(s, standard_kinetics(p), laps, dt);
}

/// One IMEX step: diffusion implicit (backward Euler), reaction explicit.
inline State step_imex(const State& s, const Parameters& p, const Laplacians& laps, double dt,
                       double tol = 1e-10) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_imex: dt must be positive");
    detail::ImexMatrices mats;
    mats.ensure(laps, dt);
    return detail::advance_imex(s, standard_kinetics(p), mats, dt, tol);
}

struct MonitorRecord {
    double time = 0.0;
    double min_T = 0.0, min_I = 0.0, min_V = 0.0;
    double sup_T = 0.0, sup_I = 0.0, sup_V = 0.0;
};

struct Trajectory {
    std::vector<std::pair<double, State>> snapshots;
    std::vector<MonitorRecord> monitor_log;
    double dt = 0.0;
    bool completed = false;
    std::string diagnostic;  // set when a step error aborted the run

    double min_over_run() const {
        double m = 0.0;
        for (const auto& r : monitor_log)
            m = std::min({m, r.min_T, r.min_I, r.min_V});
        return m;
    }
};

namespace detail {

inline MonitorRecord record_of(const State& s) {
    return {s.time,       min_value(s.T), min_value(s.I), min_value(s.V),
            sup_norm(s.T), sup_norm(s.I),  sup_norm(s.V)};
}

inline Trajectory run_simulation(const State& init, const KineticsFn& kinetics,
                                 const Diffusivities& diff, const StepperConfig& cfg,
                                 const Grid& g, double cfl, double imex_tol) {
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
    const double dt = cfg.dt;
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (!(dt < cfg.t_end)) throw std::invalid_argument("simulate: dt must be below t_end");
    if (cfg.snapshot_every <= 0)
        throw std::invalid_argument("simulate: snapshot_every must be positive");
    if (cfg.scheme == Scheme::explicit_euler && dt > cfl)
        throw std::invalid_argument("simulate: dt exceeds diffusive CFL bound " +
                                    std::to_string(cfl));

    Laplacians laps{assemble_laplacian(g, diff.T), assemble_laplacian(g, diff.I),
                    assemble_laplacian(g, diff.V)};
    ImexMatrices mats;

    const double span = cfg.t_end - init.time;
    long n_steps = std::lround(span / dt);
    if (n_steps < 1 || std::abs(n_steps * dt - span) > 1e-9 * span)
        n_steps = static_cast<long>(std::ceil(span / dt - 1e-12));

    Trajectory traj;
    traj.dt = dt;
    traj.snapshots.emplace_back(init.time, init);
    traj.monitor_log.push_back(record_of(init));

    State current = init;
    for (long step = 1; step <= n_steps; ++step) {
        const double target = step == n_steps ? cfg.t_end : init.time + step * dt;
        const double h = target - current.time;
        try {
            if (cfg.scheme == Scheme::explicit_euler) {
                current = advance_explicit(current, kinetics, laps, h);
            } else {
                mats.ensure(laps, h);
                current = advance_imex(current, kinetics, mats, h, imex_tol);
            }
        } catch (const std::exception& e) {
            traj.diagnostic = "step " + std::to_string(step) + ": " + e.what();
            return traj;
        }
        traj.monitor_log.push_back(record_of(current));
        if (step % cfg.snapshot_every == 0 || step == n_steps)
            traj.snapshots.emplace_back(current.time, current);
    }
    traj.completed = true;
    return traj;
}

}  // namespace detail

/// Advance the three-component system to t_end, collecting snapshots every
/// snapshot_every steps plus the initial and final states. Monitors only
/// record; they never mutate the solution.
inline Trajectory simulate(const State& init, const Parameters& p, const StepperConfig& cfg,
                           const Grid& g, double imex_tol = 1e-12) {
    const ValidationReport rep = validate_for_simulation(p, init);
    if (!rep.ok()) throw std::invalid_argument("simulate: " + rep.violations.front());
    StepperConfig c = cfg;
    if (c.dt <= 0.0) c.dt = default_dt(p);
    return detail::run_simulation(init, standard_kinetics(p), diffusivities_of(p), c, g,
                                  cfl_limit(g, p), imex_tol);
}

/// Same driver with caller-supplied kinetics and diffusivities (used by the
/// dimensionless system, which is not expressible as a Parameters set).
inline Trajectory simulate_kinetics(const State& init, const KineticsFn& kinetics,
                                    const Diffusivities& diff, const StepperConfig& cfg,
                                    const Grid& g, double imex_tol = 1e-12) {
    const double h = g.min_spacing();
    const double d = std::max({diff.T, diff.I, diff.V});
    return detail::run_simulation(init, kinetics, diff, cfg, g,
                                  h * h / (2.0 * g.dim * d), imex_tol);
}

struct BoundViolation {
    std::size_t snapshot = 0;
    double time = 0.0;
    double value = 0.0;
    double bound = 0.0;
    std::string which;
};

struct MonitorReport {
    std::vector<BoundViolation> violations;
    double min_nodal_value = 0.0;   // over every step and component
    double max_excess_T = 0.0;      // worst (value - bound) against the decay bound, <= 0 if none
    double T_M = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks the a-priori sup bounds along a trajectory: the exponential
/// supply bound and the uniform bound T_M for T, and the Gronwall envelope
/// for I+V. Band defaults to 1e-6 of the bound value.
inline MonitorReport monitor_bounds(const Trajectory& traj, const Parameters& p,
                                    const MonitorFlags& flags = {}, double band_rel = 1e-6) {
    MonitorReport rep;
    if (traj.snapshots.empty()) return rep;

    const State& init = traj.snapshots.front().second;
    const double t0 = traj.snapshots.front().first;
    const double sup_T0 = sup_norm(init.T);
    const double sup_lambda = sup_norm(p.lambda);
    const double supply = sup_lambda / p.mu_T;
    rep.T_M = sup_T0 + supply;
    const double phi0 = sup_norm(init.I) + sup_norm(init.V);
    const double gronwall_rate = std::max(p.k * rep.T_M, p.N * p.mu_I);
    rep.min_nodal_value = traj.min_over_run();

    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        const auto& [t, s] = traj.snapshots[i];
        const double dt_elapsed = t - t0;
        if (flags.sup_bound_T) {
            const double decay_bound =
                sup_T0 * std::exp(-p.mu_T * dt_elapsed) + supply * (1.0 - std::exp(-p.mu_T * dt_elapsed));
            const double sup_T = sup_norm(s.T);
            rep.max_excess_T = std::max(rep.max_excess_T, sup_T - decay_bound);
            if (sup_T > decay_bound + band_rel * std::max(decay_bound, 1.0))
                rep.violations.push_back({i, t, sup_T, decay_bound, "T exponential supply bound"});
            if (sup_T > rep.T_M + band_rel * rep.T_M)
                rep.violations.push_back({i, t, sup_T, rep.T_M, "T uniform bound T_M"});
        }
        if (flags.gronwall_IV) {
            const double phi = sup_norm(s.I) + sup_norm(s.V);
            const double envelope = phi0 * std::exp(gronwall_rate * dt_elapsed);
            if (phi > envelope + band_rel * std::max(envelope, 1.0))
                rep.violations.push_back({i, t, phi, envelope, "I+V Gronwall envelope"});
        }
    }
    if (flags.positivity && rep.min_nodal_value < -1e-12)
        rep.violations.push_back(
            {0, 0.0, rep.min_nodal_value, -1e-12, "positivity floor (some step, some node)"});
    return rep;
}

}  // namespace virodyn
