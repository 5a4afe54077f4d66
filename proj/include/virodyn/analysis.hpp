#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/model.hpp"
#include "virodyn/spectral.hpp"
#include "virodyn/steady.hpp"
#include "virodyn/timestep.hpp"

namespace virodyn {

struct DecayFit {
    double rate = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of log(value) vs time after discarding the leading
/// transient_fraction of samples. All values in the fit window must be
/// positive and at least 10 points must remain.
inline DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& series,
                               double transient_fraction = 0.2) {
    const std::size_t skip =
        static_cast<std::size_t>(std::floor(series.size() * transient_fraction));
    if (series.size() < skip + 10)
        throw std::invalid_argument("fit_decay_rate: fewer than 10 points after transient");

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const std::size_t m = series.size() - skip;
    for (std::size_t i = skip; i < series.size(); ++i) {
        const auto& [t, v] = series[i];
        if (!(v > 0.0))
            throw std::invalid_argument("fit_decay_rate: nonpositive value in fit window");
        const double y = std::log(v);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        syy += y * y;
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_decay_rate: degenerate time axis");
    DecayFit fit;
    fit.rate = (m * sxy - sx * sy) / denom;
    const double ss_tot = syy - sy * sy / m;
    const double intercept = (sy - fit.rate * sx) / m;
    double ss_res = 0.0;
    for (std::size_t i = skip; i < series.size(); ++i) {
        const double e = std::log(series[i].second) - (intercept + fit.rate * series[i].first);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

struct ConvergenceReport {
    int violations = 0;
    double max_excess = 0.0;        // worst value - bound (can be negative)
    double max_relative_excess = 0.0;
    double band = 0.0;
    double initial_gap = 0.0;
};

/// Theorem-style exponential envelope on the T gap:
/// ||T(t) - T_inf||_inf <= ||T0 - T_inf||_inf * exp(-mu_T t) + band,
/// with band = max(1e-6 * gap0, 10 * dt * gap0 * mu_T) absorbing the
/// first-order time-discretization excess.
inline ConvergenceReport verify_T_convergence(const Trajectory& traj, const Field& T_inf,
                                              double mu_T) {
    if (traj.snapshots.size() < 2)
        throw std::invalid_argument("verify_T_convergence: need at least 2 snapshots");
    ConvergenceReport rep;
    const auto& [t0, init] = traj.snapshots.front();
    Field gap0 = init.T;
    for (std::size_t j = 0; j < gap0.size(); ++j) gap0[j] -= T_inf[j];
    rep.initial_gap = sup_norm(gap0);
    rep.band = std::max(1e-6 * rep.initial_gap, 10.0 * traj.dt * rep.initial_gap * mu_T);

    for (const auto& [t, s] : traj.snapshots) {
        double dev = 0.0;
        for (std::size_t j = 0; j < s.T.size(); ++j)
            dev = std::max(dev, std::abs(s.T[j] - T_inf[j]));
        const double bound = rep.initial_gap * std::exp(-mu_T * (t - t0));
        const double excess = dev - bound;
        rep.max_excess = std::max(rep.max_excess, excess);
        if (bound > 0.0)
            rep.max_relative_excess = std::max(rep.max_relative_excess, excess / bound);
        if (excess > rep.band) ++rep.violations;
    }
    return rep;
}

struct IVDecayResult {
    double rate = 0.0;
    double r_squared = 0.0;
    bool decayed = false;
    double final_over_initial = 0.0;
};

/// Fits the decay rate of ||I(t)||_inf + ||V(t)||_inf along a trajectory.
/// decayed is true when the series fell below 1e-8 of its initial value or
/// the fitted rate is negative with r^2 > 0.99.
inline IVDecayResult verify_IV_decay(const Trajectory& traj) {
    std::vector<std::pair<double, double>> series;
    series.reserve(traj.snapshots.size());
    for (const auto& [t, s] : traj.snapshots)
        series.emplace_back(t, sup_norm(s.I) + sup_norm(s.V));
    if (series.empty() || !(series.front().second > 0.0))
        throw std::invalid_argument("verify_IV_decay: I and V vanish initially (exact clearance)");

    IVDecayResult out;
    out.final_over_initial = series.back().second / series.front().second;
    const DecayFit fit = fit_decay_rate(series);
    out.rate = fit.rate;
    out.r_squared = fit.r_squared;
    out.decayed = out.final_over_initial <= 1e-8 || (fit.rate < 0.0 && fit.r_squared > 0.99);
    return out;
}

class RegimeExit : public std::runtime_error {
public:
    explicit RegimeExit(const std::string& msg) : std::runtime_error(msg) {}
};

/// Measures the linear growth (or decay) rate of a perturbation of the
/// clearance state seeded with the principal eigenvector. The run is kept
/// inside the linear regime: ||I||_inf below 1e-3 * ||T_inf||_inf.
inline double measure_growth_rate(const Parameters& p, const Grid& g, double epsilon = 0.0,
                                  double t_window = 0.0, double dt = 0.0) {
    const Field T_inf = solve_T_infinity(p, g);
    const SpectralResult spec = principal_eigenvalue(assemble_linearized(p, T_inf, g));
    if (epsilon <= 0.0) epsilon = 1e-6 * sup_norm(T_inf);
    if (t_window <= 0.0) t_window = 5.0 / std::max({p.mu_T, p.mu_I, p.mu_V});
    if (dt <= 0.0) dt = default_dt(p);

    State s;
    s.T = T_inf;
    s.I = Field(g);
    s.V = Field(g);
    for (std::size_t j = 0; j < s.I.size(); ++j) {
        s.I[j] = epsilon * spec.eigenvector_I[j];
        s.V[j] = epsilon * spec.eigenvector_V[j];
    }

    const double regime_cap = 1e-3 * sup_norm(T_inf);
    const Laplacians laps = assemble_laplacians(g, p);
    detail::ImexMatrices mats;
    mats.ensure(laps, dt);
    const KineticsFn kinetics = standard_kinetics(p);

    std::vector<std::pair<double, double>> series;
    series.emplace_back(s.time, sup_norm(s.I) + sup_norm(s.V));
    const long n_steps = static_cast<long>(std::ceil(t_window / dt - 1e-12));
    for (long step = 1; step <= n_steps; ++step) {
        s = detail::advance_imex(s, kinetics, mats, dt, 1e-12);
        if (sup_norm(s.I) > regime_cap) break;
        series.emplace_back(s.time, sup_norm(s.I) + sup_norm(s.V));
    }
    const std::size_t needed =
        static_cast<std::size_t>(std::floor(series.size() * 0.2)) + 10;
    if (series.size() < needed || series.size() < 13)
        throw RegimeExit("measure_growth_rate: linear regime exited after " +
                         std::to_string(series.size()) + " samples; shrink epsilon");
    return fit_decay_rate(series).rate;
}

enum class Experiment { classify, decay, growth };

struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    std::optional<StabilityReport> report;   // classify
    std::optional<IVDecayResult> decay;      // decay
    std::optional<double> growth_rate;       // growth
};

inline Parameters with_parameter(Parameters p, const std::string& axis, double value) {
    if (axis == "k") p.k = value;
    else if (axis == "N") p.N = value;
    else if (axis == "mu_T") p.mu_T = value;
    else if (axis == "mu_I") p.mu_I = value;
    else if (axis == "mu_V") p.mu_V = value;
    else if (axis == "D_T") p.D_T = value;
    else if (axis == "D_I") p.D_I = value;
    else if (axis == "D_V") p.D_V = value;
    else throw std::invalid_argument("sweep: unknown parameter axis '" + axis + "'");
    return p;
}

/// One experiment per parameter value; rows keep their input order and
/// per-row failures are recorded without aborting the sweep. Rows run as
/// independent tasks.
inline std::vector<SweepRow> sweep(const Parameters& params_template, const Grid& g,
                                   const std::string& axis, const std::vector<double>& values,
                                   Experiment experiment, double t_end = 0.0) {
    with_parameter(params_template, axis, 1.0);  // validate the axis name up front

    auto run_one = [&](double value) {
        SweepRow row;
        row.value = value;
        try {
            const Parameters p = with_parameter(params_template, axis, value);
            switch (experiment) {
                case Experiment::classify:
                    row.report = classify_stability(p, g);
                    break;
                case Experiment::decay: {
                    const Field T_inf = solve_T_infinity(p, g);
                    State init;
                    init.T = T_inf;
                    const double level = 1e-3 * std::max(sup_norm(T_inf), 1.0);
                    init.I = Field(g, level);
                    init.V = Field(g, level);
                    StepperConfig cfg;
                    cfg.dt = default_dt(p);
                    cfg.t_end = t_end > 0.0 ? t_end : 10.0 / std::min({p.mu_T, p.mu_I, p.mu_V});
                    cfg.snapshot_every = 10;
                    row.decay = verify_IV_decay(simulate(init, p, cfg, g));
                    break;
                }
                case Experiment::growth:
                    row.growth_rate = measure_growth_rate(p, g);
                    break;
            }
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        return row;
    };

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(values.size());
    for (double v : values)
        futures.push_back(std::async(std::launch::async, run_one, v));
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

}  // namespace virodyn
