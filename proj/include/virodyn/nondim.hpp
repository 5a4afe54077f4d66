#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/model.hpp"
#include "virodyn/timestep.hpp"

namespace virodyn {

/// Characteristic scales of the rescaling t* = t/t_c, x* = x/x_c,
/// (T*, I*, V*) = (T/T_c, I/I_c, V/V_c).
struct ScalingConstants {
    double t_c = 0.0;
    double x_c = 0.0;
    double T_c = 0.0;
    double I_c = 0.0;
    double V_c = 0.0;
};

/// The five surviving parameters of the dimensionless system plus the
/// rescaled supply field q(x) = kN/(mu_T*mu_V) * lambda(x).
struct DimensionlessParameters {
    double alpha1 = 0.0;  // mu_I/mu_T
    double alpha2 = 0.0;  // mu_V/mu_T
    double beta1 = 0.0;   // D_I/D_T
    double beta2 = 0.0;   // D_V/D_T
    Field q;
};

inline std::pair<ScalingConstants, DimensionlessParameters> nondimensionalize(
    const Parameters& p) {
    ScalingConstants c;
    c.t_c = 1.0 / p.mu_T;
    c.x_c = std::sqrt(p.D_T / p.mu_T);
    c.T_c = p.mu_V / (p.k * p.N);
    c.I_c = p.mu_V * p.mu_T / (p.k * p.N * p.mu_I);
    c.V_c = p.mu_T / p.k;

    DimensionlessParameters d;
    d.alpha1 = p.mu_I / p.mu_T;
    d.alpha2 = p.mu_V / p.mu_T;
    d.beta1 = p.D_I / p.D_T;
    d.beta2 = p.D_V / p.D_T;
    d.q = p.lambda;
    const double qc = p.k * p.N / (p.mu_T * p.mu_V);
    for (auto& v : d.q.values) v *= qc;
    return {c, d};
}

enum class ScaleDirection { to_dimensionless, to_dimensional };

/// Grid with lengths reinterpreted through x_c; node counts unchanged.
inline Grid rescale_grid(const Grid& g, const ScalingConstants& c, ScaleDirection dir) {
    Grid out = g;
    const double s = dir == ScaleDirection::to_dimensionless ? 1.0 / c.x_c : c.x_c;
    for (int a = 0; a < g.dim; ++a) {
        out.lengths[a] *= s;
        out.spacing[a] *= s;
    }
    return out;
}

inline State rescale_state(const State& s, const ScalingConstants& c, ScaleDirection dir) {
    State out = s;
    const Grid g = rescale_grid(s.grid(), c, dir);
    out.T.grid = g;
    out.I.grid = g;
    out.V.grid = g;
    const bool fwd = dir == ScaleDirection::to_dimensionless;
    out.time = fwd ? s.time / c.t_c : s.time * c.t_c;
    const double sT = fwd ? 1.0 / c.T_c : c.T_c;
    const double sI = fwd ? 1.0 / c.I_c : c.I_c;
    const double sV = fwd ? 1.0 / c.V_c : c.V_c;
    for (auto& v : out.T.values) v *= sT;
    for (auto& v : out.I.values) v *= sI;
    for (auto& v : out.V.values) v *= sV;
    return out;
}

/// Kinetics of the dimensionless system:
///   f_T = q - T - T*V,  f_I = alpha1*(T*V - I),  f_V = alpha2*(I - V).
/// Not expressible as a Parameters set: the bilinear transfer carries
/// coefficient 1 in the T equation but alpha1 in the I equation.
inline KineticsFn dimensionless_kinetics(const DimensionlessParameters& d) {
    return [d](const State& s) {
        require_same_grid(s.T, d.q, "dimensionless kinetics");
        const std::size_t n = s.T.size();
        Reaction r{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t j = 0; j < n; ++j) {
            const double tv = s.T[j] * s.V[j];
            r.f_T[j] = d.q[j] - s.T[j] - tv;
            r.f_I[j] = d.alpha1 * (tv - s.I[j]);
            r.f_V[j] = d.alpha2 * (s.I[j] - s.V[j]);
        }
        return r;
    };
}

inline Diffusivities dimensionless_diffusivities(const DimensionlessParameters& d) {
    return {1.0, d.beta1, d.beta2};
}

}  // namespace virodyn
