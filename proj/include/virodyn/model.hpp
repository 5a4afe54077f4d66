#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "virodyn/field.hpp"
#include "virodyn/grid.hpp"
#include "virodyn/sparse.hpp"

namespace virodyn {

/// Model constants of the three-component system. lambda is the spatially
/// varying T-cell supply rate; all scalars are strictly positive.
struct Parameters {
    Field lambda;
    double k = 0.0;     // infection rate per virion
    double N = 0.0;     // burst size
    double mu_T = 0.0;  // uninfected cell removal rate
    double mu_I = 0.0;  // infected cell removal rate
    double mu_V = 0.0;  // virion clearance rate
    double D_T = 0.0;
    double D_I = 0.0;
    double D_V = 0.0;
};

struct State {
    double time = 0.0;
    Field T;
    Field I;
    Field V;

    const Grid& grid() const { return T.grid; }
};

inline State make_state(const Grid& g, double T0, double I0, double V0, double time = 0.0) {
    State s;
    s.time = time;
    s.T = Field(g, T0);
    s.I = Field(g, I0);
    s.V = Field(g, V0);
    return s;
}

/// Nodewise reaction rates of the kinetics.
struct Reaction {
    std::vector<double> f_T;
    std::vector<double> f_I;
    std::vector<double> f_V;
};

inline Reaction reaction(const State& s, const Parameters& p) {
    require_same_grid(s.T, p.lambda, "reaction");
    require_same_grid(s.T, s.I, "reaction");
    require_same_grid(s.T, s.V, "reaction");
    const std::size_t n = s.T.size();
    Reaction r{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        const double transfer = p.k * s.T[j] * s.V[j];
        r.f_T[j] = p.lambda[j] - p.mu_T * s.T[j] - transfer;
        r.f_I[j] = transfer - p.mu_I * s.I[j];
        r.f_V[j] = p.N * p.mu_I * s.I[j] - p.mu_V * s.V[j];
    }
    return r;
}

/// Validation of the standing assumptions: positive constants, lambda >= 0
/// and not identically zero, strictly positive initial data. Violations
/// make the input inadmissible; warnings do not.
struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const Parameters& p, const State& init) {
    ValidationReport rep;
    auto positive = [&rep](double v, const char* name) {
        if (!(v > 0.0)) rep.violations.push_back(std::string(name) + " must be strictly positive");
    };
    positive(p.k, "k");
    positive(p.N, "N");
    positive(p.mu_T, "mu_T");
    positive(p.mu_I, "mu_I");
    positive(p.mu_V, "mu_V");
    positive(p.D_T, "D_T");
    positive(p.D_I, "D_I");
    positive(p.D_V, "D_V");

    if (min_value(p.lambda) < 0.0) rep.violations.push_back("lambda has negative nodal values");
    if (max_value(p.lambda) == 0.0) rep.violations.push_back("lambda identically zero");

    if (!init.T.grid.same_layout(p.lambda.grid))
        rep.violations.push_back("initial state and lambda live on different grids");
    for (auto [f, name] : {std::pair{&init.T, "T0"}, {&init.I, "I0"}, {&init.V, "V0"}}) {
        const double mn = min_value(*f);
        if (mn < 0.0)
            rep.violations.push_back(std::string(name) + " has negative nodal values");
        else if (mn == 0.0)
            rep.violations.push_back(std::string(name) +
                                     " violates strict positivity of the initial data");
    }
    return rep;
}

/// Admissibility at simulation entry: nonnegative data allowed, zero
/// minima downgraded to warnings.
inline ValidationReport validate_for_simulation(const Parameters& p, const State& init) {
    ValidationReport rep = validate(p, init);
    std::vector<std::string> keep;
    for (auto& v : rep.violations) {
        if (v.find("strict positivity") != std::string::npos)
            rep.warnings.push_back(v + " (accepted: bounds need only nonnegativity)");
        else
            keep.push_back(v);
    }
    rep.violations = std::move(keep);
    return rep;
}

// ---------------------------------------------------------------------------
// lambda builders

struct GaussianBump {
    std::array<double, 2> center{0.0, 0.0};
    double width = 1.0;
    double amplitude = 0.0;
};

struct LambdaSpec {
    enum class Family { Constant, Gaussian, Bumps, Step, Tabulated };
    Family family = Family::Constant;
    double value = 0.0;               // Constant
    std::vector<GaussianBump> bumps;  // Gaussian (one entry) / Bumps
    double step_low = 0.0;            // Step
    double step_high = 0.0;
    double step_edge = 0.5;  // fraction of the axis length where the level switches
    int step_axis = 0;
    std::vector<double> table;  // Tabulated
};

inline Field lambda_builder(const LambdaSpec& spec, const Grid& g) {
    using Family = LambdaSpec::Family;
    Field f(g, 0.0);
    const int n = g.num_nodes();
    const int nx = g.nodes[0];

    switch (spec.family) {
        case Family::Constant:
            if (spec.value < 0.0) throw std::invalid_argument("lambda constant: negative value");
            for (auto& v : f.values) v = spec.value;
            break;
        case Family::Gaussian:
        case Family::Bumps: {
            if (spec.bumps.empty()) throw std::invalid_argument("lambda gaussian: no bumps given");
            for (const auto& b : spec.bumps) {
                if (b.amplitude < 0.0)
                    throw std::invalid_argument("lambda gaussian: negative amplitude");
                if (!(b.width > 0.0))
                    throw std::invalid_argument("lambda gaussian: width must be positive");
            }
            for (int j = 0; j < n; ++j) {
                const int ix = j % nx;
                const int iy = j / nx;
                double v = 0.0;
                for (const auto& b : spec.bumps) {
                    double r2 = std::pow(g.coordinate(0, ix) - b.center[0], 2);
                    if (g.dim == 2) r2 += std::pow(g.coordinate(1, iy) - b.center[1], 2);
                    v += b.amplitude * std::exp(-r2 / (2.0 * b.width * b.width));
                }
                f.values[j] = v;
            }
            break;
        }
        case Family::Step: {
            if (spec.step_low < 0.0 || spec.step_high < 0.0)
                throw std::invalid_argument("lambda step: negative level");
            if (spec.step_axis < 0 || spec.step_axis >= g.dim)
                throw std::invalid_argument("lambda step: axis out of range");
            const double edge = spec.step_edge * g.lengths[spec.step_axis];
            for (int j = 0; j < n; ++j) {
                const int idx = spec.step_axis == 0 ? j % nx : j / nx;
                const double x = g.coordinate(spec.step_axis, idx);
                f.values[j] = x < edge ? spec.step_low : spec.step_high;
            }
            break;
        }
        case Family::Tabulated: {
            if (static_cast<int>(spec.table.size()) != n)
                throw std::invalid_argument("lambda tabulated: length mismatch (" +
                                            std::to_string(spec.table.size()) + " values for " +
                                            std::to_string(n) + " nodes)");
            for (double v : spec.table)
                if (v < 0.0) throw std::invalid_argument("lambda tabulated: negative value");
            f.values = spec.table;
            break;
        }
    }
    require_finite(f.values, "lambda_builder");
    return f;
}

/// The three species' diffusion operators on a shared grid.
struct Laplacians {
    SparseOperator T;
    SparseOperator I;
    SparseOperator V;
};

inline Laplacians assemble_laplacians(const Grid& g, const Parameters& p) {
    return {assemble_laplacian(g, p.D_T), assemble_laplacian(g, p.D_I),
            assemble_laplacian(g, p.D_V)};
}

}  // namespace virodyn
