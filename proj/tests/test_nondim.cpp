#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "virodyn/nondim.hpp"
#include "virodyn/steady.hpp"
#include "virodyn/timestep.hpp"

using namespace virodyn;

namespace {

Parameters canonical_params(const Grid& g) {
    Parameters p;
    p.lambda = Field(g, 10.0);
    p.k = 1e-5;
    p.N = 100.0;
    p.mu_T = 0.1;
    p.mu_I = 0.5;
    p.mu_V = 5.0;
    p.D_T = p.D_I = p.D_V = 0.01;
    return p;
}

}  // namespace

TEST_CASE("scaling constants and dimensionless parameters") {
    const Grid g = build_grid(1, {1.0}, {16}, BoundaryKind::Neumann0);

    SECTION("unit normalization of mu_T and D_T") {
        Parameters p = canonical_params(g);
        p.mu_T = 1.0;
        p.D_T = 1.0;
        const auto [c, d] = nondimensionalize(p);
        REQUIRE(c.t_c == 1.0);
        REQUIRE(c.x_c == 1.0);
        REQUIRE(d.alpha1 == Catch::Approx(p.mu_I).epsilon(1e-14));
        REQUIRE(d.alpha2 == Catch::Approx(p.mu_V).epsilon(1e-14));
    }
    SECTION("concentration scales from the definitions") {
        Parameters p = canonical_params(g);
        p.k = 1e-5;
        p.N = 100.0;
        p.mu_V = 10.0;
        const auto [c, d] = nondimensionalize(p);
        REQUIRE(c.T_c == Catch::Approx(1e4).epsilon(1e-14));
        REQUIRE(c.I_c == Catch::Approx(p.mu_V * p.mu_T / (p.k * p.N * p.mu_I)).epsilon(1e-14));
        REQUIRE(c.V_c == Catch::Approx(p.mu_T / p.k).epsilon(1e-14));
        REQUIRE(c.t_c == Catch::Approx(1.0 / p.mu_T).epsilon(1e-14));
        REQUIRE(c.x_c == Catch::Approx(std::sqrt(p.D_T / p.mu_T)).epsilon(1e-14));
        REQUIRE(d.beta1 == Catch::Approx(p.D_I / p.D_T).epsilon(1e-14));
        REQUIRE(d.beta2 == Catch::Approx(p.D_V / p.D_T).epsilon(1e-14));
    }
    SECTION("sup of q is the corollary quantity") {
        const Parameters p = canonical_params(g);
        const auto [c, d] = nondimensionalize(p);
        const double corollary = p.N * p.k * sup_norm(p.lambda) / (p.mu_T * p.mu_V);
        REQUIRE(sup_norm(d.q) == Catch::Approx(corollary).epsilon(1e-14));
    }
}

TEST_CASE("rescale_state") {
    const Grid g = build_grid(1, {2.0}, {24}, BoundaryKind::Neumann0);
    const Parameters p = canonical_params(g);
    const auto [c, d] = nondimensionalize(p);

    SECTION("roundtrip is the identity") {
        State s = make_state(g, 123.0, 4.5, 67.0, 1.25);
        for (int j = 0; j < g.num_nodes(); ++j) s.T[j] += j * 0.1;
        const State back = rescale_state(
            rescale_state(s, c, ScaleDirection::to_dimensionless), c,
            ScaleDirection::to_dimensional);
        REQUIRE(back.time == Catch::Approx(s.time).epsilon(1e-14));
        for (int j = 0; j < g.num_nodes(); ++j) {
            REQUIRE(back.T[j] == Catch::Approx(s.T[j]).epsilon(1e-14));
            REQUIRE(back.I[j] == Catch::Approx(s.I[j]).epsilon(1e-14));
            REQUIRE(back.V[j] == Catch::Approx(s.V[j]).epsilon(1e-14));
        }
        REQUIRE(back.grid().lengths[0] == Catch::Approx(2.0).epsilon(1e-14));
    }
    SECTION("clearance maps to clearance") {
        const State s = make_state(g, 55.0, 0.0, 0.0);
        const State star = rescale_state(s, c, ScaleDirection::to_dimensionless);
        REQUIRE(sup_norm(star.I) == 0.0);
        REQUIRE(sup_norm(star.V) == 0.0);
    }
    SECTION("R0 below one makes the rescaled equilibrium T count below one") {
        // R0_sup = 0.02 here
        const Field t_inf = solve_T_infinity(p, g);
        State eq;
        eq.T = t_inf;
        eq.I = Field(g, 0.0);
        eq.V = Field(g, 0.0);
        const State star = rescale_state(eq, c, ScaleDirection::to_dimensionless);
        REQUIRE(sup_norm(star.T) < 1.0);
        REQUIRE(sup_norm(star.T) == Catch::Approx(0.02).epsilon(1e-9));
    }
}

TEST_CASE("dimensionless kinetics reproduce the scaled reaction terms") {
    const Grid g = build_grid(1, {1.0}, {8}, BoundaryKind::Neumann0);
    const Parameters p = canonical_params(g);
    const auto [c, d] = nondimensionalize(p);

    const State s = make_state(g, 480.0, 3.0, 75.0);
    const State star = rescale_state(s, c, ScaleDirection::to_dimensionless);
    const Reaction r_dim = reaction(s, p);
    State star_on_g = star;  // kinetics need q's grid; lengths differ only in metadata
    star_on_g.T.grid = g;
    star_on_g.I.grid = g;
    star_on_g.V.grid = g;
    const Reaction r_star = dimensionless_kinetics(d)(star_on_g);

    // chain rule: d(u*)/dt* = t_c/u_c * du/dt
    for (int j = 0; j < g.num_nodes(); ++j) {
        REQUIRE(r_star.f_T[j] == Catch::Approx(c.t_c / c.T_c * r_dim.f_T[j]).epsilon(1e-12));
        REQUIRE(r_star.f_I[j] == Catch::Approx(c.t_c / c.I_c * r_dim.f_I[j]).epsilon(1e-12));
        REQUIRE(r_star.f_V[j] == Catch::Approx(c.t_c / c.V_c * r_dim.f_V[j]).epsilon(1e-12));
    }
}

TEST_CASE("dynamics equivalence of the two pipelines") {
    // simulate-then-rescale equals rescale-then-simulate at matched
    // dimensionless end time
    const Grid g = build_grid(1, {1.0}, {32}, BoundaryKind::Neumann0);
    const Parameters p = canonical_params(g);
    const auto [c, d] = nondimensionalize(p);

    const State init = make_state(g, 600.0, 10.0, 100.0);
    const double t_end = 5.0;
    const double dt = 1e-3;

    StepperConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_every = 1 << 20;
    const State dim_final = simulate(init, p, cfg, g).snapshots.back().second;
    const State route_a = rescale_state(dim_final, c, ScaleDirection::to_dimensionless);

    const State init_star = rescale_state(init, c, ScaleDirection::to_dimensionless);
    const Grid g_star = init_star.grid();
    StepperConfig cfg_star;
    cfg_star.dt = dt / c.t_c;
    cfg_star.t_end = t_end / c.t_c;
    cfg_star.snapshot_every = 1 << 20;
    DimensionlessParameters d_star = d;
    d_star.q.grid = g_star;
    State init_star_g = init_star;
    const State route_b =
        simulate_kinetics(init_star_g, dimensionless_kinetics(d_star),
                          dimensionless_diffusivities(d_star), cfg_star, g_star)
            .snapshots.back()
            .second;

    for (int j = 0; j < g.num_nodes(); ++j) {
        REQUIRE(route_a.T[j] == Catch::Approx(route_b.T[j]).margin(1e-6));
        REQUIRE(route_a.I[j] == Catch::Approx(route_b.I[j]).margin(1e-6));
        REQUIRE(route_a.V[j] == Catch::Approx(route_b.V[j]).margin(1e-6));
    }
}
