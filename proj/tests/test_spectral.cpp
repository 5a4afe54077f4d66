#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "virodyn/spectral.hpp"

using namespace virodyn;

namespace {

Parameters base_params(const Grid& g, double lambda0 = 10.0) {
    Parameters p;
    p.lambda = Field(g, lambda0);
    p.k = 1e-5;
    p.N = 100.0;
    p.mu_T = 0.1;
    p.mu_I = 0.5;
    p.mu_V = 5.0;
    p.D_T = p.D_I = p.D_V = 0.01;
    return p;
}

/// Largest eigenvalue of the homogeneous 2x2 coupling matrix
/// [[-mu_I, kT], [N mu_I, -mu_V]].
double top_eigenvalue_2x2(double mu_I, double mu_V, double kT, double Nmu_I) {
    const double tr = -(mu_I + mu_V);
    const double disc = (mu_I - mu_V) * (mu_I - mu_V) + 4.0 * kT * Nmu_I;
    return 0.5 * (tr + std::sqrt(disc));
}

}  // namespace

TEST_CASE("assemble_linearized structure") {
    const Grid g = build_grid(1, {1.0}, {12}, BoundaryKind::Neumann0);
    const Parameters p = base_params(g);
    const int n = g.num_nodes();

    SECTION("coupling entries reproduce M(x) once the diffusion blocks are removed") {
        Field t_inf(g, 0.0);
        std::mt19937_64 rng(4);
        for (auto& v : t_inf.values) v = std::uniform_real_distribution<double>(0.0, 500.0)(rng);
        const auto op = assemble_linearized(p, t_inf, g);
        auto dense = op.to_dense();
        for (auto e : assemble_laplacian(g, p.D_I).triplets())
            dense[static_cast<std::size_t>(e.row) * 2 * n + e.col] -= e.value;
        for (auto e : assemble_laplacian(g, p.D_V).triplets())
            dense[static_cast<std::size_t>(e.row + n) * 2 * n + (e.col + n)] -= e.value;
        for (int j = 0; j < n; ++j) {
            for (int c = 0; c < 2 * n; ++c) {
                const double mII = dense[static_cast<std::size_t>(j) * 2 * n + c];
                const double mVI = dense[static_cast<std::size_t>(n + j) * 2 * n + c];
                if (c == j) {
                    REQUIRE(mII == Catch::Approx(-p.mu_I));
                    REQUIRE(mVI == Catch::Approx(p.N * p.mu_I));
                } else if (c == n + j) {
                    REQUIRE(mII == Catch::Approx(p.k * t_inf[j]));
                    REQUIRE(mVI == Catch::Approx(-p.mu_V));
                } else {
                    REQUIRE(mII == 0.0);
                    REQUIRE(mVI == 0.0);
                }
            }
        }
    }
    SECTION("off-diagonal entries are nonnegative (cooperative structure)") {
        const Field t_inf(g, 123.0);
        for (const auto& e : assemble_linearized(p, t_inf, g).triplets())
            if (e.row != e.col) REQUIRE(e.value >= 0.0);
    }
    SECTION("grid mismatch is rejected; sub-minimal grids cannot be built") {
        const Grid other = build_grid(1, {1.0}, {13}, BoundaryKind::Neumann0);
        REQUIRE_THROWS_AS(assemble_linearized(p, Field(other, 1.0), g), std::invalid_argument);
        REQUIRE_THROWS_AS(build_grid(1, {1.0}, {1}, BoundaryKind::Neumann0),
                          std::invalid_argument);
    }
}

TEST_CASE("principal_eigenvalue on engineered spectra") {
    const Grid g = build_grid(1, {1.0}, {24}, BoundaryKind::Neumann0);

    SECTION("homogeneous neumann, mu_I = mu_V = 1, kT = 4, N mu_I = 1: eta0 = 1") {
        Parameters p = base_params(g);
        p.mu_I = 1.0;
        p.mu_V = 1.0;
        p.N = 1.0;
        p.k = 0.04;
        const Field t_inf(g, 100.0);  // kT_inf = 4
        const auto res = principal_eigenvalue(assemble_linearized(p, t_inf, g));
        REQUIRE(res.converged);
        REQUIRE(res.eta0 == Catch::Approx(1.0).margin(1e-9));
    }
    SECTION("R0 = 1 exactly: the coupling matrix is singular and eta0 = 0") {
        Parameters p = base_params(g);
        const Field t_inf(g, 100.0);
        p.k = p.mu_V / (p.N * 100.0);  // R0(x) = N k T_inf / mu_V = 1
        const auto res = principal_eigenvalue(assemble_linearized(p, t_inf, g));
        REQUIRE(res.converged);
        REQUIRE(std::abs(res.eta0) <= 1e-8);
    }
    SECTION("uncoupled limit T_inf = 0: eta0 = -min(mu_I, mu_V)") {
        Parameters p = base_params(g);
        const auto res = principal_eigenvalue(assemble_linearized(p, Field(g, 0.0), g));
        REQUIRE(res.converged);
        REQUIRE(res.eta0 == Catch::Approx(-std::min(p.mu_I, p.mu_V)).margin(1e-8));
    }
}

TEST_CASE("principal_eigenvalue matches the dense spectrum oracle") {
    std::mt19937_64 rng(777);
    const std::vector<Grid> grids = {
        build_grid(1, {1.0}, {50}, BoundaryKind::Neumann0),
        build_grid(1, {1.0}, {50}, BoundaryKind::Dirichlet0),
        build_grid(2, {1.0, 1.0}, {10, 10}, BoundaryKind::Neumann0),
    };
    for (const auto& g : grids) {
        Parameters p = base_params(g);
        p.k = 5e-4;
        for (int trial = 0; trial < 5; ++trial) {
            Field t_inf(g, 0.0);
            for (auto& v : t_inf.values)
                v = std::uniform_real_distribution<double>(0.0, 900.0)(rng);
            const auto op = assemble_linearized(p, t_inf, g);
            const auto res = principal_eigenvalue(op, 1e-11);
            REQUIRE(res.converged);
            REQUIRE(res.eta0 == Catch::Approx(oracle::max_real_eigenvalue(op)).margin(1e-8));
        }
    }
}

TEST_CASE("spectral result invariants") {
    const Grid g = build_grid(1, {1.0}, {30}, BoundaryKind::Neumann0);
    Parameters p = base_params(g);
    const Field t_inf(g, 100.0);

    SECTION("declared residual is met and the eigenvector is nonnegative, sup-normalized") {
        const auto op = assemble_linearized(p, t_inf, g);
        const auto res = principal_eigenvalue(op, 1e-10);
        REQUIRE(res.converged);
        REQUIRE(res.residual <= 1e-8);
        double sup = 0.0;
        for (double v : res.eigenvector_I) {
            REQUIRE(v >= -1e-10);
            sup = std::max(sup, std::abs(v));
        }
        for (double v : res.eigenvector_V) {
            REQUIRE(v >= -1e-10);
            sup = std::max(sup, std::abs(v));
        }
        REQUIRE(sup == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("shift invariance") {
        const auto op = assemble_linearized(p, t_inf, g);
        double max_diag = 0.0;
        for (int i = 0; i < op.rows(); ++i)
            max_diag = std::max(max_diag, std::abs(op.diagonal_entry(i)));
        const double sigma = max_diag + 1.0;
        const auto a = principal_eigenvalue(op, 1e-11, 50000, sigma);
        const auto b = principal_eigenvalue(op, 1e-11, 50000, 2.0 * sigma);
        REQUIRE(a.eta0 == Catch::Approx(b.eta0).margin(1e-9));
    }
    SECTION("eta0 never decreases along a k sweep") {
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 10; ++i) {
            Parameters q = p;
            q.k = 1e-5 * std::pow(10.0, i / 3.0);
            const auto res =
                principal_eigenvalue(assemble_linearized(q, t_inf, g), 1e-11);
            REQUIRE(res.converged);
            REQUIRE(res.eta0 >= prev - 1e-9);
            prev = res.eta0;
        }
    }
}

TEST_CASE("compute_R0_field") {
    const Grid g = build_grid(1, {1.0}, {8}, BoundaryKind::Neumann0);
    Parameters p = base_params(g);
    SECTION("nodewise formula") {
        p.N = 1000.0;
        p.k = 1e-5;
        p.mu_V = 10.0;
        const Field r0 = compute_R0_field(Field(g, 100.0), p);
        for (double v : r0.values) REQUIRE(v == Catch::Approx(0.1).epsilon(1e-14));
    }
    SECTION("homogeneous neumann case reduces to the classic ratio") {
        const Field t_inf = solve_T_infinity(p, g);
        const Field r0 = compute_R0_field(t_inf, p);
        const double classic = 10.0 * p.k * p.N / (p.mu_T * p.mu_V);
        for (double v : r0.values) REQUIRE(v == Catch::Approx(classic).epsilon(1e-9));
    }
    SECTION("zero steady state gives zero R0") {
        const Field r0 = compute_R0_field(Field(g, 0.0), p);
        for (double v : r0.values) REQUIRE(v == 0.0);
    }
}

TEST_CASE("stability classification decision table") {
    REQUIRE(classify_from_values(-0.3, 0.8, 0.9) ==
            Classification::globally_stable_by_corollary);
    REQUIRE(classify_from_values(1.0, 4.0, 4.0) == Classification::unstable);
    REQUIRE(classify_from_values(-0.1, 1.2, 1.5) == Classification::locally_stable);
    REQUIRE(classify_from_values(-0.2, 0.9, 1.1) == Classification::globally_stable_by_R0);
    REQUIRE(classify_from_values(1e-9, 1.2, 1.5) == Classification::marginal);
}

TEST_CASE("classify_stability end to end") {
    const Grid g = build_grid(1, {1.0}, {32}, BoundaryKind::Neumann0);
    SECTION("canonical parameters are globally stable by the corollary") {
        const Parameters p = base_params(g);  // corollary bound = 0.02
        const auto rep = classify_stability(p, g);
        REQUIRE(rep.classification == Classification::globally_stable_by_corollary);
        REQUIRE(rep.corollary_bound == Catch::Approx(0.02).epsilon(1e-12));
        REQUIRE(rep.eta0 < 0.0);
    }
    SECTION("large k is unstable") {
        Parameters p = base_params(g);
        p.k = 0.04;
        p.N = 1.0;
        p.mu_I = 1.0;
        p.mu_V = 1.0;
        const auto rep = classify_stability(p, g);
        REQUIRE(rep.classification == Classification::unstable);
        REQUIRE(rep.eta0 == Catch::Approx(1.0).margin(1e-6));
        REQUIRE(rep.R0_sup == Catch::Approx(4.0).epsilon(1e-8));
    }
}

TEST_CASE("homogeneous sign law") {
    // Under neumann with constant lambda the discrete constant mode carries
    // the 2x2 matrix exactly, so sign(eta0) = sign(R0 - 1) and eta0 equals
    // the closed-form top eigenvalue.
    const Grid g = build_grid(1, {1.0}, {20}, BoundaryKind::Neumann0);
    for (double scale : {0.05, 0.3, 0.9, 1.5, 4.0}) {
        Parameters p = base_params(g);
        p.k = scale * p.mu_T * p.mu_V / (p.N * 10.0);  // R0 = scale
        const auto rep = classify_stability(p, g, 1e-11);
        const double r0 = rep.R0_sup;
        REQUIRE(r0 == Catch::Approx(scale).epsilon(1e-8));
        if (r0 < 1.0) REQUIRE(rep.eta0 < 0.0);
        if (r0 > 1.0) REQUIRE(rep.eta0 > 0.0);
        const double exact =
            top_eigenvalue_2x2(p.mu_I, p.mu_V, p.k * 100.0, p.N * p.mu_I);
        REQUIRE(rep.eta0 == Catch::Approx(exact).margin(1e-7));
    }
}
