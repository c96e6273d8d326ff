#include <catch2/catch.hpp>

#include "calibra/squeeze.hpp"

using namespace calibra;

TEST_CASE("group charts produce members") {
    CounterRng rng(71);
    const GroupSpec groups[] = {
        GroupSpec::symplectic(2),
        GroupSpec::power_stabilizer(3, 2),
        GroupSpec::power_stabilizer(2, 2),
        GroupSpec::slnc(2),
        GroupSpec::isometry(5),
    };
    for (const auto& g : groups) {
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::VectorXd p(g.param_dim());
            for (int i = 0; i < p.size(); ++i) p(i) = rng.uniform(-0.8, 0.8);
            for (int comp = 0; comp < g.components(); ++comp)
                REQUIRE(g.membership_residual(g.element(p, comp)) <= 1e-8);
            REQUIRE(g.membership_residual(g.random_element(rng)) <= 1e-8);
        }
        // identity at the chart origin
        REQUIRE(g.element(Eigen::VectorXd::Zero(g.param_dim()))
                    .isApprox(Eigen::MatrixXd::Identity(g.ambient_dim(), g.ambient_dim()),
                              1e-12));
    }
}

TEST_CASE("custom generator groups") {
    // so(2) as a one-generator custom group.
    Eigen::MatrixXd gen(2, 2);
    gen << 0, -1, 1, 0;
    const GroupSpec g = GroupSpec::custom(2, {gen});
    Eigen::VectorXd p(1);
    p << 0.3;
    const Eigen::MatrixXd a = g.element(p);
    REQUIRE(a(0, 0) == Approx(std::cos(0.3)));
    REQUIRE(a(1, 0) == Approx(std::sin(0.3)));

    // Empty generator set: the trivial group; the search degenerates to a
    // single certified evaluation at the identity.
    const GroupSpec trivial = GroupSpec::custom(2, {});
    Eigen::MatrixXd l(2, 1);
    l << 1, 0;
    const auto result = squeeze_search(trivial, l, 1.0, 2, 1, 10);
    REQUIRE(result.best_radius == Approx(1.0));
}

TEST_CASE("squeeze search respects the symplectic floor") {
    const GroupSpec g = GroupSpec::symplectic(2);
    const auto result = squeeze_search(g, symplectic_cylinder_basis(2, 1), 1.0, 8, 5, 300);
    REQUIRE(result.best_radius >= 1.0 - 1e-6);
    REQUIRE(result.best_radius <= 1.0 + 1e-6); // identity restart attains 1
    REQUIRE(result.best_translation.isZero());
    REQUIRE(result.trace.size() == 8);
    REQUIRE(result.iterations > 0);
}

TEST_CASE("squeeze search drives the Lagrangian counterexample down") {
    const GroupSpec g = GroupSpec::symplectic(2);
    const Eigen::MatrixXd l = lagrangian_basis(2);
    double previous = std::numeric_limits<double>::infinity();
    for (int budget : {100, 400, 1200}) {
        const auto result = squeeze_search(g, l, 1.0, 10, 5, budget);
        REQUIRE(result.best_radius <= previous + 1e-12);
        previous = result.best_radius;
    }
    REQUIRE(previous < 0.5);
}

TEST_CASE("isometries never squeeze") {
    const GroupSpec g = GroupSpec::isometry(7);
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(7, 3);
    l(0, 0) = l(2, 1) = l(5, 2) = 1.0;
    const auto result = squeeze_search(g, l, 1.0, 4, 9, 150);
    REQUIRE(result.best_radius == Approx(1.0).margin(1e-9));
}

TEST_CASE("rigidity witness for non-symplectic maps") {
    SECTION("uniform omega scaling") {
        Eigen::VectorXd d(4);
        d << 2, 2, 1, 1; // omega scales by 2 on both pairs
        const auto w = rigidity_witness_symplectic(Eigen::MatrixXd(d.asDiagonal()), 1e-8, 3000);
        REQUIRE(w.has_value());
        REQUIRE(w->lambda < 1.0);
        REQUIRE(w->certificate_radius <= w->lambda + 1e-9);
        REQUIRE(w->used_inverse); // scaling up squeezes only through the inverse
    }

    SECTION("contracting pairs give lambda near one half") {
        Eigen::VectorXd d(4);
        d << 0.5, 1.0, 0.5, 1.0; // omega scales by 1/4 on the first pair
        const auto w = rigidity_witness_symplectic(Eigen::MatrixXd(d.asDiagonal()), 1e-8, 8000);
        REQUIRE(w.has_value());
        REQUIRE(w->certificate_radius <= w->lambda + 1e-9);
        REQUIRE(w->lambda <= 0.52);
    }

    SECTION("plus-minus symplectic inputs yield no witness") {
        CounterRng rng(72);
        const Eigen::MatrixXd s = random_symplectic(2, rng.next_u64(), 0.6);
        REQUIRE_FALSE(rigidity_witness_symplectic(s, 1e-8, 500).has_value());
        const Eigen::MatrixXd anti = anti_symplectic_reflection(2) * s;
        REQUIRE_FALSE(rigidity_witness_symplectic(anti, 1e-8, 500).has_value());
    }

    SECTION("singular input is rejected") {
        REQUIRE_THROWS_AS(rigidity_witness_symplectic(Eigen::MatrixXd::Zero(4, 4)),
                          PreconditionError);
    }
}

TEST_CASE("non-squeezing sweeps hold their floor") {
    struct Config {
        GroupSpec group;
        Eigen::MatrixXd basis;
    };
    const Config configs[] = {
        {GroupSpec::symplectic(3), symplectic_cylinder_basis(3, 1)},
        {GroupSpec::power_stabilizer(3, 2), symplectic_cylinder_basis(3, 2)},
        {GroupSpec::slnc(3), lagrangian_basis(3)},
    };
    for (const auto& cfg : configs) {
        const auto report = nonsqueezing_sweep(cfg.group, cfg.basis, 1.0, 10000, 13);
        REQUIRE(report.violations == 0);
        REQUIRE(report.min_radius >= 1.0 - 1e-9);
    }
}

TEST_CASE("sweeps are deterministic") {
    const GroupSpec g = GroupSpec::symplectic(2);
    const auto a = nonsqueezing_sweep(g, symplectic_cylinder_basis(2, 1), 1.0, 200, 3);
    const auto b = nonsqueezing_sweep(g, symplectic_cylinder_basis(2, 1), 1.0, 200, 3);
    REQUIRE(a.min_radius == b.min_radius);
}

TEST_CASE("barron constants") {
    REQUIRE(barron_constant(1) == 1.0);
    REQUIRE(barron_constant(2) == Approx(std::pow(24.0, 0.25) / std::sqrt(2.0)).margin(1e-12));
    for (int k = 2; k <= 6; ++k) REQUIRE(barron_constant(k) > 1.0);
    REQUIRE_THROWS_AS(barron_constant(0), PreconditionError);
}
