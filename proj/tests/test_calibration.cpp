#include <catch2/catch.hpp>

#include "calibra/calibration.hpp"
#include "calibra/slag.hpp"

using namespace calibra;

namespace {

/// Sampled-and-polished maximum of |proj_L(A x + b)| over the sphere |x| = r;
/// an independent check of the closed-form radius.
double sampled_max_projection(const Eigen::MatrixXd& l, const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b, double r, CounterRng& rng,
                              int samples = 2000) {
    const Eigen::MatrixXd m = l.transpose() * a;
    const Eigen::VectorXd c = l.transpose() * b;
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(a.cols());
        for (int i = 0; i < x.size(); ++i) x(i) = rng.gaussian();
        x *= r / x.norm();
        // Power-type polish: ascend |m x + c|^2 on the sphere.
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd grad = m.transpose() * (m * x + c);
            if (grad.norm() < 1e-14) break;
            x = r * grad / grad.norm();
        }
        best = std::max(best, (m * x + c).norm());
    }
    return best;
}

} // namespace

TEST_CASE("catalog entries") {
    SECTION("normalized omega powers") {
        const auto form = omega_power_normalized(2, 1);
        REQUIRE(form == standard_omega(2));
        const auto half_sq = omega_power_normalized(3, 2);
        REQUIRE(inf_norm(half_sq) == Approx(1.0)); // omega^2/2 has unit coefficients
    }

    SECTION("wedge_simple evaluates to one on the leading frame") {
        const auto form = wedge_simple(6, 3);
        Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(6, 3);
        REQUIRE(evaluate(form, frame) == 1.0);
    }

    SECTION("slag_re(0) on R^4") {
        const auto form = slag_re(2, 0.0);
        REQUIRE(form.coefficient(MultiIndex{1, 2}) == 1.0);
        REQUIRE(form.coefficient(MultiIndex{3, 4}) == -1.0);
        REQUIRE(form.coefficients().size() == 2);
    }

    SECTION("g2 forms satisfy the metric contraction identity") {
        const auto phi = g2_phi();
        CounterRng rng(51);
        for (int trial = 0; trial < 10; ++trial) {
            Vec<double> u(7);
            double norm_sq = 0.0;
            for (auto& x : u) {
                x = rng.gaussian();
                norm_sq += x * x;
            }
            const auto iu_phi = contract(u, phi);
            const auto id = wedge(wedge(iu_phi, iu_phi), phi);
            REQUIRE(id.coefficient(MultiIndex{1, 2, 3, 4, 5, 6, 7}) ==
                    Approx(6.0 * norm_sq).epsilon(1e-12));
        }
    }

    SECTION("g2_psi is the Hodge dual with the frozen expansion") {
        const auto psi = g2_psi();
        REQUIRE(psi.coefficient(MultiIndex{4, 5, 6, 7}) == 1.0);
        REQUIRE(psi.coefficient(MultiIndex{2, 3, 6, 7}) == 1.0);
        REQUIRE(psi.coefficient(MultiIndex{2, 3, 4, 5}) == 1.0);
        REQUIRE(psi.coefficient(MultiIndex{1, 3, 5, 7}) == 1.0);
        REQUIRE(psi.coefficient(MultiIndex{1, 3, 4, 6}) == -1.0);
        REQUIRE(psi.coefficient(MultiIndex{1, 2, 5, 6}) == -1.0);
        REQUIRE(psi.coefficient(MultiIndex{1, 2, 4, 7}) == -1.0);
        REQUIRE(psi.coefficients().size() == 7);
    }

    SECTION("spin7 form is self-dual with 14 terms") {
        const auto phi = spin7_phi();
        REQUIRE(phi.coefficients().size() == 14);
        REQUIRE(hodge_star(phi) == phi);
        Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(8, 4);
        REQUIRE(evaluate(phi, frame) == 1.0);
    }

    SECTION("catalog lookup and errors") {
        REQUIRE(std::holds_alternative<KFormD>(catalog("g2_phi", 7)));
        REQUIRE(std::holds_alternative<ComplexKFormD>(catalog("slag_complex", 6)));
        REQUIRE_THROWS_AS(catalog("g2_phi", 8), PreconditionError);
        REQUIRE_THROWS_AS(catalog("nonsense", 4), PreconditionError);
    }
}

TEST_CASE("comass estimates reach the calibration bound") {
    struct Case {
        KFormD form;
        const char* name;
    };
    const Case cases[] = {
        {standard_omega(2), "omega on R^4"},
        {omega_power_normalized(3, 2), "omega^2/2 on R^6"},
        {slag_re(3, 0.0), "Re(Omega) on R^6"},
        {wedge_simple(5, 2), "e^1 ^ e^2 on R^5"},
        {g2_phi(), "g2 phi"},
    };
    for (const auto& c : cases) {
        INFO(c.name);
        const auto report = comass_estimate(c.form, 24, 7);
        REQUIRE(report.value >= 1.0 - 1e-6);
        REQUIRE(report.max_sampled <= 1.0 + 1e-6);
        REQUIRE(is_orthonormal(report.frame, 1e-10));
        // The reported value re-evaluates exactly from the reported frame.
        REQUIRE(report.value == std::abs(evaluate(c.form, report.frame)));
    }
    REQUIRE_THROWS_AS(comass_estimate(KFormD(4, 0), 4, 1), PreconditionError);
}

TEST_CASE("comass determinism across thread counts") {
    const auto form = slag_re(2, 0.3);
    const auto a = comass_estimate(form, 8, 21);
    const auto b = comass_estimate(form, 8, 21);
    REQUIRE(a.value == b.value);
    REQUIRE(a.restart_values == b.restart_values);
}

TEST_CASE("calibrated subspace predicate") {
    const auto omega = standard_omega(2);
    REQUIRE(is_calibrated_subspace(omega, Frame(symplectic_cylinder_basis(2, 1))));

    const auto re_omega = slag_re(3, 0.0);
    REQUIRE(is_calibrated_subspace(re_omega, Frame(lagrangian_basis(3))));

    // The omega-plane (e_1, f_1) is not Re(Omega)-calibrated for n = 2.
    const auto re2 = slag_re(2, 0.0);
    REQUIRE_FALSE(is_calibrated_subspace(re2, Frame(symplectic_cylinder_basis(2, 1))));
    REQUIRE(evaluate(re2, symplectic_cylinder_basis(2, 1)) == 0.0);

    Eigen::MatrixXd skewed(4, 2);
    skewed << 1, 1, 0, 1, 0, 0, 0, 0;
    REQUIRE_THROWS_AS(is_calibrated_subspace(re2, Frame(skewed)), PreconditionError);
}

TEST_CASE("wirtinger check") {
    const int n = 4;

    SECTION("symplectic frames achieve equality") {
        for (int k = 1; k <= n; ++k) {
            const auto r = wirtinger_check(Frame::orthonormal(symplectic_cylinder_basis(n, k)));
            REQUIRE(r.value == Approx(1.0).margin(1e-12));
            REQUIRE(r.is_equality);
            REQUIRE(r.is_J_invariant);
        }
        Eigen::MatrixXd skewed(8, 2);
        skewed.setZero();
        skewed(0, 0) = 1.0;
        skewed(0, 1) = skewed(1, 1) = std::sqrt(0.5) + 1e-3;
        REQUIRE_THROWS_AS(Frame::orthonormal(skewed), PreconditionError);
    }

    SECTION("Lagrangian-type spans vanish") {
        Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(8, 4); // e_1..e_4
        const auto r = wirtinger_check(Frame(frame));
        REQUIRE(r.value == Approx(0.0).margin(1e-12));
        REQUIRE_FALSE(r.is_equality);
        REQUIRE_FALSE(r.is_J_invariant);
    }

    SECTION("unitary images of complex planes stay extremal") {
        CounterRng rng(52);
        for (int trial = 0; trial < 10; ++trial) {
            const Eigen::MatrixXd u = random_unitary_embedded(4, rng);
            const Eigen::MatrixXd frame = u * symplectic_cylinder_basis(4, 2);
            const auto r = wirtinger_check(Frame(frame));
            REQUIRE(r.value == Approx(1.0).margin(1e-9));
            REQUIRE(r.is_equality);
            REQUIRE(r.is_J_invariant);
        }
    }

    SECTION("bound and flag agreement on random frames") {
        CounterRng rng(53);
        for (int trial = 0; trial < 400; ++trial) {
            const int nn = 2 + trial % 3;
            const int k = 1 + trial % nn;
            const Frame f = Frame::random_orthonormal(2 * nn, 2 * k, rng);
            const auto r = wirtinger_check(f);
            REQUIRE(r.value <= 1.0 + 1e-12);
            REQUIRE(r.is_equality == r.is_J_invariant);
        }
    }
}

TEST_CASE("bounded Gram-Schmidt") {
    SECTION("orthogonal input is unchanged") {
        std::vector<Vec<Rational>> ws = {{1, 0, 0}, {0, 2, 0}};
        REQUIRE(gram_schmidt_bounded(ws) == ws);
    }

    SECTION("textbook step") {
        std::vector<Vec<Rational>> ws = {{1, 0}, {1, 1}};
        const auto vs = gram_schmidt_bounded(ws);
        REQUIRE(vs[0] == Vec<Rational>{1, 0});
        REQUIRE(vs[1] == Vec<Rational>{0, 1});
    }

    SECTION("wedge equality and norm bound on random rational input") {
        CounterRng rng(54);
        for (int trial = 0; trial < 30; ++trial) {
            const int dim = 5, k = 3;
            std::vector<Vec<Rational>> ws;
            for (int i = 0; i < k; ++i) ws.push_back(rng.rational_vector(dim));
            std::vector<Vec<Rational>> vs;
            try {
                vs = gram_schmidt_bounded(ws);
            } catch (const PreconditionError&) {
                continue; // dependent draw
            }
            for (std::size_t j = 0; j < vs.size(); ++j) {
                REQUIRE(dot(vs[j], vs[j]) <= dot(ws[j], ws[j]));
                for (std::size_t i = 0; i < j; ++i) REQUIRE(dot(vs[i], vs[j]) == 0);
            }
            // Plucker coordinates agree: same wedge.
            Mat<Rational> mv(k, dim), mw(k, dim);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < dim; ++j) {
                    mv(i, j) = vs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    mw(i, j) = ws[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
            for (const auto& idx : all_multi_indices(dim, k)) {
                Mat<Rational> sv(k, k), sw(k, k);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) {
                        sv(i, j) = mv(i, idx[j] - 1);
                        sw(i, j) = mw(i, idx[j] - 1);
                    }
                REQUIRE(determinant(sv) == determinant(sw));
            }
        }
    }

    SECTION("dependent input is rejected") {
        std::vector<Vec<Rational>> ws = {{1, 2}, {2, 4}};
        REQUIRE_THROWS_AS(gram_schmidt_bounded(ws), PreconditionError);
    }
}

TEST_CASE("cylinder membership and enclosing radius") {
    const CalibratedCylinder z(symplectic_cylinder_basis(2, 1), 1.0);
    Eigen::VectorXd inside(4), outside(4);
    inside << 0.5, 7.0, 0.5, -3.0; // unconstrained directions are free
    outside << 1.0, 0.0, 0.5, 0.0;
    REQUIRE(cylinder_contains(z, inside));
    REQUIRE_FALSE(cylinder_contains(z, outside));

    SECTION("identity map") {
        REQUIRE(enclosing_radius(symplectic_cylinder_basis(2, 1),
                                 Eigen::MatrixXd::Identity(4, 4), 1.0) == Approx(1.0));
    }

    SECTION("Lagrangian squeeze reaches delta") {
        const double delta = 0.125;
        Eigen::MatrixXd a(2, 2);
        a << delta, 0, 0, 1.0 / delta;
        Eigen::MatrixXd l(2, 1);
        l << 1, 0;
        REQUIRE(enclosing_radius(l, a, 1.0) == Approx(delta));
    }

    SECTION("pure translation adds its projected norm") {
        Eigen::VectorXd b(4);
        b << 0.3, 0.0, 0.4, 0.0;
        const double r = enclosing_radius(symplectic_cylinder_basis(2, 1),
                                          Eigen::MatrixXd::Identity(4, 4), b, 1.0);
        REQUIRE(r == Approx(1.5)); // 1 + |(0.3, 0.4)|
    }

    SECTION("sampled oracle agrees where the closed form is tight") {
        CounterRng rng(55);
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::MatrixXd a(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) a(i, j) = rng.gaussian();
            const Eigen::MatrixXd l = symplectic_cylinder_basis(2, 1);
            const Eigen::VectorXd b = Eigen::VectorXd::Zero(4);
            const double closed = enclosing_radius(l, a, b, 1.0);
            const double sampled = sampled_max_projection(l, a, b, 1.0, rng);
            REQUIRE(sampled <= closed + 1e-9);
            REQUIRE(sampled >= closed - 1e-6);
        }
    }

    SECTION("sampled oracle never exceeds the certified radius") {
        CounterRng rng(56);
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::MatrixXd a(4, 4);
            Eigen::VectorXd b(4);
            for (int i = 0; i < 4; ++i) {
                b(i) = rng.gaussian();
                for (int j = 0; j < 4; ++j) a(i, j) = rng.gaussian();
            }
            const Eigen::MatrixXd l = symplectic_cylinder_basis(2, 1);
            const double closed = enclosing_radius(l, a, b, 1.0);
            const double sampled = sampled_max_projection(l, a, b, 1.0, rng);
            REQUIRE(sampled <= closed + 1e-9);
        }
    }
}
