#include <catch2/catch.hpp>

#include "calibra/forms.hpp"
#include "calibra/random.hpp"

using namespace calibra;

namespace {

KFormQ rational_omega(int n) { return standard_symplectic_form<Rational>(n); }

KFormQ random_rational_form(int dim, int degree, CounterRng& rng, int terms = 4) {
    KFormQ f(dim, degree);
    const auto basis = all_multi_indices(dim, degree);
    for (int t = 0; t < terms; ++t) {
        const auto& idx = basis[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long>(basis.size()) - 1))];
        f.add_coefficient(idx, rng.rational());
    }
    return f;
}

Mat<Rational> random_rational_matrix(int n, CounterRng& rng) {
    Mat<Rational> m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.rational();
    return m;
}

} // namespace

TEST_CASE("multi-index validation and merge") {
    REQUIRE_THROWS_AS(MultiIndex({2, 1}), PreconditionError);
    REQUIRE_THROWS_AS(MultiIndex({1, 1}), PreconditionError);
    REQUIRE_THROWS_AS(MultiIndex({0, 1}), PreconditionError);

    MultiIndex out;
    REQUIRE(merge_multi_indices(MultiIndex{1, 3}, MultiIndex{2, 4}, out) == -1);
    REQUIRE(out == MultiIndex{1, 2, 3, 4});
    REQUIRE(merge_multi_indices(MultiIndex{1, 2}, MultiIndex{2, 3}, out) == 0);
    REQUIRE(merge_multi_indices(MultiIndex{}, MultiIndex{1, 2}, out) == 1);
}

TEST_CASE("wedge basis cases") {
    // e^1 ^ e^2 on R^4
    auto a = basis_form<Rational>(4, MultiIndex{1});
    auto b = basis_form<Rational>(4, MultiIndex{2});
    auto ab = wedge(a, b);
    REQUIRE(ab.coefficient(MultiIndex{1, 2}) == 1);
    REQUIRE(ab.coefficients().size() == 1);

    // antisymmetry: b ^ a = -(a ^ b)
    REQUIRE(wedge(b, a).coefficient(MultiIndex{1, 2}) == -1);

    KFormQ mismatched(6, 1);
    REQUIRE_THROWS_AS(wedge(a, mismatched), PreconditionError);
}

TEST_CASE("wedge of an odd-degree form with itself vanishes") {
    CounterRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_rational_form(6, 3, rng);
        REQUIRE(wedge(a, a).is_zero());
    }
}

TEST_CASE("omega ^ omega on R^4") {
    const auto omega = rational_omega(2);
    const auto omega2 = wedge(omega, omega);
    // 2 e^1 f^1 e^2 f^2 sorts to -2 e^{1,2,3,4} in coordinate order.
    REQUIRE(omega2.coefficients().size() == 1);
    REQUIRE(omega2.coefficient(MultiIndex{1, 2, 3, 4}) == -2);
    std::vector<Vec<Rational>> basis_frame;
    for (int i : {0, 2, 1, 3}) { // e1, f1, e2, f2
        Vec<Rational> v(4, Rational(0));
        v[static_cast<std::size_t>(i)] = 1;
        basis_frame.push_back(v);
    }
    REQUIRE(evaluate(omega2, basis_frame) == 2);
}

TEST_CASE("degree overflow wedges to the zero form") {
    const auto omega = rational_omega(1);
    const auto sq = wedge(omega, omega);
    REQUIRE(sq.degree() == 4);
    REQUIRE(sq.is_zero());
    REQUIRE(power(omega, 2).is_zero());
}

TEST_CASE("contraction basis case and nilpotence") {
    const auto omega = rational_omega(2);
    Vec<Rational> e1(4, Rational(0));
    e1[0] = 1;
    const auto c = contract(e1, omega);
    REQUIRE(c.coefficient(MultiIndex{3}) == 1); // f^1
    REQUIRE(c.coefficients().size() == 1);

    CounterRng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_rational_form(6, 3, rng);
        auto v = rng.rational_vector(6);
        REQUIRE(contract(v, contract(v, a)).is_zero());
    }
    REQUIRE_THROWS_AS(contract(e1, KFormQ(4, 0)), PreconditionError);
}

TEST_CASE("contraction of omega powers: i_v(omega^k) = k (i_v omega) ^ omega^(k-1)") {
    const auto omega = rational_omega(3);
    Vec<Rational> e1(6, Rational(0));
    e1[0] = 1;
    const auto lhs = contract(e1, power(omega, 2));
    const auto rhs = Rational(2) * wedge(contract(e1, omega), omega);
    REQUIRE(lhs == rhs);

    CounterRng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        auto v = rng.rational_vector(6);
        for (int k = 1; k <= 3; ++k) {
            const auto left = contract(v, power(omega, k));
            const auto right = Rational(k) * wedge(contract(v, omega), power(omega, k - 1));
            REQUIRE(left == right);
        }
    }
}

TEST_CASE("contraction is an anti-derivation") {
    CounterRng rng(14);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 5;
        const int p = static_cast<int>(rng.uniform_int(1, 2));
        const int q = static_cast<int>(rng.uniform_int(1, 2));
        auto a = random_rational_form(dim, p, rng);
        auto b = random_rational_form(dim, q, rng);
        auto v = rng.rational_vector(dim);
        const auto lhs = contract(v, wedge(a, b));
        auto rhs = wedge(contract(v, a), b);
        const Rational sign = (p % 2 == 0) ? 1 : -1;
        rhs += sign * wedge(a, contract(v, b));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("pullback basics") {
    const auto omega = rational_omega(1);
    REQUIRE(pullback(Mat<Rational>::identity(2), omega) == omega);

    // (x, y) -> (dx, d^-1 y) preserves omega on R^2.
    Mat<Rational> squeeze(2, 2);
    squeeze(0, 0) = Rational(3);
    squeeze(1, 1) = Rational(1, 3);
    REQUIRE(pullback(squeeze, omega) == omega);

    // Standard J on R^4 preserves omega.
    const auto omega2 = rational_omega(2);
    Mat<Rational> j(4, 4);
    j(2, 0) = j(3, 1) = Rational(1);
    j(0, 2) = j(1, 3) = Rational(-1);
    REQUIRE(pullback(j, omega2) == omega2);
}

TEST_CASE("pullback composes contravariantly and respects wedge") {
    CounterRng rng(15);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = 4;
        auto a = random_rational_form(dim, 1, rng);
        auto b = random_rational_form(dim, 2, rng);
        auto ma = random_rational_matrix(dim, rng);
        auto mb = random_rational_matrix(dim, rng);
        REQUIRE(pullback(ma.multiply(mb), b) == pullback(mb, pullback(ma, b)));
        REQUIRE(pullback(ma, wedge(a, b)) == wedge(pullback(ma, a), pullback(ma, b)));
    }
}

TEST_CASE("pullback agrees with evaluation on mapped vectors") {
    CounterRng rng(16);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 4, degree = 2;
        auto a = random_rational_form(dim, degree, rng);
        auto m = random_rational_matrix(dim, rng);
        std::vector<Vec<Rational>> vs, mapped;
        for (int i = 0; i < degree; ++i) {
            vs.push_back(rng.rational_vector(dim));
            mapped.push_back(m.apply(vs.back()));
        }
        REQUIRE(evaluate(pullback(m, a), vs) == evaluate(a, mapped));
    }
}

TEST_CASE("evaluate on symplectic frames gives k!") {
    for (int n = 1; n <= 4; ++n) {
        const auto omega = rational_omega(n);
        for (int k = 1; k <= n; ++k) {
            std::vector<Vec<Rational>> frame;
            for (int i = 0; i < k; ++i) {
                Vec<Rational> e(2 * static_cast<std::size_t>(n), Rational(0));
                Vec<Rational> f(2 * static_cast<std::size_t>(n), Rational(0));
                e[static_cast<std::size_t>(i)] = 1;
                f[static_cast<std::size_t>(n + i)] = 1;
                frame.push_back(e);
                frame.push_back(f);
            }
            Rational expected = 1;
            for (int i = 2; i <= k; ++i) expected *= i;
            REQUIRE(evaluate(power(omega, k), frame) == expected);
        }
    }
}

TEST_CASE("evaluate is alternating") {
    CounterRng rng(17);
    const auto omega2 = power(rational_omega(3), 2);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec<Rational>> vs;
        for (int i = 0; i < 4; ++i) vs.push_back(rng.rational_vector(6));
        const Rational base = evaluate(omega2, vs);
        std::swap(vs[1], vs[2]);
        REQUIRE(evaluate(omega2, vs) == -base);
        vs[1] = vs[2]; // repeated vector
        REQUIRE(evaluate(omega2, vs) == 0);
    }
}

TEST_CASE("holomorphic volume form evaluates to 1 on the x-frame") {
    for (int n = 2; n <= 4; ++n) {
        const auto omega_c = holomorphic_volume_form<Rational>(n);
        std::vector<Vec<Rational>> frame;
        for (int i = 0; i < n; ++i) {
            Vec<Rational> e(2 * static_cast<std::size_t>(n), Rational(0));
            e[static_cast<std::size_t>(i)] = 1;
            frame.push_back(e);
        }
        const auto [re, im] = evaluate(omega_c, frame);
        REQUIRE(re == 1);
        REQUIRE(im == 0);
    }
}

TEST_CASE("power of a weighted symplectic form expands with k! products") {
    // power(sum lambda_i e^i f^i, k) = k! sum_{i1<...<ik} prod lambda ...
    const int n = 3;
    CounterRng rng(18);
    std::vector<Rational> lambda;
    KFormQ form(2 * n, 2);
    for (int i = 1; i <= n; ++i) {
        lambda.push_back(rng.rational());
        form.set_coefficient(MultiIndex{i, n + i}, lambda.back());
    }
    const auto sq = power(form, 2);
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            std::vector<Vec<Rational>> frame;
            for (int idx : {i, n + i, j, n + j}) {
                Vec<Rational> v(2 * static_cast<std::size_t>(n), Rational(0));
                v[static_cast<std::size_t>(idx - 1)] = 1;
                frame.push_back(v);
            }
            const Rational expected = Rational(2) * lambda[static_cast<std::size_t>(i - 1)] *
                                      lambda[static_cast<std::size_t>(j - 1)];
            REQUIRE(evaluate(sq, frame) == expected);
        }
    }
    REQUIRE(power(form, 1) == form);
}

TEST_CASE("permutation-sum formula for omega^k") {
    const auto omega2 = rational_omega(2);

    SECTION("k = 1 reduces to omega itself") {
        CounterRng rng(19);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Vec<Rational>> us = {rng.rational_vector(4), rng.rational_vector(4)};
            REQUIRE(omega_k_sum_formula(us, omega2) == evaluate(omega2, us));
        }
    }

    SECTION("standard frame, k = 2, n = 2 gives 2") {
        std::vector<Vec<Rational>> frame;
        for (int i : {0, 2, 1, 3}) {
            Vec<Rational> v(4, Rational(0));
            v[static_cast<std::size_t>(i)] = 1;
            frame.push_back(v);
        }
        REQUIRE(omega_k_sum_formula(frame, omega2) == 2);
    }

    SECTION("matches evaluate(power(omega, k)) exactly on random rationals") {
        CounterRng rng(20);
        const auto omega3 = rational_omega(3);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<Vec<Rational>> us;
            for (int i = 0; i < 4; ++i) us.push_back(rng.rational_vector(6));
            REQUIRE(omega_k_sum_formula(us, omega3) == evaluate(power(omega3, 2), us));
        }
    }
}

TEST_CASE("Lefschetz matrices") {
    SECTION("top power acts on scalars by +-n!") {
        for (int n = 1; n <= 3; ++n) {
            const auto m = lefschetz_matrix(rational_omega(n), n);
            REQUIRE(m.rows() == 1);
            REQUIRE(m.cols() == 1);
            Rational fact = 1;
            for (int i = 2; i <= n; ++i) fact *= i;
            REQUIRE(scalar_abs(m(0, 0)) == fact);
        }
    }

    SECTION("n = 2, j = 1 has full rank 4") {
        const auto m = lefschetz_matrix(rational_omega(2), 1);
        REQUIRE(m.rows() == 4);
        REQUIRE(rank(m) == 4);
    }

    SECTION("degenerate two-form loses rank") {
        KFormQ degenerate(4, 2);
        degenerate.set_coefficient(MultiIndex{1, 3}, Rational(1)); // e^1 ^ f^1 only
        REQUIRE(rank(lefschetz_matrix(degenerate, 1)) < 4);
    }

    SECTION("invertibility for every j at desk scale") {
        for (int n = 1; n <= 4; ++n) {
            const auto omega = rational_omega(n);
            for (int j = 1; j <= n; ++j) {
                const auto m = lefschetz_matrix(omega, j);
                REQUIRE(m.rows() == m.cols());
                REQUIRE(rank(m) == m.rows());
            }
        }
        REQUIRE_THROWS_AS(lefschetz_matrix(rational_omega(2), 3), PreconditionError);
    }
}

TEST_CASE("hodge star") {
    const auto e12 = basis_form<Rational>(4, MultiIndex{1, 2});
    REQUIRE(hodge_star(e12).coefficient(MultiIndex{3, 4}) == 1);
    const auto e13 = basis_form<Rational>(4, MultiIndex{1, 3});
    REQUIRE(hodge_star(e13).coefficient(MultiIndex{2, 4}) == -1);

    CounterRng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        // star(star(a)) = (-1)^{k(n-k)} a
        const int dim = 5;
        const int k = static_cast<int>(rng.uniform_int(1, 4));
        auto a = random_rational_form(dim, k, rng);
        const Rational sign = (k * (dim - k)) % 2 == 0 ? 1 : -1;
        REQUIRE(hodge_star(hodge_star(a)) == sign * a);
    }
}

TEST_CASE("complex form algebra") {
    const auto omega_c = holomorphic_volume_form<Rational>(2);
    // Re(Omega) = e^1 e^2 - f^1 f^2 on R^4 (coordinates f^i = e^{n+i}).
    REQUIRE(omega_c.re.coefficient(MultiIndex{1, 2}) == 1);
    REQUIRE(omega_c.re.coefficient(MultiIndex{3, 4}) == -1);
    REQUIRE(omega_c.im.coefficient(MultiIndex{1, 4}) == 1);
    REQUIRE(omega_c.im.coefficient(MultiIndex{2, 3}) == -1);

    const auto top = wedge(omega_c, omega_c.conjugate());
    REQUIRE_FALSE((top.re.is_zero() && top.im.is_zero()));
}
