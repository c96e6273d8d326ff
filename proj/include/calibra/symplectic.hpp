#pragma once

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "calibra/eigen_support.hpp"
#include "calibra/errors.hpp"
#include "calibra/forms.hpp"
#include "calibra/random.hpp"

namespace calibra {

// ---------------------------------------------------------------------------
// Standard structures: omega, J, g
// ---------------------------------------------------------------------------

/// J in the (x_1..x_n, y_1..y_n) ordering: J e_i = f_i, J f_i = -e_i, so the
/// block form is [[0, -I], [I, 0]] and omega(x, y) = <Jx, y>.
inline Eigen::MatrixXd standard_J(int n) {
    if (n < 1) throw PreconditionError("standard_J: n must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return j;
}

inline KFormD standard_omega(int n) { return standard_symplectic_form<double>(n); }

/// omega(x, y) = <Jx, y>.
inline double symplectic_pairing(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() % 2 != 0)
        throw PreconditionError("symplectic_pairing: vectors must share an even dimension");
    const int n = static_cast<int>(x.size()) / 2;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x(i) * y(n + i) - x(n + i) * y(i);
    return acc;
}

enum class MapClass { Symplectic, AntiSymplectic, Neither };

inline std::string to_string(MapClass c) {
    switch (c) {
        case MapClass::Symplectic: return "symplectic";
        case MapClass::AntiSymplectic: return "anti-symplectic";
        default: return "neither";
    }
}

inline double symplectic_residual(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows()) / 2;
    const Eigen::MatrixXd j = standard_J(n);
    return (a.transpose() * j * a - j).cwiseAbs().maxCoeff();
}

inline double anti_symplectic_residual(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows()) / 2;
    const Eigen::MatrixXd j = standard_J(n);
    return (a.transpose() * j * a + j).cwiseAbs().maxCoeff();
}

/// Tests A^T J A = J (symplectic) and A^T J A = -J (anti-symplectic) in the
/// max-abs entry norm.
inline MapClass classify_map(const Eigen::MatrixXd& a, double tol = 1e-8) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("classify_map: matrix must be square of even dimension");
    if (symplectic_residual(a) <= tol) return MapClass::Symplectic;
    if (anti_symplectic_residual(a) <= tol) return MapClass::AntiSymplectic;
    return MapClass::Neither;
}

// ---------------------------------------------------------------------------
// Ellipsoids, Williamson decomposition, symplectic spectrum, widths
// ---------------------------------------------------------------------------

/// Closed sublevel set { z : <z - c, M (z - c)> <= 1 } for M symmetric
/// positive-definite.
struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;

    Ellipsoid(Eigen::VectorXd c, Eigen::MatrixXd m)
        : center(std::move(c)), shape(std::move(m)) {
        if (shape.rows() != shape.cols() || shape.rows() % 2 != 0 || shape.rows() < 2)
            throw PreconditionError("Ellipsoid: shape must be square of even dimension");
        if (center.size() != shape.rows())
            throw PreconditionError("Ellipsoid: center/shape dimension mismatch");
        const double asym = (shape - shape.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * (1.0 + shape.cwiseAbs().maxCoeff()))
            throw PreconditionError("Ellipsoid: shape matrix is not symmetric");
        shape = 0.5 * (shape + shape.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(shape);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig <= 0.0)
            throw PreconditionError("Ellipsoid: shape not positive-definite (smallest eigenvalue " +
                                    std::to_string(min_eig) + ")");
    }

    int half_dim() const { return static_cast<int>(shape.rows()) / 2; }

    /// E(r): shape diag(1/r_1^2, ..., 1/r_n^2, 1/r_1^2, ..., 1/r_n^2), centered
    /// at the origin.
    static Ellipsoid normal_form(const Eigen::VectorXd& radii) {
        const int n = static_cast<int>(radii.size());
        if (n < 1) throw PreconditionError("Ellipsoid::normal_form: need at least one radius");
        Eigen::VectorXd diag(2 * n);
        for (int i = 0; i < n; ++i) {
            if (radii(i) <= 0.0)
                throw PreconditionError("Ellipsoid::normal_form: radii must be positive");
            diag(i) = diag(n + i) = 1.0 / (radii(i) * radii(i));
        }
        return Ellipsoid(Eigen::VectorXd::Zero(2 * n), diag.asDiagonal());
    }

    static Ellipsoid ball(int n, double radius) {
        return normal_form(Eigen::VectorXd::Constant(n, radius));
    }

    /// Image S(E) translated by t: shape becomes S^-T M S^-1.
    Ellipsoid mapped(const Eigen::MatrixXd& s, const Eigen::VectorXd& t) const {
        const Eigen::MatrixXd s_inv = s.inverse();
        return Ellipsoid(s * center + t, s_inv.transpose() * shape * s_inv);
    }
};

/// Sorted ascending positive radii (r_1 <= ... <= r_n).
struct SymplecticSpectrum {
    Eigen::VectorXd radii;
};

/// S symplectic with S^T M S = Lambda (+) Lambda, lambda sorted descending.
struct WilliamsonDecomposition {
    Eigen::MatrixXd S;
    Eigen::VectorXd lambda;
};

namespace detail {

/// Extracts K-invariant orthonormal pairs (u, Ku/d) from the skew-symmetric
/// invertible K, ordered by ascending d (so Lambda = 1/d comes out
/// descending, ties keeping eigensolver order). iK is Hermitian with
/// eigenvalues (-d_n, ..., -d_1, d_1, ..., d_n); a unit eigenvector
/// z = (a + ib)/sqrt(2) of eigenvalue d > 0 satisfies Ka = d b, Kb = -d a
/// with |a| = |b| = 1/sqrt(2) and a orthogonal to b, so the real and
/// imaginary parts assemble the normal-form pair directly. No squaring of K
/// is involved, and eigenvalue clusters need no special handling.
inline void skew_normal_form_pairs(const Eigen::MatrixXd& k_skew, Eigen::MatrixXd& u_cols,
                                   Eigen::MatrixXd& w_cols, Eigen::VectorXd& d_vals) {
    const int dim = static_cast<int>(k_skew.rows());
    const int n = dim / 2;
    const Eigen::MatrixXcd hermitian =
        std::complex<double>(0.0, 1.0) * k_skew.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
    if (es.info() != Eigen::Success)
        throw PreconditionError("williamson: eigensolver failed on iK");
    u_cols.resize(dim, n);
    w_cols.resize(dim, n);
    d_vals.resize(n);
    for (int i = 0; i < n; ++i) {
        const double d = es.eigenvalues()(n + i); // positive half, ascending
        if (!(d > 0.0)) throw PreconditionError("williamson: K is numerically singular");
        // |Re z| = 1/sqrt(2) for every eigenvector phase.
        Eigen::VectorXd u = es.eigenvectors().col(n + i).real();
        u.normalize();
        u_cols.col(i) = u;
        w_cols.col(i) = (k_skew * u) / d;
        d_vals(i) = d;
    }
}

} // namespace detail

/// Williamson decomposition of a symmetric positive-definite 2n x 2n matrix:
/// S = M^-1/2 U Dtilde^-1/2 assembled from the skew normal form of
/// K = M^-1/2 J M^-1/2. Matrices with condition number beyond 1e12 are
/// refused rather than decomposed untrustworthily.
inline WilliamsonDecomposition williamson(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() < 2)
        throw PreconditionError("williamson: matrix must be square of even dimension");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale))
        throw PreconditionError("williamson: matrix is not symmetric");
    const int n = static_cast<int>(m.rows()) / 2;
    const Eigen::MatrixXd m_sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_sym);
    const double min_eig = es.eigenvalues().minCoeff();
    const double max_eig = es.eigenvalues().maxCoeff();
    if (min_eig <= 0.0)
        throw PreconditionError("williamson: matrix not positive-definite (smallest eigenvalue " +
                                std::to_string(min_eig) + ")");
    if (max_eig / min_eig > 1e12)
        throw PreconditionError("williamson: condition number " +
                                std::to_string(max_eig / min_eig) +
                                " exceeds 1e12; refusing to decompose");
    const Eigen::MatrixXd m_inv_half =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        es.eigenvectors().transpose();

    Eigen::MatrixXd k = m_inv_half * standard_J(n) * m_inv_half;
    k = 0.5 * (k - k.transpose());

    Eigen::MatrixXd u_cols, w_cols;
    Eigen::VectorXd d_vals;
    detail::skew_normal_form_pairs(k, u_cols, w_cols, d_vals);

    Eigen::MatrixXd basis(2 * n, 2 * n);
    basis.leftCols(n) = u_cols;
    basis.rightCols(n) = w_cols;
    Eigen::VectorXd d_inv_sqrt = d_vals.cwiseSqrt().cwiseInverse();
    Eigen::VectorXd column_scale(2 * n);
    column_scale << d_inv_sqrt, d_inv_sqrt;

    WilliamsonDecomposition out;
    out.S = m_inv_half * basis * column_scale.asDiagonal();
    out.lambda = d_vals.cwiseInverse(); // d ascending => lambda descending
    return out;
}

/// Residuals (||S^T J S - J||_inf, ||S^T M S - Lambda (+) Lambda||_inf).
inline std::pair<double, double> williamson_residuals(const Eigen::MatrixXd& m,
                                                      const WilliamsonDecomposition& w) {
    const int n = static_cast<int>(m.rows()) / 2;
    Eigen::VectorXd lam2(2 * n);
    lam2 << w.lambda, w.lambda;
    const double res_j = symplectic_residual(w.S);
    const double res_m =
        (w.S.transpose() * m * w.S - Eigen::MatrixXd(lam2.asDiagonal())).cwiseAbs().maxCoeff();
    return {res_j, res_m};
}

/// Symplectic spectrum r_j = 1 / sqrt(Lambda_jj), sorted ascending. Makes
/// S^-1 E = E(r) literally true for the sublevel-set convention; the center
/// is ignored (the spectrum is translation-invariant by definition here).
inline SymplecticSpectrum symplectic_spectrum(const Ellipsoid& e) {
    const WilliamsonDecomposition w = williamson(e.shape);
    Eigen::VectorXd radii = w.lambda.cwiseSqrt().cwiseInverse();
    std::sort(radii.data(), radii.data() + radii.size());
    return SymplecticSpectrum{radii};
}

/// w_L(E) = pi r_1^2.
inline double linear_symplectic_width(const Ellipsoid& e) {
    const SymplecticSpectrum spec = symplectic_spectrum(e);
    const double r1 = spec.radii(0);
    return M_PI * r1 * r1;
}

/// Volume of the unit ball in R^2k, pi^k / k!.
inline double unit_ball_volume_even(int two_k) {
    if (two_k < 2 || two_k % 2 != 0)
        throw PreconditionError("unit_ball_volume_even: dimension must be even and positive");
    const int k = two_k / 2;
    double vol = 1.0;
    for (int i = 1; i <= k; ++i) vol *= M_PI / static_cast<double>(i);
    return vol;
}

/// w_k(E) = omega_2k / pi^k * [w_L(E)]^k.
inline double k_width_ellipsoid(const Ellipsoid& e, int k) {
    if (k < 1 || k > e.half_dim())
        throw PreconditionError("k_width_ellipsoid: k out of range [1, n]");
    const double w = linear_symplectic_width(e);
    return unit_ball_volume_even(2 * k) / std::pow(M_PI, k) * std::pow(w, k);
}

// ---------------------------------------------------------------------------
// Generators and basis extension
// ---------------------------------------------------------------------------

/// exp(J Sym) for a seeded random symmetric matrix with entries in
/// [-spread, spread]. spread = 0 gives the identity.
inline Eigen::MatrixXd random_symplectic(int n, std::uint64_t seed, double spread = 1.0) {
    if (spread < 0.0) throw PreconditionError("random_symplectic: spread must be >= 0");
    CounterRng rng(seed, /*stream=*/0xa11ce);
    Eigen::MatrixXd sym(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) sym(i, j) = sym(j, i) = rng.uniform(-spread, spread);
    return (standard_J(n) * sym).exp();
}

/// Extends an omega-dual pair (omega(u, v) = 1) to a symplectic matrix Phi
/// with Phi e_1 = u and Phi f_1 = v, by symplectic Gram-Schmidt on the
/// omega-orthogonal complement.
inline Eigen::MatrixXd extend_to_symplectic_basis(const Eigen::VectorXd& u,
                                                  const Eigen::VectorXd& v, double tol = 1e-8) {
    const int dim = static_cast<int>(u.size());
    if (v.size() != dim || dim % 2 != 0)
        throw PreconditionError("extend_to_symplectic_basis: bad vector dimensions");
    const int n = dim / 2;
    const double pairing = symplectic_pairing(u, v);
    if (std::abs(pairing - 1.0) > tol)
        throw PreconditionError("extend_to_symplectic_basis: omega(u, v) = " +
                                std::to_string(pairing) + ", expected 1");

    std::vector<Eigen::VectorXd> us = {u}, vs = {v};
    // Candidate pool: standard basis, omega-projected against accepted pairs.
    std::vector<Eigen::VectorXd> pool;
    for (int i = 0; i < dim; ++i) pool.push_back(Eigen::VectorXd::Unit(dim, i));
    auto project = [&](Eigen::VectorXd z, std::size_t first_pair) {
        for (std::size_t p = first_pair; p < us.size(); ++p)
            z += symplectic_pairing(vs[p], z) * us[p] - symplectic_pairing(us[p], z) * vs[p];
        return z;
    };
    for (auto& z : pool) z = project(z, 0);

    while (static_cast<int>(us.size()) < n) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i)
            if (pool[i].norm() > pool[best].norm()) best = i;
        if (pool[best].norm() < 1e-10)
            throw TripwireError("extend_to_symplectic_basis: complement basis collapsed");
        Eigen::VectorXd next_u = pool[best] / pool[best].norm();
        std::size_t partner = 0;
        double best_pair = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const double p = std::abs(symplectic_pairing(next_u, pool[i]));
            if (p > best_pair) {
                best_pair = p;
                partner = i;
            }
        }
        if (best_pair < 1e-10)
            throw TripwireError("extend_to_symplectic_basis: omega degenerate on complement");
        Eigen::VectorXd next_v = pool[partner] / symplectic_pairing(next_u, pool[partner]);
        us.push_back(next_u);
        vs.push_back(next_v);
        for (auto& z : pool) z = project(z, us.size() - 1);
    }

    Eigen::MatrixXd phi(dim, dim);
    for (int i = 0; i < n; ++i) {
        phi.col(i) = us[static_cast<std::size_t>(i)];
        phi.col(n + i) = vs[static_cast<std::size_t>(i)];
    }
    if (symplectic_residual(phi) > 1e-6 * (1.0 + phi.cwiseAbs().maxCoeff()))
        throw TripwireError("extend_to_symplectic_basis: completion failed the symplectic check");
    return phi;
}

} // namespace calibra
