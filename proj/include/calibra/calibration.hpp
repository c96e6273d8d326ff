#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "calibra/parallel.hpp"
#include "calibra/symplectic.hpp"

namespace calibra {

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

inline double gram_residual(const Eigen::MatrixXd& columns) {
    const Eigen::MatrixXd gram = columns.transpose() * columns;
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

inline bool is_orthonormal(const Eigen::MatrixXd& columns, double tol = 1e-10) {
    return gram_residual(columns) <= tol;
}

/// k vectors in R^n, stored as columns.
struct Frame {
    Eigen::MatrixXd vectors;

    explicit Frame(Eigen::MatrixXd cols) : vectors(std::move(cols)) {}

    int ambient_dim() const { return static_cast<int>(vectors.rows()); }
    int count() const { return static_cast<int>(vectors.cols()); }

    static Frame orthonormal(Eigen::MatrixXd cols, double tol = 1e-10) {
        if (!is_orthonormal(cols, tol))
            throw PreconditionError("Frame: columns are not orthonormal (Gram residual " +
                                    std::to_string(gram_residual(cols)) + ")");
        return Frame(std::move(cols));
    }

    /// QR-orthonormalized Gaussian frame.
    static Frame random_orthonormal(int n, int k, CounterRng& rng) {
        Eigen::MatrixXd g(n, k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) g(i, j) = rng.gaussian();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
        return Frame(std::move(q));
    }
};

// ---------------------------------------------------------------------------
// Calibration catalog
// ---------------------------------------------------------------------------

/// omega^k / k! on R^2n, the Kaehler calibrations.
inline KFormD omega_power_normalized(int n, int k) {
    if (k < 1 || k > n) throw PreconditionError("omega_power_normalized: k out of range [1, n]");
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    return (1.0 / kfact) * power(standard_omega(n), k);
}

/// e^1 ^ ... ^ e^k on R^n; its only calibrated subspace is span(e_1, ..., e_k).
inline KFormD wedge_simple(int dim, int k) {
    if (k < 1 || k > dim) throw PreconditionError("wedge_simple: k out of range [1, dim]");
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
    return basis_form<double>(dim, MultiIndex(idx));
}

/// Associative 3-form on R^7. The coordinate convention (fixed once, here):
/// phi = e^123 + e^145 + e^167 + e^246 - e^257 - e^347 - e^356 with
/// orientation e^1 ^ ... ^ e^7.
inline KFormD g2_phi() {
    KFormD phi(7, 3);
    phi.set_coefficient(MultiIndex{1, 2, 3}, 1.0);
    phi.set_coefficient(MultiIndex{1, 4, 5}, 1.0);
    phi.set_coefficient(MultiIndex{1, 6, 7}, 1.0);
    phi.set_coefficient(MultiIndex{2, 4, 6}, 1.0);
    phi.set_coefficient(MultiIndex{2, 5, 7}, -1.0);
    phi.set_coefficient(MultiIndex{3, 4, 7}, -1.0);
    phi.set_coefficient(MultiIndex{3, 5, 6}, -1.0);
    return phi;
}

/// Coassociative 4-form, the Hodge dual of phi.
inline KFormD g2_psi() { return hodge_star(g2_phi()); }

/// Cayley 4-form on R^8 = R e_1 (+) R^7: Phi = e^1 ^ phi + star_7(phi) with
/// the R^7 factor on coordinates 2..8. Self-dual.
inline KFormD spin7_phi() {
    auto shift = [](const KFormD& f) {
        KFormD out(8, f.degree());
        for (const auto& [idx, c] : f.coefficients()) {
            std::vector<int> shifted;
            for (int i = 0; i < idx.size(); ++i) shifted.push_back(idx[i] + 1);
            out.set_coefficient(MultiIndex(shifted), c);
        }
        return out;
    };
    return wedge(wedge_simple(8, 1), shift(g2_phi())) + shift(g2_psi());
}

/// Re(e^{i theta} Omega) on R^2n, the special Lagrangian calibration of
/// phase e^{-i theta}.
inline KFormD slag_re(int n, double theta) {
    const ComplexKFormD omega = holomorphic_volume_form<double>(n);
    return std::cos(theta) * omega.re - std::sin(theta) * omega.im;
}

using CatalogForm = std::variant<KFormD, ComplexKFormD>;

/// Named catalog used by the CLI. Real entries: omega_power:k (dim 2n),
/// wedge_simple:k (dim n), g2_phi, g2_psi, spin7_phi, slag_re:theta (dim 2n).
/// Complex entry: slag_complex (dim 2n).
inline CatalogForm catalog(const std::string& name, int dim, int k = 0, double theta = 0.0) {
    auto require_even = [&] {
        if (dim % 2 != 0) throw PreconditionError("catalog: " + name + " needs an even dimension");
        return dim / 2;
    };
    if (name == "omega_power") return omega_power_normalized(require_even(), k);
    if (name == "wedge_simple") return wedge_simple(dim, k);
    if (name == "slag_re") return slag_re(require_even(), theta);
    if (name == "slag_complex") return holomorphic_volume_form<double>(require_even());
    if (name == "g2_phi" || name == "g2_psi") {
        if (dim != 7) throw PreconditionError("catalog: " + name + " requires dimension 7");
        return name == "g2_phi" ? g2_phi() : g2_psi();
    }
    if (name == "spin7_phi") {
        if (dim != 8) throw PreconditionError("catalog: spin7_phi requires dimension 8");
        return spin7_phi();
    }
    throw PreconditionError("catalog: unknown form name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Comass estimation
// ---------------------------------------------------------------------------

/// Best |alpha(frame)| found by multi-restart projected-gradient ascent over
/// orthonormal k-frames. The value is a certified lower bound on the true
/// comass (re-evaluated from the reported frame), never claimed as exact.
struct ComassReport {
    double value = 0.0;
    Eigen::MatrixXd frame;
    int restarts = 0;
    double converged_fraction = 0.0;
    /// Largest |alpha| seen on any orthonormal frame during the search,
    /// including intermediate iterates; for a calibration this must not
    /// exceed one.
    double max_sampled = 0.0;
    std::vector<double> restart_values;
};

namespace detail {

/// alpha(V) and its Euclidean gradient d alpha / dV via cofactor expansion of
/// the per-term minors.
inline double evaluate_with_gradient(const KFormD& alpha, const Eigen::MatrixXd& v,
                                     Eigen::MatrixXd& grad) {
    const int k = alpha.degree();
    grad.setZero(v.rows(), v.cols());
    double value = 0.0;
    Eigen::MatrixXd minor(k, k), sub(k - 1, k - 1);
    for (const auto& [idx, c] : alpha.coefficients()) {
        for (int r = 0; r < k; ++r)
            for (int col = 0; col < k; ++col) minor(r, col) = v(idx[r] - 1, col);
        value += c * minor.determinant();
        for (int r = 0; r < k; ++r) {
            for (int col = 0; col < k; ++col) {
                int si = 0;
                for (int i = 0; i < k; ++i) {
                    if (i == r) continue;
                    int sj = 0;
                    for (int j = 0; j < k; ++j) {
                        if (j == col) continue;
                        sub(si, sj) = minor(i, j);
                        ++sj;
                    }
                    ++si;
                }
                const double cof = (((r + col) % 2 == 0) ? 1.0 : -1.0) *
                                   (k == 1 ? 1.0 : sub.determinant());
                grad(idx[r] - 1, col) += c * cof;
            }
        }
    }
    return value;
}

/// Tangent-space projection on the Stiefel manifold of orthonormal frames.
inline Eigen::MatrixXd stiefel_project(const Eigen::MatrixXd& v, const Eigen::MatrixXd& g) {
    const Eigen::MatrixXd vtg = v.transpose() * g;
    return g - v * (0.5 * (vtg + vtg.transpose()));
}

/// Retraction by re-orthonormalization (thin QR with positive diagonal).
inline Eigen::MatrixXd stiefel_retract(const Eigen::MatrixXd& v) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
    const Eigen::MatrixXd r = q.transpose() * v;
    for (int j = 0; j < q.cols(); ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

struct AscentOutcome {
    double value = 0.0;
    Eigen::MatrixXd frame;
    bool converged = false;
    double max_sampled = 0.0;
};

/// Single restart: ascend alpha(V)^2 with backtracking line search, stopping
/// on step-relative gain < 1e-12 or max_iters.
inline AscentOutcome ascend_comass(const KFormD& alpha, Eigen::MatrixXd v, int max_iters) {
    AscentOutcome out;
    Eigen::MatrixXd grad;
    double value = evaluate_with_gradient(alpha, v, grad);
    double f = value * value;
    out.max_sampled = std::abs(value);
    double step = 0.5;
    for (int iter = 0; iter < max_iters; ++iter) {
        const Eigen::MatrixXd direction = stiefel_project(v, 2.0 * value * grad);
        const double dnorm = direction.norm();
        if (dnorm < 1e-15) {
            out.converged = true;
            break;
        }
        bool accepted = false;
        double trial_step = step;
        for (int halving = 0; halving < 45; ++halving) {
            const Eigen::MatrixXd cand = stiefel_retract(v + (trial_step / dnorm) * direction);
            Eigen::MatrixXd cand_grad;
            const double cand_value = evaluate_with_gradient(alpha, cand, cand_grad);
            out.max_sampled = std::max(out.max_sampled, std::abs(cand_value));
            if (cand_value * cand_value > f) {
                v = cand;
                value = cand_value;
                grad = cand_grad;
                const double gain = cand_value * cand_value - f;
                f = cand_value * cand_value;
                accepted = true;
                step = std::min(trial_step * 2.0, 1.0);
                if (gain < 1e-12 * (1.0 + f)) {
                    out.converged = true;
                    iter = max_iters;
                }
                break;
            }
            trial_step *= 0.5;
        }
        if (!accepted) {
            out.converged = true;
            break;
        }
    }
    out.value = std::abs(value);
    out.frame = v;
    return out;
}

} // namespace detail

/// Multi-restart comass lower bound for a real k-form. Restart i draws its
/// frame from seed ^ i; results merge by max with lowest-restart tie-break,
/// so the report is deterministic under any thread count.
inline ComassReport comass_estimate(const KFormD& alpha, int restarts, std::uint64_t seed,
                                    int max_iters = 400) {
    if (restarts < 1) throw PreconditionError("comass_estimate: restarts must be >= 1");
    const int k = alpha.degree();
    if (k < 1 || k > alpha.dim())
        throw PreconditionError("comass_estimate: degree must lie in [1, dim]");
    std::vector<detail::AscentOutcome> outcomes(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t i) {
        CounterRng rng(CounterRng::derive_seed(seed, i), /*stream=*/0xc0a55);
        const Frame start = Frame::random_orthonormal(alpha.dim(), k, rng);
        outcomes[i] = detail::ascend_comass(alpha, start.vectors, max_iters);
    });
    ComassReport report;
    report.restarts = restarts;
    int best = 0, converged = 0;
    for (int i = 0; i < restarts; ++i) {
        const auto& o = outcomes[static_cast<std::size_t>(i)];
        report.restart_values.push_back(o.value);
        report.max_sampled = std::max(report.max_sampled, o.max_sampled);
        if (o.converged) ++converged;
        if (o.value > outcomes[static_cast<std::size_t>(best)].value) best = i;
    }
    report.converged_fraction = static_cast<double>(converged) / restarts;
    report.frame = outcomes[static_cast<std::size_t>(best)].frame;
    // Certify the reported value by independent re-evaluation of the frame.
    report.value = std::abs(evaluate(alpha, report.frame));
    return report;
}

/// alpha restricts to the volume form of the span: alpha(frame) >= 1 - tol
/// on the oriented orthonormal basis given by the frame order.
inline bool is_calibrated_subspace(const KFormD& alpha, const Frame& frame, double tol = 1e-8) {
    if (!is_orthonormal(frame.vectors))
        throw PreconditionError("is_calibrated_subspace: frame is not orthonormal");
    if (frame.count() != alpha.degree())
        throw PreconditionError("is_calibrated_subspace: frame size must equal form degree");
    return evaluate(alpha, frame.vectors) >= 1.0 - tol;
}

// ---------------------------------------------------------------------------
// Wirtinger check
// ---------------------------------------------------------------------------

struct WirtingerResult {
    double value = 0.0;
    bool is_equality = false;
    bool is_J_invariant = false;
    double j_residual = 0.0;
};

/// |omega^k(frame)| / k! for an orthonormal 2k-frame in R^2n, with the
/// equality <=> J-invariance dichotomy. J-invariance is measured by
/// ||(I - P) J P||_inf for P the orthogonal projector onto the span.
inline WirtingerResult wirtinger_check(const Frame& frame, const KFormD& omega_k, double tol = 1e-6) {
    if (!is_orthonormal(frame.vectors))
        throw PreconditionError("wirtinger_check: frame is not orthonormal");
    const int two_k = frame.count();
    if (two_k % 2 != 0 || two_k < 2)
        throw PreconditionError("wirtinger_check: frame must have an even number of vectors");
    const int k = two_k / 2;
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    WirtingerResult r;
    r.value = std::abs(evaluate(omega_k, frame.vectors)) / kfact;
    const int n = frame.ambient_dim() / 2;
    const Eigen::MatrixXd p = frame.vectors * frame.vectors.transpose();
    const Eigen::MatrixXd jp = standard_J(n) * p;
    r.j_residual = (jp - p * jp).cwiseAbs().maxCoeff();
    r.is_J_invariant = r.j_residual <= tol;
    r.is_equality = r.value >= 1.0 - tol;
    return r;
}

inline WirtingerResult wirtinger_check(const Frame& frame, double tol = 1e-6) {
    const int n = frame.ambient_dim() / 2;
    if (frame.ambient_dim() % 2 != 0)
        throw PreconditionError("wirtinger_check: ambient dimension must be even");
    return wirtinger_check(frame, power(standard_omega(n), frame.count() / 2), tol);
}

// ---------------------------------------------------------------------------
// Bounded Gram-Schmidt
// ---------------------------------------------------------------------------

/// Classical (unnormalized) Gram-Schmidt. The output is orthogonal with
/// v_1 ^ ... ^ v_k = w_1 ^ ... ^ w_k (exactly so in rational mode) and
/// |v_j| <= |w_j| for every j.
template <typename S>
std::vector<Vec<S>> gram_schmidt_bounded(const std::vector<Vec<S>>& ws) {
    std::vector<Vec<S>> vs;
    vs.reserve(ws.size());
    for (std::size_t j = 0; j < ws.size(); ++j) {
        Vec<S> v = ws[j];
        for (std::size_t i = 0; i < j; ++i) {
            const S coeff = dot(vs[i], ws[j]) / dot(vs[i], vs[i]);
            for (std::size_t t = 0; t < v.size(); ++t) v[t] -= coeff * vs[i][t];
        }
        const S norm_sq = dot(v, v);
        const bool dependent = is_rational_scalar_v<S> ? scalar_is_zero(norm_sq)
                                                       : to_double(norm_sq) < 1e-24;
        if (dependent)
            throw PreconditionError("gram_schmidt_bounded: input vectors are linearly dependent "
                                    "(pivot below 1e-12 at position " + std::to_string(j) + ")");
        vs.push_back(std::move(v));
    }
    return vs;
}

inline Eigen::MatrixXd gram_schmidt_bounded(const Eigen::MatrixXd& ws) {
    std::vector<Vec<double>> cols = columns_of(ws);
    std::vector<Vec<double>> vs = gram_schmidt_bounded(cols);
    Eigen::MatrixXd out(ws.rows(), ws.cols());
    for (int j = 0; j < ws.cols(); ++j) out.col(j) = from_vec(vs[static_cast<std::size_t>(j)]);
    return out;
}

// ---------------------------------------------------------------------------
// Calibrated cylinders
// ---------------------------------------------------------------------------

/// Z_L(R) = { x : |proj_L(x)| <= R } for L spanned by orthonormal columns.
struct CalibratedCylinder {
    Eigen::MatrixXd basis;
    double radius;

    CalibratedCylinder(Eigen::MatrixXd l, double r) : basis(std::move(l)), radius(r) {
        if (radius <= 0.0) throw PreconditionError("CalibratedCylinder: radius must be positive");
        if (!is_orthonormal(basis))
            throw PreconditionError("CalibratedCylinder: basis columns must be orthonormal");
    }
};

inline bool cylinder_contains(const CalibratedCylinder& z, const Eigen::VectorXd& x) {
    return (z.basis.transpose() * x).norm() <= z.radius;
}

/// Certified radius R = r * sigma_max(L^T A) + |L^T b| with A(B(r)) contained
/// in Z_L(R); minimal whenever the projected translation aligns with the top
/// singular image (in particular whenever L^T b = 0). This closed form is the
/// workhorse of the squeezing searches and witness certificates.
inline double enclosing_radius(const Eigen::MatrixXd& l_basis, const Eigen::MatrixXd& a_lin,
                               const Eigen::VectorXd& translation, double r) {
    if (!is_orthonormal(l_basis))
        throw PreconditionError("enclosing_radius: L basis columns must be orthonormal");
    if (a_lin.rows() != l_basis.rows() || translation.size() != l_basis.rows())
        throw PreconditionError("enclosing_radius: dimension mismatch");
    if (r < 0.0) throw PreconditionError("enclosing_radius: r must be >= 0");
    const Eigen::MatrixXd projected = l_basis.transpose() * a_lin;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(projected * projected.transpose());
    const double sigma_max = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    return r * sigma_max + (l_basis.transpose() * translation).norm();
}

inline double enclosing_radius(const Eigen::MatrixXd& l_basis, const Eigen::MatrixXd& a_lin,
                               double r) {
    return enclosing_radius(l_basis, a_lin, Eigen::VectorXd::Zero(l_basis.rows()), r);
}

/// Basis of the symplectic k-cylinder subspace span(e_1, f_1, ..., e_k, f_k).
inline Eigen::MatrixXd symplectic_cylinder_basis(int n, int k) {
    if (k < 1 || k > n) throw PreconditionError("symplectic_cylinder_basis: k out of range");
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2 * n, 2 * k);
    for (int i = 0; i < k; ++i) {
        l(i, 2 * i) = 1.0;
        l(n + i, 2 * i + 1) = 1.0;
    }
    return l;
}

/// Basis of the Lagrangian splitting subspace span(e_1, ..., e_n).
inline Eigen::MatrixXd lagrangian_basis(int n) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2 * n, n);
    for (int i = 0; i < n; ++i) l(i, i) = 1.0;
    return l;
}

} // namespace calibra
