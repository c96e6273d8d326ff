#pragma once

#include <complex>
#include <limits>
#include <optional>

#include "calibra/calibration.hpp"

namespace calibra {

/// A = X + iY as a pair of real n x n matrices.
struct ComplexMatrix {
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;

    ComplexMatrix(Eigen::MatrixXd x, Eigen::MatrixXd y) : re(std::move(x)), im(std::move(y)) {
        if (re.rows() != im.rows() || re.cols() != im.cols())
            throw PreconditionError("ComplexMatrix: re/im shape mismatch");
    }

    explicit ComplexMatrix(const Eigen::MatrixXcd& m) : re(m.real()), im(m.imag()) {}

    Eigen::MatrixXcd to_eigen() const {
        return re.cast<std::complex<double>>() +
               std::complex<double>(0.0, 1.0) * im.cast<std::complex<double>>();
    }

    ComplexMatrix conjugate_transpose() const {
        return ComplexMatrix(re.transpose(), -im.transpose());
    }
};

/// X + iY -> [[X, -Y], [Y, X]]. An algebra homomorphism, and
/// embed(M)^T = embed(M^*) for the conjugate transpose.
inline Eigen::MatrixXd embed_complex(const ComplexMatrix& m) {
    const int n = static_cast<int>(m.re.rows());
    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.re;
    out.topRightCorner(n, n) = -m.im;
    out.bottomLeftCorner(n, n) = m.im;
    out.bottomRightCorner(n, n) = m.re;
    return out;
}

inline double complex_linearity_residual(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows()) / 2;
    const Eigen::MatrixXd j = standard_J(n);
    return (a * j - j * a).cwiseAbs().maxCoeff();
}

/// Inverse of the embedding on complex-linear input (AJ = JA within tol).
inline std::optional<ComplexMatrix> extract_complex(const Eigen::MatrixXd& a, double tol = 1e-8) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("extract_complex: matrix must be square of even dimension");
    if (complex_linearity_residual(a) > tol * (1.0 + a.cwiseAbs().maxCoeff())) return std::nullopt;
    const int n = static_cast<int>(a.rows()) / 2;
    return ComplexMatrix(0.5 * (a.topLeftCorner(n, n) + a.bottomRightCorner(n, n)),
                         0.5 * (a.bottomLeftCorner(n, n) - a.topRightCorner(n, n)));
}

/// det_C of the extracted n x n complex matrix; satisfies
/// A^* Omega = det_C(A) Omega. When `validate` is set, that pullback identity
/// is recomputed coefficient-wise and a disagreement trips.
inline std::optional<std::complex<double>> complex_det(const Eigen::MatrixXd& a, double tol = 1e-8,
                                                       bool validate = true) {
    const auto extracted = extract_complex(a, tol);
    if (!extracted) return std::nullopt;
    const std::complex<double> det = extracted->to_eigen().determinant();
    if (validate) {
        const int n = static_cast<int>(a.rows()) / 2;
        const ComplexKFormD omega = holomorphic_volume_form<double>(n);
        const ComplexKFormD pulled = pullback(a, omega);
        const ComplexKFormD scaled = complex_scale(det.real(), det.imag(), omega);
        const double scale = 1.0 + std::max(inf_norm(pulled), inf_norm(scaled));
        const double residual = std::max(inf_norm(pulled.re - scaled.re),
                                         inf_norm(pulled.im - scaled.im));
        if (residual > 1e-6 * scale)
            throw TripwireError("complex_det: pullback path disagrees with the determinant path "
                                "(residual " + std::to_string(residual) + ")");
    }
    return det;
}

/// ||A^* Omega - Omega||_inf over both coefficient arrays, relative scale.
inline double omega_form_residual(const Eigen::MatrixXd& a) {
    const int n = static_cast<int>(a.rows()) / 2;
    const ComplexKFormD omega = holomorphic_volume_form<double>(n);
    const ComplexKFormD pulled = pullback(a, omega);
    return std::max(inf_norm(pulled.re - omega.re), inf_norm(pulled.im - omega.im));
}

/// Membership in the stabilizer of Omega. Two routes are computed: the
/// coefficient-wise pullback residual, and (complex-linear and det_C = 1).
/// The stabilizer theorem says they coincide; a decisive disagreement (one
/// route passing at tol while the other fails at 10 tol) trips.
inline bool preserves_omega_form(const Eigen::MatrixXd& a, double tol = 1e-8) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("preserves_omega_form: matrix must be square of even dimension");
    if (std::abs(a.determinant()) < 1e-12)
        throw PreconditionError("preserves_omega_form: matrix is singular");
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    const double pull_res = omega_form_residual(a);
    const bool by_pullback = pull_res <= tol * scale;

    const double lin_res = complex_linearity_residual(a);
    double det_res = std::numeric_limits<double>::infinity();
    if (lin_res <= 10.0 * tol * scale) {
        const auto extracted = extract_complex(a, 10.0 * tol);
        if (extracted) det_res = std::abs(extracted->to_eigen().determinant() - 1.0);
    }
    const bool by_det = lin_res <= tol * scale && det_res <= tol * scale;
    const bool by_det_loose = lin_res <= 10.0 * tol * scale && det_res <= 10.0 * tol * scale;
    if (by_pullback && !by_det_loose)
        throw TripwireError("preserves_omega_form: pullback route accepts but det route rejects "
                            "(linearity residual " + std::to_string(lin_res) + ")");
    if (by_det && pull_res > 10.0 * tol * scale)
        throw TripwireError("preserves_omega_form: det route accepts but pullback route rejects "
                            "(pullback residual " + std::to_string(pull_res) + ")");
    return by_pullback;
}

/// Whether A^* Omega = e^{i theta} Omega for some phase, and that phase.
struct PhaseVerdict {
    bool preserves_up_to_phase = false;
    double theta = 0.0; // in (-pi, pi] when preserves_up_to_phase
    double residual = 0.0;
};

/// Recovers the candidate factor from the coefficient of e^1 ^ ... ^ e^n
/// (where Omega has coefficient 1), then checks proportionality with a
/// unit-modulus factor.
inline PhaseVerdict phase_verdict(const Eigen::MatrixXd& a, double tol = 1e-8) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("phase_verdict: matrix must be square of even dimension");
    if (std::abs(a.determinant()) < 1e-12)
        throw PreconditionError("phase_verdict: matrix is singular");
    const int n = static_cast<int>(a.rows()) / 2;
    const ComplexKFormD omega = holomorphic_volume_form<double>(n);
    const ComplexKFormD pulled = pullback(a, omega);
    std::vector<int> first_idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) first_idx[static_cast<std::size_t>(i)] = i + 1;
    const MultiIndex ref(first_idx);
    const std::complex<double> factor(pulled.re.coefficient(ref), pulled.im.coefficient(ref));
    const ComplexKFormD scaled = complex_scale(factor.real(), factor.imag(), omega);
    const double scale = 1.0 + std::max(inf_norm(pulled), inf_norm(omega));
    PhaseVerdict v;
    v.residual = std::max(inf_norm(pulled.re - scaled.re), inf_norm(pulled.im - scaled.im));
    if (v.residual <= tol * scale && std::abs(std::abs(factor) - 1.0) <= tol) {
        v.preserves_up_to_phase = true;
        v.theta = std::arg(factor);
    }
    return v;
}

/// Recovers the complex structure determined by a decomposable complex
/// n-form with Upsilon ^ conj(Upsilon) != 0: V^{0,1} is the kernel of
/// v -> i_v Upsilon, and J' has eigenvalue -i there and +i on the conjugate.
/// For Upsilon = A^* Omega this returns A^-1 J A.
inline Eigen::MatrixXd recover_complex_structure(const ComplexKFormD& upsilon, double tol = 1e-8) {
    const int dim = upsilon.dim();
    if (dim % 2 != 0 || upsilon.degree() != dim / 2)
        throw PreconditionError("recover_complex_structure: need an n-form on R^2n");
    const int n = dim / 2;

    const ComplexKFormD top = wedge(upsilon, upsilon.conjugate());
    if (inf_norm(top) <= tol * (1.0 + inf_norm(upsilon)))
        throw PreconditionError("recover_complex_structure: Upsilon ^ conj(Upsilon) vanishes");

    // Columns: coefficients of i_{basis_j} Upsilon in the lexicographic
    // degree-(n-1) basis.
    const std::vector<MultiIndex> rows = all_multi_indices(dim, n - 1);
    std::map<MultiIndex, int> row_of;
    for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = static_cast<int>(r);
    Eigen::MatrixXcd contraction_map =
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()), dim);
    for (int j = 0; j < dim; ++j) {
        Vec<double> basis_vec(static_cast<std::size_t>(dim), 0.0);
        basis_vec[static_cast<std::size_t>(j)] = 1.0;
        const KFormD cre = contract(basis_vec, upsilon.re);
        const KFormD cim = contract(basis_vec, upsilon.im);
        for (const auto& [idx, c] : cre.coefficients())
            contraction_map(row_of.at(idx), j) += std::complex<double>(c, 0.0);
        for (const auto& [idx, c] : cim.coefficients())
            contraction_map(row_of.at(idx), j) += std::complex<double>(0.0, c);
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(contraction_map, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma(0);
    int kernel_dim = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma(i) < 1e-8 * sigma_max) ++kernel_dim;
    if (kernel_dim != n)
        throw PreconditionError("recover_complex_structure: kernel dimension " +
                                std::to_string(kernel_dim) + " != n; input is degenerate or "
                                "not decomposable");
    const Eigen::MatrixXcd kernel = svd.matrixV().rightCols(n); // spans V^{0,1}

    Eigen::MatrixXcd basis(dim, dim);
    basis.leftCols(n) = kernel.conjugate(); // V^{1,0}, eigenvalue +i
    basis.rightCols(n) = kernel;            // V^{0,1}, eigenvalue -i
    Eigen::VectorXcd eigvals(dim);
    for (int i = 0; i < n; ++i) {
        eigvals(i) = std::complex<double>(0.0, 1.0);
        eigvals(n + i) = std::complex<double>(0.0, -1.0);
    }
    const Eigen::MatrixXcd j_complex =
        basis * eigvals.asDiagonal() * basis.partialPivLu().solve(
                                           Eigen::MatrixXcd::Identity(dim, dim));
    const Eigen::MatrixXd j_real = j_complex.real();
    const double imag_res = j_complex.imag().cwiseAbs().maxCoeff();
    const double square_res =
        (j_real * j_real + Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (imag_res > 1e-6 || square_res > 1e-6)
        throw TripwireError("recover_complex_structure: recovered J fails reality/square checks "
                            "(imag " + std::to_string(imag_res) + ", J^2+I " +
                            std::to_string(square_res) + ")");
    return j_real;
}

/// Preserving Re(e^{i theta_1} Omega) and Re(e^{i theta_2} Omega) for
/// distinct non-antipodal phases forces preservation of all of Omega; when
/// both pullback checks pass, that consequence is asserted.
inline bool two_phase_implies_full(const Eigen::MatrixXd& a, double theta1, double theta2,
                                   double tol = 1e-8) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("two_phase_implies_full: matrix must be square of even dimension");
    if (std::abs(std::sin(theta1 - theta2)) <= 1e-12)
        throw PreconditionError("two_phase_implies_full: phases must be distinct and non-antipodal");
    const int n = static_cast<int>(a.rows()) / 2;
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    bool both = true;
    for (double theta : {theta1, theta2}) {
        const KFormD form = slag_re(n, theta);
        if (inf_norm(pullback(a, form) - form) > tol * scale) {
            both = false;
            break;
        }
    }
    if (both && !preserves_omega_form(a, std::max(tol, 1e-7)))
        throw TripwireError("two_phase_implies_full: two phases preserved but Omega is not");
    return both;
}

/// Squeezing witness for a complex-linear map with |det_C| != 1, following
/// the constructive rigidity proof: lambda = |det_C|^{1/n} after replacing
/// Psi by its inverse if needed, Phi in SL(n, C) matches the rescaled
/// columns, and A^T = Psi (Phi^T)^-1 maps B(1) into Z_L(lambda) for
/// L = span(e_1, ..., e_n).
struct SlagWitness {
    Eigen::MatrixXd map; // A^T
    double lambda = 0.0;
    double theta = 0.0;
    double certificate_radius = 0.0;
    bool used_inverse = false;
};

inline SlagWitness slag_squeezing_witness(const ComplexMatrix& psi, double tol = 1e-8) {
    const int n = static_cast<int>(psi.re.rows());
    Eigen::MatrixXcd m = psi.to_eigen();
    const std::complex<double> det0 = m.determinant();
    if (std::abs(det0) == 0.0)
        throw PreconditionError("slag_squeezing_witness: Psi is singular");
    if (std::abs(std::abs(det0) - 1.0) <= tol)
        throw PreconditionError("slag_squeezing_witness: |det_C Psi| = 1, no squeezing exists");
    SlagWitness w;
    if (std::abs(det0) > 1.0) {
        m = m.inverse().eval();
        w.used_inverse = true;
    }
    // Omega(Psi^T e_1, ..., Psi^T e_n) = det_C(Psi^*) for the embedded map.
    const std::complex<double> det_star = std::conj(m.determinant());
    w.lambda = std::pow(std::abs(det_star), 1.0 / n);
    w.theta = std::arg(det_star);
    // Phi e_k = lambda^-1 e^{-i theta / n} Psi^T e_k, completed by Phi f_k = J Phi e_k.
    const std::complex<double> rescale =
        std::exp(std::complex<double>(0.0, -w.theta / n)) / w.lambda;
    const Eigen::MatrixXcd phi_c = rescale * m.adjoint();
    const Eigen::MatrixXd psi_t = embed_complex(ComplexMatrix(Eigen::MatrixXcd(m.adjoint())));
    const Eigen::MatrixXd phi = embed_complex(ComplexMatrix(phi_c));
    w.map = psi_t.transpose() * phi.transpose().inverse();
    w.certificate_radius = enclosing_radius(lagrangian_basis(n), w.map, 1.0);
    if (w.certificate_radius > w.lambda + 1e-9)
        throw TripwireError("slag_squeezing_witness: certificate radius " +
                            std::to_string(w.certificate_radius) + " exceeds lambda " +
                            std::to_string(w.lambda));
    return w;
}

inline SlagWitness slag_squeezing_witness(const Eigen::MatrixXd& psi_real, double tol = 1e-8) {
    const auto extracted = extract_complex(psi_real, tol);
    if (!extracted)
        throw PreconditionError("slag_squeezing_witness: Psi is not complex-linear");
    return slag_squeezing_witness(*extracted, tol);
}

/// Gaussian complex matrix rescaled by det^{-1/n} (principal branch).
inline ComplexMatrix random_slnc(int n, CounterRng& rng) {
    while (true) {
        Eigen::MatrixXcd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian());
        const std::complex<double> det = m.determinant();
        if (std::abs(det) < 1e-8) continue;
        const std::complex<double> root =
            std::exp(std::log(det) / static_cast<double>(n)); // principal branch
        return ComplexMatrix(Eigen::MatrixXcd(m / root));
    }
}

/// Embedded random unitary (QR of a complex Gaussian with positive diagonal).
inline Eigen::MatrixXd random_unitary_embedded(int n, CounterRng& rng) {
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = std::complex<double>(rng.gaussian(), rng.gaussian());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = q.adjoint() * g;
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return embed_complex(ComplexMatrix(q));
}

} // namespace calibra
