#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calibra/symplectic.hpp"

namespace calibra {

enum class PowerClass { Symplectic, AntiSymplectic, VolumeOnly, NotPreserving, Inconsistent };

inline std::string to_string(PowerClass c) {
    switch (c) {
        case PowerClass::Symplectic: return "symplectic";
        case PowerClass::AntiSymplectic: return "anti-symplectic";
        case PowerClass::VolumeOnly: return "volume-only";
        case PowerClass::NotPreserving: return "not-preserving";
        default: return "inconsistent";
    }
}

/// Verdict for a candidate stabilizer element of omega^k, with the max-abs
/// residuals of every identity that was tested. Inconsistent flags a
/// numerical violation of the classification theorem (k <= n-1 preserver
/// that is neither symplectic nor anti-symplectic) and should never occur
/// for honest inputs.
struct PowerStabilizerVerdict {
    bool preserves_power = false;
    PowerClass classification = PowerClass::NotPreserving;
    std::map<std::string, double> residuals;
};

namespace detail {

inline void check_power_args(const Eigen::MatrixXd& a, int k) {
    if (a.rows() != a.cols() || a.rows() % 2 != 0)
        throw PreconditionError("omega power check: matrix must be square of even dimension");
    const int n = static_cast<int>(a.rows()) / 2;
    if (k < 1 || k > n) throw PreconditionError("omega power check: k out of range [1, n]");
}

inline double omega_power_residual(const Eigen::MatrixXd& a, int k) {
    const int n = static_cast<int>(a.rows()) / 2;
    const KFormD omega_k = power(standard_omega(n), k);
    return inf_norm(pullback(a, omega_k) - omega_k);
}

} // namespace detail

/// True iff ||A^*(omega^k) - omega^k||_inf <= tol * (1 + ||omega^k||_inf).
/// The relative scaling absorbs the k! coefficient magnitude of omega^k.
inline bool preserves_omega_power(const Eigen::MatrixXd& a, int k, double tol = 1e-8) {
    detail::check_power_args(a, k);
    const int n = static_cast<int>(a.rows()) / 2;
    const double scale = 1.0 + inf_norm(power(standard_omega(n), k));
    return detail::omega_power_residual(a, k) <= tol * scale;
}

/// Runs the power-preservation test, then classifies via A^T J A = +-J. For
/// k = n a determinant-one map that is neither is VolumeOnly; for k <= n-1 it
/// would contradict the classification theorem and is flagged Inconsistent.
inline PowerStabilizerVerdict classify_power_preserver(const Eigen::MatrixXd& a, int k,
                                                       double tol = 1e-8) {
    detail::check_power_args(a, k);
    const int n = static_cast<int>(a.rows()) / 2;
    PowerStabilizerVerdict v;
    const double scale = 1.0 + inf_norm(power(standard_omega(n), k));
    const double power_res = detail::omega_power_residual(a, k);
    v.residuals["power"] = power_res;
    v.residuals["symplectic"] = symplectic_residual(a);
    v.residuals["anti_symplectic"] = anti_symplectic_residual(a);
    v.residuals["det_minus_one"] = std::abs(a.determinant() - 1.0);
    v.preserves_power = power_res <= tol * scale;
    if (!v.preserves_power) {
        v.classification = PowerClass::NotPreserving;
        return v;
    }
    const MapClass mc = classify_map(a, tol);
    if (mc == MapClass::Symplectic) {
        v.classification = PowerClass::Symplectic;
    } else if (mc == MapClass::AntiSymplectic) {
        v.classification = PowerClass::AntiSymplectic;
    } else if (k == n && v.residuals["det_minus_one"] <= tol) {
        v.classification = PowerClass::VolumeOnly;
    } else {
        v.classification = PowerClass::Inconsistent;
    }
    return v;
}

/// Decision procedure behind the classification theorem: if c Omega^k =
/// omega^k for some scalar c, then Omega must be sum lambda_i e^i ^ f^i, and
/// the lambdas are returned. Returns nothing when Omega^k is not
/// proportional to omega^k. Requires k <= n-1; the theorem excludes k = n.
inline std::optional<std::vector<double>> check_two_form_diagonal(const KFormD& omega_cand, int k,
                                                                  double tol = 1e-8) {
    if (omega_cand.degree() != 2)
        throw PreconditionError("check_two_form_diagonal: input must be a 2-form");
    if (omega_cand.dim() % 2 != 0)
        throw PreconditionError("check_two_form_diagonal: dimension must be even");
    const int n = omega_cand.dim() / 2;
    if (k < 1 || k > n - 1)
        throw PreconditionError("check_two_form_diagonal: k must satisfy 1 <= k <= n-1");

    const KFormD omega_k = power(standard_omega(n), k);
    const KFormD cand_k = power(omega_cand, k);
    // The lexicographically first coefficient of omega^k sits on
    // (1, ..., k, n+1, ..., n+k) and is never zero.
    const MultiIndex& first = omega_k.coefficients().begin()->first;
    const double cand_lead = cand_k.coefficient(first);
    const double scale = 1.0 + std::max(inf_norm(omega_k), inf_norm(cand_k));
    if (std::abs(cand_lead) <= tol * scale) return std::nullopt;
    const double c = omega_k.coefficient(first) / cand_lead;
    if (inf_norm(c * cand_k - omega_k) > tol * scale) return std::nullopt;

    // Proportionality holds; the theorem now demands a diagonal Omega.
    std::vector<double> lambda(static_cast<std::size_t>(n), 0.0);
    const double cand_scale = 1.0 + inf_norm(omega_cand);
    for (const auto& [idx, coeff] : omega_cand.coefficients()) {
        if (idx[1] == idx[0] + n) {
            lambda[static_cast<std::size_t>(idx[0] - 1)] = coeff;
        } else if (std::abs(coeff) > tol * cand_scale) {
            throw TripwireError("check_two_form_diagonal: c Omega^k = omega^k holds but Omega has "
                                "off-diagonal term on " + idx.to_string());
        }
    }
    return lambda;
}

/// Transposition closure of the stabilizer: requires that A preserves
/// omega^k and reports whether A^T does too.
inline bool transpose_closure_check(const Eigen::MatrixXd& a, int k, double tol = 1e-8) {
    if (!preserves_omega_power(a, k, tol))
        throw PreconditionError("transpose_closure_check: A does not preserve omega^k");
    return preserves_omega_power(a.transpose(), k, tol);
}

/// Reflection (x, y) -> (-x, y), the standard anti-symplectic map.
inline Eigen::MatrixXd anti_symplectic_reflection(int n) {
    Eigen::VectorXd diag(2 * n);
    diag << Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0);
    return diag.asDiagonal();
}

/// Samples the stabilizer of omega^k from its classified components
/// (symplectic; anti-symplectic when k is even; SL(2n) when k = n). Blind
/// sampling of the stabilizer is measure-zero, so tests draw from here.
inline Eigen::MatrixXd random_power_preserver(int n, int k, CounterRng& rng,
                                              double spread = 0.6) {
    if (k < 1 || k > n) throw PreconditionError("random_power_preserver: k out of range");
    const Eigen::MatrixXd base = random_symplectic(n, rng.next_u64(), spread);
    std::vector<int> components = {0};
    if (k % 2 == 0) components.push_back(1);
    if (k == n) components.push_back(2);
    const int pick = components[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<long>(components.size()) - 1))];
    if (pick == 1) return anti_symplectic_reflection(n) * base;
    if (pick == 2) {
        Eigen::MatrixXd x(2 * n, 2 * n);
        for (int i = 0; i < 2 * n; ++i)
            for (int j = 0; j < 2 * n; ++j) x(i, j) = rng.uniform(-spread, spread);
        x -= (x.trace() / (2.0 * n)) * Eigen::MatrixXd::Identity(2 * n, 2 * n);
        return x.exp();
    }
    return base;
}

} // namespace calibra
