#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <vector>

#include "calibra/slag.hpp"
#include "calibra/stabilizer.hpp"

namespace calibra {

// ---------------------------------------------------------------------------
// Parametrized groups
// ---------------------------------------------------------------------------

enum class GroupKind { Symplectic, PowerStabilizer, SLnC, Isometry, Custom };

/// Exp-based chart from parameter vectors to group elements, plus a seeded
/// sampler for sweeps. Every produced element passes its membership test at
/// 1e-8 (relative residual).
struct GroupSpec {
    GroupKind kind;
    int n = 1;
    int k = 0;
    std::vector<Eigen::MatrixXd> generators; // Custom: Lie-algebra basis

    static GroupSpec symplectic(int n) { return {GroupKind::Symplectic, n, 0, {}}; }
    static GroupSpec power_stabilizer(int n, int k) {
        if (k < 1 || k > n) throw PreconditionError("GroupSpec: k out of range [1, n]");
        return {GroupKind::PowerStabilizer, n, k, {}};
    }
    static GroupSpec slnc(int n) { return {GroupKind::SLnC, n, 0, {}}; }
    static GroupSpec isometry(int ambient) { return {GroupKind::Isometry, ambient, 0, {}}; }
    static GroupSpec custom(int ambient, std::vector<Eigen::MatrixXd> gens) {
        return {GroupKind::Custom, ambient, 0, std::move(gens)};
    }

    int ambient_dim() const {
        switch (kind) {
            case GroupKind::Isometry:
            case GroupKind::Custom: return n;
            default: return 2 * n;
        }
    }

    /// Discrete components the chart enumerates (the anti-symplectic branch
    /// of the omega^k stabilizer for even k <= n-1).
    int components() const {
        return (kind == GroupKind::PowerStabilizer && k % 2 == 0 && k < n) ? 2 : 1;
    }

    int param_dim() const {
        switch (kind) {
            case GroupKind::Symplectic: return n * (2 * n + 1);
            case GroupKind::PowerStabilizer:
                return k == n ? 4 * n * n - 1 : n * (2 * n + 1);
            case GroupKind::SLnC: return 2 * (n * n - 1);
            case GroupKind::Isometry: return n * (n - 1) / 2;
            case GroupKind::Custom: return static_cast<int>(generators.size());
        }
        return 0;
    }

    Eigen::MatrixXd element(const Eigen::VectorXd& params, int component = 0) const {
        if (params.size() != param_dim())
            throw PreconditionError("GroupSpec::element: expected " + std::to_string(param_dim()) +
                                    " parameters");
        if (component < 0 || component >= components())
            throw PreconditionError("GroupSpec::element: component out of range");
        switch (kind) {
            case GroupKind::Symplectic: return symplectic_chart(params);
            case GroupKind::PowerStabilizer: {
                if (k == n) return sl_chart(params);
                const Eigen::MatrixXd base = symplectic_chart(params);
                return component == 1 ? Eigen::MatrixXd(anti_symplectic_reflection(n) * base)
                                      : base;
            }
            case GroupKind::SLnC: return slnc_chart(params);
            case GroupKind::Isometry: return isometry_chart(params);
            case GroupKind::Custom: {
                Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
                for (int i = 0; i < params.size(); ++i)
                    x += params(i) * generators[static_cast<std::size_t>(i)];
                return x.exp();
            }
        }
        throw PreconditionError("GroupSpec::element: unknown kind");
    }

    /// Relative membership residual; <= 1e-8 for chart output.
    double membership_residual(const Eigen::MatrixXd& a) const {
        const double scale = 1.0 + a.cwiseAbs().maxCoeff() * a.cwiseAbs().maxCoeff();
        switch (kind) {
            case GroupKind::Symplectic: return symplectic_residual(a) / scale;
            case GroupKind::PowerStabilizer: {
                const KFormD omega_k = power(standard_omega(n), k);
                return inf_norm(pullback(a, omega_k) - omega_k) /
                       (scale + inf_norm(omega_k));
            }
            case GroupKind::SLnC: {
                const auto det = complex_det(a, 1e-6, /*validate=*/false);
                if (!det) return std::numeric_limits<double>::infinity();
                return std::max(complex_linearity_residual(a) / scale, std::abs(*det - 1.0));
            }
            case GroupKind::Isometry:
                return (a.transpose() * a -
                        Eigen::MatrixXd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() /
                       scale;
            case GroupKind::Custom: return 0.0;
        }
        return 0.0;
    }

    /// Seeded sampler used by the sweeps. Samples the classified components
    /// for the omega^k stabilizer, normalized Gaussians for SL(n, C), and
    /// orthonormalized Gaussians for isometries.
    Eigen::MatrixXd random_element(CounterRng& rng, double spread = 0.6) const {
        switch (kind) {
            case GroupKind::Symplectic: return random_symplectic(n, rng.next_u64(), spread);
            case GroupKind::PowerStabilizer: return random_power_preserver(n, k, rng, spread);
            case GroupKind::SLnC: return embed_complex(random_slnc(n, rng));
            case GroupKind::Isometry: {
                Eigen::MatrixXd g(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
                return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
            }
            case GroupKind::Custom: {
                Eigen::VectorXd p(param_dim());
                for (int i = 0; i < p.size(); ++i) p(i) = rng.uniform(-spread, spread);
                return element(p);
            }
        }
        throw PreconditionError("GroupSpec::random_element: unknown kind");
    }

private:
    Eigen::MatrixXd symplectic_chart(const Eigen::VectorXd& params) const {
        Eigen::MatrixXd sym(2 * n, 2 * n);
        int pos = 0;
        for (int i = 0; i < 2 * n; ++i)
            for (int j = i; j < 2 * n; ++j) sym(i, j) = sym(j, i) = params(pos++);
        return (standard_J(n) * sym).exp();
    }

    Eigen::MatrixXd sl_chart(const Eigen::VectorXd& params) const {
        const int d = 2 * n;
        Eigen::MatrixXd x(d, d);
        int pos = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i == d - 1 && j == d - 1) continue; // fixed by tracelessness
                x(i, j) = params(pos++);
            }
        x(d - 1, d - 1) = 0.0;
        x(d - 1, d - 1) = -x.trace();
        return x.exp();
    }

    Eigen::MatrixXd slnc_chart(const Eigen::VectorXd& params) const {
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
        int pos = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == n - 1 && j == n - 1) continue;
                x(i, j) = std::complex<double>(params(pos), params(pos + 1));
                pos += 2;
            }
        x(n - 1, n - 1) = -x.trace();
        return embed_complex(ComplexMatrix(Eigen::MatrixXcd(x.exp())));
    }

    Eigen::MatrixXd isometry_chart(const Eigen::VectorXd& params) const {
        Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(n, n);
        int pos = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                skew(i, j) = params(pos);
                skew(j, i) = -params(pos);
                ++pos;
            }
        return skew.exp();
    }
};

// ---------------------------------------------------------------------------
// Derivative-free minimization
// ---------------------------------------------------------------------------

namespace detail {

struct MinimizeOutcome {
    Eigen::VectorXd x;
    double f = 0.0;
    long evals = 0;
};

/// Nelder-Mead with standard coefficients, followed by a short
/// finite-difference gradient polish. `iterations` bounds the main loop; no
/// convergence guarantee is claimed.
template <typename F>
MinimizeOutcome nelder_mead(F&& objective, const Eigen::VectorXd& start, double step,
                            int iterations) {
    const int d = static_cast<int>(start.size());
    MinimizeOutcome out;
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++out.evals;
        return objective(x);
    };
    if (d == 0) { // trivial parameter space: the group is a single element
        out.x = start;
        out.f = eval(start);
        return out;
    }
    xs.push_back(start);
    fs.push_back(eval(start));
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd x = start;
        x(i) += step;
        xs.push_back(x);
        fs.push_back(eval(x));
    }
    auto order = [&] {
        std::vector<int> idx(xs.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return fs[static_cast<std::size_t>(a)] < fs[static_cast<std::size_t>(b)];
        });
        std::vector<Eigen::VectorXd> nxs;
        std::vector<double> nfs;
        for (int i : idx) {
            nxs.push_back(xs[static_cast<std::size_t>(i)]);
            nfs.push_back(fs[static_cast<std::size_t>(i)]);
        }
        xs = std::move(nxs);
        fs = std::move(nfs);
    };
    order();
    for (int iter = 0; iter < iterations; ++iter) {
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) centroid += xs[static_cast<std::size_t>(i)];
        centroid /= d;
        const Eigen::VectorXd& worst = xs.back();
        const Eigen::VectorXd reflected = centroid + (centroid - worst);
        const double f_reflected = eval(reflected);
        if (f_reflected < fs.front()) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - worst);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                xs.back() = expanded;
                fs.back() = f_expanded;
            } else {
                xs.back() = reflected;
                fs.back() = f_reflected;
            }
        } else if (f_reflected < fs[static_cast<std::size_t>(d - 1)]) {
            xs.back() = reflected;
            fs.back() = f_reflected;
        } else {
            const Eigen::VectorXd contracted = centroid + 0.5 * (worst - centroid);
            const double f_contracted = eval(contracted);
            if (f_contracted < fs.back()) {
                xs.back() = contracted;
                fs.back() = f_contracted;
            } else {
                for (std::size_t i = 1; i < xs.size(); ++i) {
                    xs[i] = xs.front() + 0.5 * (xs[i] - xs.front());
                    fs[i] = eval(xs[i]);
                }
            }
        }
        order();
        if ((xs.back() - xs.front()).norm() < 1e-12 && fs.back() - fs.front() < 1e-14) break;
    }
    out.x = xs.front();
    out.f = fs.front();
    return out;
}

/// Central-difference gradient descent refinement with backtracking.
template <typename F>
void fd_polish(F&& objective, MinimizeOutcome& best, int iterations, double h = 1e-6) {
    const int d = static_cast<int>(best.x.size());
    if (d == 0) return;
    double step = 0.1;
    for (int iter = 0; iter < iterations; ++iter) {
        Eigen::VectorXd grad(d);
        for (int i = 0; i < d; ++i) {
            Eigen::VectorXd xp = best.x, xm = best.x;
            xp(i) += h;
            xm(i) -= h;
            grad(i) = (objective(xp) - objective(xm)) / (2.0 * h);
            best.evals += 2;
        }
        const double gnorm = grad.norm();
        if (gnorm < 1e-12) break;
        bool improved = false;
        for (int halving = 0; halving < 20; ++halving) {
            const Eigen::VectorXd cand = best.x - (step / gnorm) * grad;
            const double f_cand = objective(cand);
            ++best.evals;
            if (f_cand < best.f) {
                best.x = cand;
                best.f = f_cand;
                improved = true;
                step = std::min(step * 2.0, 1.0);
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Squeezing searches and witnesses
// ---------------------------------------------------------------------------

/// Outcome of a cylinder-radius minimization over a group. The optimum
/// translation satisfies P_L b = 0, so translations are projected out
/// analytically and reported as zero.
struct SqueezeResult {
    double best_radius = 0.0;
    Eigen::VectorXd best_params;
    int best_component = 0;
    Eigen::VectorXd best_translation;
    long iterations = 0;
    std::vector<double> trace; // per-restart best radii
    std::vector<long> restart_iterations;
    std::vector<std::uint64_t> restart_seeds;
};

/// Minimizes enclosing_radius(L, element(params), r) by seeded multi-restart
/// Nelder-Mead with a finite-difference polish. Restart 0 starts at the
/// identity; restart i draws its start from seed ^ i. Results merge by
/// minimum radius with lowest-restart tie-break, and the reported radius is
/// recomputed from the best element before returning.
inline SqueezeResult squeeze_search(const GroupSpec& group, const Eigen::MatrixXd& l_basis,
                                    double r, int restarts, std::uint64_t seed, int budget) {
    if (restarts < 1) throw PreconditionError("squeeze_search: restarts must be >= 1");
    if (budget < 1) throw PreconditionError("squeeze_search: budget must be >= 1");
    if (!is_orthonormal(l_basis))
        throw PreconditionError("squeeze_search: L basis columns must be orthonormal");
    if (l_basis.rows() != group.ambient_dim())
        throw PreconditionError("squeeze_search: cylinder basis dimension mismatch");
    const int d = group.param_dim();

    struct RestartOutcome {
        detail::MinimizeOutcome best;
        int component = 0;
    };
    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t i) {
        const int component = static_cast<int>(i) % group.components();
        auto objective = [&](const Eigen::VectorXd& p) {
            return enclosing_radius(l_basis, group.element(p, component), r);
        };
        CounterRng rng(CounterRng::derive_seed(seed, i), /*stream=*/0x509e);
        Eigen::VectorXd start = Eigen::VectorXd::Zero(d);
        if (i > 0)
            for (int c = 0; c < d; ++c) start(c) = 0.8 * rng.gaussian();
        auto best = detail::nelder_mead(objective, start, 0.5, budget);
        detail::fd_polish(objective, best, std::max(5, budget / 20));
        outcomes[i] = {std::move(best), component};
    });

    SqueezeResult result;
    std::size_t winner = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        result.trace.push_back(outcomes[i].best.f);
        result.restart_iterations.push_back(outcomes[i].best.evals);
        result.restart_seeds.push_back(CounterRng::derive_seed(seed, i));
        result.iterations += outcomes[i].best.evals;
        if (outcomes[i].best.f < outcomes[winner].best.f) winner = i;
    }
    result.best_params = outcomes[winner].best.x;
    result.best_component = outcomes[winner].component;
    result.best_translation = Eigen::VectorXd::Zero(group.ambient_dim());
    // Re-certification from the element itself, not the optimizer's bookkeeping.
    result.best_radius =
        enclosing_radius(l_basis, group.element(result.best_params, result.best_component), r);
    if (result.best_radius != outcomes[winner].best.f)
        throw TripwireError("squeeze_search: re-certified radius disagrees with optimizer value");
    return result;
}

/// Witness for the affine rigidity theorem: for a map that is neither
/// symplectic nor anti-symplectic, finds an omega-dual pair squeezed by
/// Psi^T, and assembles A^T = Phi^T Psi (Phi'^T)^-1 mapping B(1) into
/// Z(lambda) with lambda < 1. Returns nothing for +-symplectic input (no
/// witness exists).
struct SymplecticWitness {
    Eigen::MatrixXd map; // A^T
    double lambda = 0.0;
    double certificate_radius = 0.0;
    bool used_inverse = false;
    Eigen::VectorXd u, v;
};

inline std::optional<SymplecticWitness> rigidity_witness_symplectic(
    const Eigen::MatrixXd& psi, double tol = 1e-8, int attempts = 10000,
    std::uint64_t seed = 0x517e55) {
    if (psi.rows() != psi.cols() || psi.rows() % 2 != 0)
        throw PreconditionError("rigidity_witness_symplectic: matrix must be square of even "
                                "dimension");
    const int n = static_cast<int>(psi.rows()) / 2;
    if (std::abs(psi.determinant()) < 1e-12)
        throw PreconditionError("rigidity_witness_symplectic: Psi is singular");
    if (classify_map(psi, tol) != MapClass::Neither) return std::nullopt;

    const Eigen::MatrixXd candidates[2] = {psi.transpose(), psi.inverse().transpose()};
    CounterRng rng(seed, /*stream=*/0x717);
    double best_gap = 0.0;
    Eigen::VectorXd best_u, best_v;
    int best_map = -1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        Eigen::VectorXd u(2 * n), v(2 * n);
        for (int i = 0; i < 2 * n; ++i) {
            u(i) = rng.gaussian();
            v(i) = rng.gaussian();
        }
        u.normalize();
        v.normalize();
        const double base = symplectic_pairing(u, v);
        if (std::abs(base) < 1e-9) continue;
        for (int which = 0; which < 2; ++which) {
            const double mapped =
                symplectic_pairing(candidates[which] * u, candidates[which] * v);
            const double gap = std::abs(base) - std::abs(mapped);
            if (std::abs(mapped) > 1e-12 * std::abs(base) && gap > best_gap) {
                best_gap = gap;
                best_u = u;
                best_v = v;
                best_map = which;
            }
        }
    }
    if (best_map < 0) return std::nullopt; // no squeezed pair over the trial budget

    const Eigen::MatrixXd& psi_t = candidates[best_map];
    const Eigen::MatrixXd psi_used = best_map == 0 ? psi : psi.inverse().eval();
    const double base = symplectic_pairing(best_u, best_v);
    const Eigen::VectorXd u_scaled = best_u / base; // omega(u, v) = 1
    const double rho = symplectic_pairing(psi_t * u_scaled, psi_t * best_v);
    const double lambda = std::sqrt(std::abs(rho));
    const double sign = rho >= 0.0 ? 1.0 : -1.0;
    const Eigen::MatrixXd phi = extend_to_symplectic_basis(u_scaled, best_v, 1e-6);
    const Eigen::MatrixXd phi_prime = extend_to_symplectic_basis(
        sign / lambda * (psi_t * u_scaled), (psi_t * best_v) / lambda, 1e-6);

    SymplecticWitness w;
    w.map = phi.transpose() * psi_used * phi_prime.transpose().inverse();
    w.lambda = lambda;
    w.used_inverse = best_map == 1;
    w.u = u_scaled;
    w.v = best_v;
    w.certificate_radius = enclosing_radius(symplectic_cylinder_basis(n, 1), w.map, 1.0);
    if (w.certificate_radius > w.lambda + 1e-9)
        throw TripwireError("rigidity_witness_symplectic: certificate radius " +
                            std::to_string(w.certificate_radius) + " exceeds lambda " +
                            std::to_string(w.lambda));
    return w;
}

/// Random-element sweep asserting the non-squeezing floor
/// enclosing_radius >= r (1 - 1e-9) for each trial.
struct SweepReport {
    double min_radius = std::numeric_limits<double>::infinity();
    long trials = 0;
    long violations = 0;
    double floor = 0.0;
};

inline SweepReport nonsqueezing_sweep(const GroupSpec& group, const Eigen::MatrixXd& l_basis,
                                      double r, long trials, std::uint64_t seed) {
    if (trials < 1) throw PreconditionError("nonsqueezing_sweep: trials must be >= 1");
    if (!is_orthonormal(l_basis))
        throw PreconditionError("nonsqueezing_sweep: L basis columns must be orthonormal");
    const double floor = r * (1.0 - 1e-9);
    std::vector<double> radii(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        CounterRng rng(CounterRng::derive_seed(seed, t), /*stream=*/0x5eeb);
        const Eigen::MatrixXd a = group.random_element(rng);
        Eigen::VectorXd b(group.ambient_dim());
        for (int i = 0; i < b.size(); ++i) b(i) = rng.gaussian();
        radii[t] = enclosing_radius(l_basis, a, b, r);
    });
    SweepReport report;
    report.trials = trials;
    report.floor = floor;
    for (double radius : radii) {
        report.min_radius = std::min(report.min_radius, radius);
        if (radius < floor) ++report.violations;
    }
    return report;
}

/// C_k = (2k)!^{1/2k} / sqrt(2), the coefficient the improved bound removes.
/// Computed as ((2k)!/2^k)^{1/2k} so that C_1 is exactly one.
inline double barron_constant(int k) {
    if (k < 1) throw PreconditionError("barron_constant: k must be >= 1");
    double scaled_factorial = 1.0; // (2k)!/2^k = (2k-1)!! k!
    for (int i = 1; i <= 2 * k; ++i) scaled_factorial *= i;
    for (int i = 0; i < k; ++i) scaled_factorial /= 2.0;
    return std::pow(scaled_factorial, 1.0 / (2.0 * k));
}

} // namespace calibra
