#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "calibra/dense.hpp"
#include "calibra/errors.hpp"
#include "calibra/multi_index.hpp"
#include "calibra/scalars.hpp"

namespace calibra {

/// Sparse constant-coefficient alternating k-form on R^n.
///
/// Coefficients are stored on lexicographically sorted strictly increasing
/// multi-indices, so iteration order (and hence serialized output) is
/// deterministic. The scalar type selects the mode: `double` for numerics,
/// `Rational` for the exact combinatorial identities.
///
/// A form whose degree exceeds its dimension is permitted but necessarily
/// zero (no multi-index of that length fits); wedge and power produce such
/// forms instead of failing.
template <typename S>
class KForm {
public:
    using Scalar = S;
    using CoeffMap = std::map<MultiIndex, S>;

    KForm(int dim, int degree) : dim_(dim), degree_(degree) {
        if (dim < 1) throw PreconditionError("KForm: dimension must be >= 1");
        if (degree < 0) throw PreconditionError("KForm: degree must be >= 0");
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const CoeffMap& coefficients() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    S coefficient(const MultiIndex& idx) const {
        auto it = coeffs_.find(idx);
        return it == coeffs_.end() ? S(0) : it->second;
    }

    void set_coefficient(const MultiIndex& idx, const S& value) {
        check_index(idx);
        if (scalar_is_zero(value)) {
            coeffs_.erase(idx);
        } else {
            coeffs_[idx] = value;
        }
    }

    void add_coefficient(const MultiIndex& idx, const S& value) {
        check_index(idx);
        auto it = coeffs_.find(idx);
        if (it == coeffs_.end()) {
            if (!scalar_is_zero(value)) coeffs_.emplace(idx, value);
            return;
        }
        it->second += value;
        if (scalar_is_zero(it->second)) coeffs_.erase(it);
    }

    KForm& operator+=(const KForm& other) {
        require_same_shape(other);
        for (const auto& [idx, c] : other.coeffs_) add_coefficient(idx, c);
        return *this;
    }

    KForm& operator-=(const KForm& other) {
        require_same_shape(other);
        for (const auto& [idx, c] : other.coeffs_) add_coefficient(idx, -c);
        return *this;
    }

    KForm& operator*=(const S& scale) {
        if (scalar_is_zero(scale)) {
            coeffs_.clear();
            return *this;
        }
        for (auto& [idx, c] : coeffs_) c *= scale;
        return *this;
    }

    friend KForm operator+(KForm a, const KForm& b) { return a += b; }
    friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
    friend KForm operator*(const S& s, KForm a) { return a *= s; }
    friend KForm operator-(KForm a) { return a *= S(-1); }

    bool operator==(const KForm& other) const {
        return dim_ == other.dim_ && degree_ == other.degree_ && coeffs_ == other.coeffs_;
    }

    void require_same_shape(const KForm& other) const {
        if (dim_ != other.dim_ || degree_ != other.degree_)
            throw PreconditionError("KForm: dimension/degree mismatch");
    }

private:
    void check_index(const MultiIndex& idx) const {
        if (idx.size() != degree_)
            throw PreconditionError("KForm: multi-index length must equal the degree");
        if (!idx.within_dimension(dim_))
            throw PreconditionError("KForm: multi-index exceeds dimension bound");
    }

    int dim_;
    int degree_;
    CoeffMap coeffs_;
};

using KFormD = KForm<double>;
using KFormQ = KForm<Rational>;

/// Max-abs coefficient, as a double (0 for the zero form).
template <typename S>
double inf_norm(const KForm<S>& a) {
    double best = 0.0;
    for (const auto& [idx, c] : a.coefficients()) best = std::max(best, std::abs(to_double(c)));
    return best;
}

/// Float-mode form equality: max-abs coefficient difference bounded by
/// tol * (1 + max coefficient magnitude).
template <typename S>
bool approx_equal(const KForm<S>& a, const KForm<S>& b, double tol = 1e-9) {
    a.require_same_shape(b);
    KForm<S> diff = a - b;
    double scale = 1.0 + std::max(inf_norm(a), inf_norm(b));
    return inf_norm(diff) <= tol * scale;
}

template <typename S>
KForm<S> basis_form(int dim, const MultiIndex& idx) {
    KForm<S> f(dim, idx.size());
    f.set_coefficient(idx, S(1));
    return f;
}

// ---------------------------------------------------------------------------
// Exterior product, contraction, pullback, evaluation
// ---------------------------------------------------------------------------

/// Exterior product with the sorted-merge sign convention.
template <typename S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b) {
    if (a.dim() != b.dim()) throw PreconditionError("wedge: dimension mismatch");
    KForm<S> out(a.dim(), a.degree() + b.degree());
    if (out.degree() > out.dim()) return out; // zero by antisymmetry
    MultiIndex merged;
    for (const auto& [ia, ca] : a.coefficients()) {
        for (const auto& [ib, cb] : b.coefficients()) {
            int sign = merge_multi_indices(ia, ib, merged);
            if (sign == 0) continue;
            out.add_coefficient(merged, S(sign) * ca * cb);
        }
    }
    return out;
}

/// Interior product i_v a.
template <typename S>
KForm<S> contract(const Vec<S>& v, const KForm<S>& a) {
    if (static_cast<int>(v.size()) != a.dim())
        throw PreconditionError("contract: vector dimension mismatch");
    if (a.degree() < 1) throw PreconditionError("contract: degree must be >= 1");
    KForm<S> out(a.dim(), a.degree() - 1);
    for (const auto& [idx, c] : a.coefficients()) {
        for (int pos = 0; pos < idx.size(); ++pos) {
            const S& comp = v[static_cast<std::size_t>(idx[pos] - 1)];
            if (scalar_is_zero(comp)) continue;
            S term = c * comp;
            if (pos % 2 != 0) term = -term;
            out.add_coefficient(idx.erased(pos), term);
        }
    }
    return out;
}

/// Pullback A^* a, defined by (A^*a)(v_1, ..., v_k) = a(A v_1, ..., A v_k).
/// Composition order: pullback(A B, a) = pullback(B, pullback(A, a)).
template <typename S>
KForm<S> pullback(const Mat<S>& a_map, const KForm<S>& a) {
    if (a_map.rows() != a.dim() || a_map.cols() != a.dim())
        throw PreconditionError("pullback: matrix must be square of matching dimension");
    const int k = a.degree();
    KForm<S> out(a.dim(), k);
    if (a.is_zero()) return out;
    if (k == 0) {
        for (const auto& [idx, c] : a.coefficients()) out.set_coefficient(idx, c);
        return out;
    }
    // Cauchy-Binet: A^* e^I = sum_J det(A[I, J]) e^J.
    const std::vector<MultiIndex> targets = all_multi_indices(a.dim(), k);
    Mat<S> minor(k, k);
    for (const MultiIndex& target : targets) {
        S acc(0);
        for (const auto& [idx, c] : a.coefficients()) {
            for (int r = 0; r < k; ++r)
                for (int col = 0; col < k; ++col)
                    minor(r, col) = a_map(idx[r] - 1, target[col] - 1);
            acc += c * determinant(minor);
        }
        out.add_coefficient(target, acc);
    }
    return out;
}

/// a(v_1, ..., v_k): sum over stored multi-indices of coefficient times minor
/// determinant.
template <typename S>
S evaluate(const KForm<S>& a, const std::vector<Vec<S>>& vs) {
    const int k = a.degree();
    if (static_cast<int>(vs.size()) != k)
        throw PreconditionError("evaluate: expected " + std::to_string(k) + " vectors");
    for (const auto& v : vs)
        if (static_cast<int>(v.size()) != a.dim())
            throw PreconditionError("evaluate: vector dimension mismatch");
    if (k == 0) return a.coefficient(MultiIndex{});
    S acc(0);
    Mat<S> minor(k, k);
    for (const auto& [idx, c] : a.coefficients()) {
        for (int r = 0; r < k; ++r)
            for (int col = 0; col < k; ++col)
                minor(r, col) = vs[static_cast<std::size_t>(col)][static_cast<std::size_t>(idx[r] - 1)];
        acc += c * determinant(minor);
    }
    return acc;
}

/// k-th wedge power of a 2-form; power(a, 0) is the constant 1 in degree 0.
template <typename S>
KForm<S> power(const KForm<S>& a, int k) {
    if (a.degree() != 2) throw PreconditionError("power: base must have degree 2");
    if (k < 0) throw PreconditionError("power: exponent must be >= 0");
    if (k == 0) {
        KForm<S> one(a.dim(), 0);
        one.set_coefficient(MultiIndex{}, S(1));
        return one;
    }
    KForm<S> out = a;
    for (int i = 1; i < k; ++i) out = wedge(out, a);
    return out;
}

/// omega^k(u_1, ..., u_2k) via the signed sum over S_2k of products of pair
/// evaluations, scaled by 1/2^k. Must agree with evaluate(power(omega, k), us).
template <typename S>
S omega_k_sum_formula(const std::vector<Vec<S>>& us, const KForm<S>& omega) {
    if (omega.degree() != 2) throw PreconditionError("omega_k_sum_formula: omega must be a 2-form");
    if (us.size() % 2 != 0)
        throw PreconditionError("omega_k_sum_formula: need an even number of vectors");
    const int two_k = static_cast<int>(us.size());
    const int k = two_k / 2;
    // Precompute all pair evaluations omega(u_i, u_j).
    Mat<S> pair(two_k, two_k);
    for (int i = 0; i < two_k; ++i)
        for (int j = 0; j < two_k; ++j)
            pair(i, j) = evaluate(omega, {us[static_cast<std::size_t>(i)],
                                          us[static_cast<std::size_t>(j)]});
    std::vector<int> perm(static_cast<std::size_t>(two_k));
    std::iota(perm.begin(), perm.end(), 0);
    S acc(0);
    do {
        int inversions = 0;
        for (int i = 0; i < two_k; ++i)
            for (int j = i + 1; j < two_k; ++j)
                if (perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)])
                    ++inversions;
        S term = (inversions % 2 == 0) ? S(1) : S(-1);
        for (int i = 0; i < k; ++i)
            term *= pair(perm[static_cast<std::size_t>(2 * i)], perm[static_cast<std::size_t>(2 * i + 1)]);
        acc += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    S denom(1);
    for (int i = 0; i < k; ++i) denom *= S(2);
    return acc / denom;
}

/// Matrix of the Lefschetz map theta -> theta ^ omega^j from degree n-j to
/// degree n+j on R^2n, in lexicographic multi-index bases. Square because
/// binom(2n, n-j) = binom(2n, n+j).
template <typename S>
Mat<S> lefschetz_matrix(const KForm<S>& omega, int j) {
    if (omega.degree() != 2) throw PreconditionError("lefschetz_matrix: omega must be a 2-form");
    if (omega.dim() % 2 != 0) throw PreconditionError("lefschetz_matrix: dimension must be even");
    const int n = omega.dim() / 2;
    if (j < 1 || j > n) throw PreconditionError("lefschetz_matrix: j out of range [1, n]");
    const KForm<S> omega_j = power(omega, j);
    const std::vector<MultiIndex> cols = all_multi_indices(omega.dim(), n - j);
    const std::vector<MultiIndex> rows = all_multi_indices(omega.dim(), n + j);
    std::map<MultiIndex, int> row_of;
    for (std::size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = static_cast<int>(r);
    Mat<S> out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        KForm<S> image = wedge(basis_form<S>(omega.dim(), cols[c]), omega_j);
        for (const auto& [idx, coeff] : image.coefficients())
            out(row_of.at(idx), static_cast<int>(c)) = coeff;
    }
    return out;
}

/// Hodge star in the standard orthonormal basis with orientation e^1 ^ ... ^ e^n.
template <typename S>
KForm<S> hodge_star(const KForm<S>& a) {
    KForm<S> out(a.dim(), a.dim() - a.degree());
    MultiIndex comp;
    for (const auto& [idx, c] : a.coefficients()) {
        int sign = complement_multi_index(idx, a.dim(), comp);
        out.add_coefficient(comp, S(sign) * c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Standard forms
// ---------------------------------------------------------------------------

/// omega = e^1 ^ f^1 + ... + e^n ^ f^n on R^2n, with coordinates ordered
/// (x_1, ..., x_n, y_1, ..., y_n) so that f^i is coordinate n+i.
template <typename S>
KForm<S> standard_symplectic_form(int n) {
    if (n < 1) throw PreconditionError("standard_symplectic_form: n must be >= 1");
    KForm<S> omega(2 * n, 2);
    for (int i = 1; i <= n; ++i) omega.set_coefficient(MultiIndex{i, n + i}, S(1));
    return omega;
}

template <typename S>
KForm<S> volume_form(int dim) {
    std::vector<int> all(static_cast<std::size_t>(dim));
    std::iota(all.begin(), all.end(), 1);
    return basis_form<S>(dim, MultiIndex(all));
}

// ---------------------------------------------------------------------------
// Complex-valued forms
// ---------------------------------------------------------------------------

/// Complex-valued constant-coefficient form, stored as (re, im) of matching
/// dimension and degree.
template <typename S>
struct ComplexKForm {
    KForm<S> re;
    KForm<S> im;

    ComplexKForm(KForm<S> re_part, KForm<S> im_part)
        : re(std::move(re_part)), im(std::move(im_part)) {
        re.require_same_shape(im);
    }

    static ComplexKForm zero(int dim, int degree) {
        return ComplexKForm(KForm<S>(dim, degree), KForm<S>(dim, degree));
    }

    int dim() const { return re.dim(); }
    int degree() const { return re.degree(); }

    ComplexKForm conjugate() const { return ComplexKForm(re, -im); }
};

using ComplexKFormD = ComplexKForm<double>;

template <typename S>
ComplexKForm<S> wedge(const ComplexKForm<S>& a, const ComplexKForm<S>& b) {
    return ComplexKForm<S>(wedge(a.re, b.re) - wedge(a.im, b.im),
                           wedge(a.re, b.im) + wedge(a.im, b.re));
}

template <typename S>
ComplexKForm<S> pullback(const Mat<S>& a_map, const ComplexKForm<S>& a) {
    return ComplexKForm<S>(pullback(a_map, a.re), pullback(a_map, a.im));
}

template <typename S>
std::pair<S, S> evaluate(const ComplexKForm<S>& a, const std::vector<Vec<S>>& vs) {
    return {evaluate(a.re, vs), evaluate(a.im, vs)};
}

template <typename S>
double inf_norm(const ComplexKForm<S>& a) {
    return std::max(inf_norm(a.re), inf_norm(a.im));
}

template <typename S>
bool approx_equal(const ComplexKForm<S>& a, const ComplexKForm<S>& b, double tol = 1e-9) {
    KForm<S> dre = a.re - b.re, dim_part = a.im - b.im;
    double scale = 1.0 + std::max(inf_norm(a), inf_norm(b));
    return std::max(inf_norm(dre), inf_norm(dim_part)) <= tol * scale;
}

/// (x + iy) * a for a complex-valued form over double scalars.
inline ComplexKFormD complex_scale(double x, double y, const ComplexKFormD& a) {
    return ComplexKFormD(x * a.re - y * a.im, y * a.re + x * a.im);
}

/// Omega = dz^1 ^ ... ^ dz^n with dz^k = e^k + i f^k, so Omega(e_1, ..., e_n) = 1.
template <typename S>
ComplexKForm<S> holomorphic_volume_form(int n) {
    if (n < 1) throw PreconditionError("holomorphic_volume_form: n must be >= 1");
    const int dim = 2 * n;
    KForm<S> re(dim, 0), im(dim, 0);
    re.set_coefficient(MultiIndex{}, S(1));
    ComplexKForm<S> acc(re, im);
    for (int k = 1; k <= n; ++k) {
        ComplexKForm<S> dz(basis_form<S>(dim, MultiIndex{k}), basis_form<S>(dim, MultiIndex{n + k}));
        acc = wedge(acc, dz);
    }
    return acc;
}

} // namespace calibra
