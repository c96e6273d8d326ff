#pragma once

#include <vector>

#include "calibra/errors.hpp"
#include "calibra/scalars.hpp"

namespace calibra {

template <typename S>
using Vec = std::vector<S>;

/// Minimal dense row-major matrix. Keeps the exterior-algebra engine free of
/// any particular linear-algebra backend so it can run on exact rationals.
template <typename S>
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols) {
        data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), S(0));
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const S& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    Vec<S> apply(const Vec<S>& x) const {
        Vec<S> y(static_cast<std::size_t>(rows_), S(0));
        for (int i = 0; i < rows_; ++i) {
            S acc(0);
            for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }

    Mat multiply(const Mat& other) const {
        Mat out(rows_, other.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const S& a = (*this)(i, k);
                if (scalar_is_zero(a)) continue;
                for (int j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
            }
        return out;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<S> data_;
};

/// Determinant by Gaussian elimination with abs-max pivoting. Divisions are
/// exact in rational mode, so the result is exact there.
template <typename S>
S determinant(Mat<S> m) {
    if (m.rows() != m.cols()) throw PreconditionError("determinant: matrix must be square");
    const int n = m.rows();
    S det(1);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        S best(0);
        for (int row = col; row < n; ++row) {
            S a = scalar_abs(m(row, col));
            if (pivot < 0 || best < a) {
                best = a;
                pivot = row;
            }
        }
        if (scalar_is_zero(m(pivot, col))) return S(0);
        if (pivot != col) {
            for (int j = col; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (int row = col + 1; row < n; ++row) {
            if (scalar_is_zero(m(row, col))) continue;
            S factor = m(row, col) / m(col, col);
            for (int j = col; j < n; ++j) m(row, j) -= factor * m(col, j);
        }
    }
    return det;
}

/// Row-reduction rank. Exact for rationals; `tol` guards double pivots.
template <typename S>
int rank(Mat<S> m, double tol = 1e-10) {
    const int rows = m.rows(), cols = m.cols();
    int r = 0;
    for (int col = 0; col < cols && r < rows; ++col) {
        int pivot = -1;
        S best(0);
        for (int row = r; row < rows; ++row) {
            S a = scalar_abs(m(row, col));
            if (pivot < 0 || best < a) {
                best = a;
                pivot = row;
            }
        }
        bool zero_pivot = is_rational_scalar_v<S> ? scalar_is_zero(m(pivot, col))
                                                  : to_double(scalar_abs(m(pivot, col))) <= tol;
        if (zero_pivot) continue;
        if (pivot != r)
            for (int j = 0; j < cols; ++j) std::swap(m(pivot, j), m(r, j));
        for (int row = r + 1; row < rows; ++row) {
            if (scalar_is_zero(m(row, col))) continue;
            S factor = m(row, col) / m(r, col);
            for (int j = col; j < cols; ++j) m(row, j) -= factor * m(r, j);
        }
        ++r;
    }
    return r;
}

template <typename S>
S dot(const Vec<S>& a, const Vec<S>& b) {
    S acc(0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace calibra
