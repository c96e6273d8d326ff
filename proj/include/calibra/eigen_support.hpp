#pragma once

#include <vector>

#include <Eigen/Dense>

#include "calibra/dense.hpp"
#include "calibra/forms.hpp"

namespace calibra {

inline Mat<double> to_mat(const Eigen::MatrixXd& m) {
    Mat<double> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline Vec<double> to_vec(const Eigen::VectorXd& v) {
    return Vec<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd from_vec(const Vec<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<Vec<double>> columns_of(const Eigen::MatrixXd& m) {
    std::vector<Vec<double>> cols(static_cast<std::size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j) cols[static_cast<std::size_t>(j)] = to_vec(m.col(j));
    return cols;
}

inline KFormD pullback(const Eigen::MatrixXd& a_map, const KFormD& a) {
    return pullback(to_mat(a_map), a);
}

inline ComplexKFormD pullback(const Eigen::MatrixXd& a_map, const ComplexKFormD& a) {
    return pullback(to_mat(a_map), a);
}

inline double evaluate(const KFormD& a, const Eigen::MatrixXd& frame_columns) {
    return evaluate(a, columns_of(frame_columns));
}

inline KFormD contract(const Eigen::VectorXd& v, const KFormD& a) {
    return contract(to_vec(v), a);
}

} // namespace calibra
