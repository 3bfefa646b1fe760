#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isonet/mink.hpp"

namespace isonet {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

inline Vec5 to_vec5(const MinkVec& X) {
    Vec5 v;
    v << X.x.x, X.x.y, X.x.z, X.x0, X.xinf;
    return v;
}

inline MinkVec from_vec5(const Vec5& v) { return {Quaternion::imag(v(0), v(1), v(2)), v(3), v(4)}; }

// Matrix of the bilinear form in the coordinates (x1, x2, x3, x0, xinf).
inline Mat5 metric5() {
    Mat5 g = Mat5::Zero();
    g(0, 0) = g(1, 1) = g(2, 2) = 1.0;
    g(3, 4) = g(4, 3) = -0.5;
    return g;
}

// Columns spanning the numerical null space: singular values below rel_tol * sigma_max.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double rel_tol, Eigen::VectorXd* singular_values = nullptr);

// Matrix whose columns are the given vectors, each scaled to unit Euclidean length.
Eigen::MatrixXd unit_columns(const std::vector<MinkVec>& vs);

}  // namespace isonet
