#include "isonet/linalg.hpp"

namespace isonet {

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double rel_tol, Eigen::VectorXd* singular_values) {
    const int cols = static_cast<int>(A.cols());
    Eigen::MatrixXd B = A;
    if (B.rows() < cols) {
        B.conservativeResize(cols, cols);
        B.bottomRows(cols - A.rows()).setZero();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    if (singular_values) *singular_values = s;
    const double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * smax) ++rank;
    return svd.matrixV().rightCols(cols - rank);
}

Eigen::MatrixXd unit_columns(const std::vector<MinkVec>& vs) {
    Eigen::MatrixXd A(5, vs.size());
    for (size_t k = 0; k < vs.size(); ++k) {
        Vec5 c = to_vec5(vs[k]);
        const double n = c.norm();
        A.col(static_cast<Eigen::Index>(k)) = n > 0 ? Vec5(c / n) : c;
    }
    return A;
}

}  // namespace isonet
