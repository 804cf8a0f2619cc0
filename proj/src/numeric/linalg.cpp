#include "koopuq/numeric/linalg.hpp"

namespace koopuq::numeric {

Eigen::Index svd_rank(const Eigen::VectorXd& singular_values, double rcond) {
    if (singular_values.size() == 0) return 0;
    const double cutoff = rcond * singular_values(0);
    Eigen::Index r = 0;
    while (r < singular_values.size() && singular_values(r) > cutoff) ++r;
    return r;
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rcond) {
    if (a.size() == 0) return Eigen::MatrixXd(a.cols(), a.rows());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = svd_rank(svd.singularValues(), rcond);
    if (r == 0) return Eigen::MatrixXd::Zero(a.cols(), a.rows());
    return svd.matrixV().leftCols(r) *
           svd.singularValues().head(r).cwiseInverse().asDiagonal() *
           svd.matrixU().leftCols(r).transpose();
}

Eigen::MatrixXd lstsq_operator(const Eigen::MatrixXd& targets,
                               const Eigen::MatrixXd& regressors,
                               double rcond) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(regressors, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = svd_rank(svd.singularValues(), rcond);
    if (r == 0) return Eigen::MatrixXd::Zero(targets.rows(), regressors.rows());
    // targets * V_r * S_r^-1 * U_r^T, grouped to keep intermediates small
    return ((targets * svd.matrixV().leftCols(r)) *
            svd.singularValues().head(r).cwiseInverse().asDiagonal()) *
           svd.matrixU().leftCols(r).transpose();
}

}  // namespace koopuq::numeric
