#pragma once

#include <Eigen/Dense>

namespace koopuq::numeric {

// Moore-Penrose pseudoinverse via SVD. Singular values at or below
// rcond * sigma_max are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rcond = 1e-10);

// Minimum-Frobenius-norm solution A of A * regressors = targets, i.e.
// targets * pinv(regressors), without forming the pseudoinverse explicitly.
Eigen::MatrixXd lstsq_operator(const Eigen::MatrixXd& targets,
                               const Eigen::MatrixXd& regressors,
                               double rcond = 1e-10);

// Numerical rank with the same relative cutoff convention.
Eigen::Index svd_rank(const Eigen::VectorXd& singular_values, double rcond = 1e-10);

}  // namespace koopuq::numeric
