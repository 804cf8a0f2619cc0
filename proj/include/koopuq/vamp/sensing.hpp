#pragma once

#include <Eigen/Dense>

namespace koopuq::vamp {

// Measurement model y = A x + n with scalar noise precision gamma_w. The
// thin SVD of A is computed once at construction and shared by every solve
// that uses this instance.
class SensingModel {
public:
    // rank_rcond drops singular values at or below rank_rcond * s_max.
    // Throws config_error for non-positive gamma_w and numeric_error if the
    // factorization fails to reconstruct A to within 1e-10 relative.
    SensingModel(Eigen::MatrixXd a, double noise_precision, double rank_rcond = 1e-12);

    const Eigen::MatrixXd& a() const { return a_; }
    double noise_precision() const { return gamma_w_; }
    Eigen::Index rows() const { return a_.rows(); }
    Eigen::Index cols() const { return a_.cols(); }
    Eigen::Index rank() const { return s_.size(); }

    const Eigen::MatrixXd& svd_u() const { return u_; }  // M x R
    const Eigen::VectorXd& svd_s() const { return s_; }  // R, descending, > 0
    const Eigen::MatrixXd& svd_v() const { return v_; }  // N x R

private:
    Eigen::MatrixXd a_;
    double gamma_w_;
    Eigen::MatrixXd u_, v_;
    Eigen::VectorXd s_;
};

}  // namespace koopuq::vamp
