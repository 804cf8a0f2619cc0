#include "koopuq/vamp/sensing.hpp"

#include <string>
#include <utility>

#include "koopuq/errors.hpp"
#include "koopuq/numeric/linalg.hpp"

namespace koopuq::vamp {

SensingModel::SensingModel(Eigen::MatrixXd a, double noise_precision, double rank_rcond)
    : a_(std::move(a)), gamma_w_(noise_precision) {
    if (a_.rows() < 1 || a_.cols() < 1)
        throw config_error("sensing model: matrix must be non-empty");
    if (!a_.allFinite()) throw data_error("sensing model: matrix has non-finite entries");
    if (!(gamma_w_ > 0.0))
        throw config_error("sensing model: noise precision must be positive, got " +
                           std::to_string(gamma_w_));

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::Index r = numeric::svd_rank(svd.singularValues(), rank_rcond);
    u_ = svd.matrixU().leftCols(r);
    s_ = svd.singularValues().head(r);
    v_ = svd.matrixV().leftCols(r);

    const double norm = a_.norm();
    if (norm > 0.0) {
        const double residual = (a_ - u_ * s_.asDiagonal() * v_.transpose()).norm() / norm;
        if (residual >= 1e-10)
            throw numeric_error("sensing model: SVD reconstruction off by " +
                                std::to_string(residual));
    }
}

}  // namespace koopuq::vamp
