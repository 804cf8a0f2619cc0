#pragma once

#include <vector>

#include <Eigen/Dense>

#include "koopuq/predict/rollout.hpp"

namespace koopuq::predict {

// A window of consecutive prediction steps, packaged as the inverse-problem
// pair Y = A X: y column i is the predicted observable produced from the
// regressor in x column i. t0 is the offset of the first step within the
// prediction region.
struct PredictionBatch {
    Eigen::MatrixXd y;  // p x T
    Eigen::MatrixXd x;  // (p + m + L) x T
    Eigen::Index t0 = 0;

    Eigen::Index length() const { return y.cols(); }
    // Offsets [t0, t0 + T) this batch covers.
    bool covers(Eigen::Index offset) const { return offset >= t0 && offset < t0 + length(); }
};

// Cuts the rollout into windows of t_batch steps taken every `stride` steps
// (stride == t_batch gives a disjoint partition; smaller strides overlap).
// A final shorter window is emitted when the steps don't divide evenly, so
// every step is covered. Throws config_error on non-positive sizes.
std::vector<PredictionBatch> make_batches(const RolloutResult& rollout_result,
                                          Eigen::Index t_batch, Eigen::Index stride);

}  // namespace koopuq::predict
