#pragma once

#include <vector>

#include <Eigen/Dense>

#include "koopuq/koopman/model.hpp"
#include "koopuq/types.hpp"

namespace koopuq::predict {

// Regressor-side state at one prediction offset: current observable, delay
// history and the lifted vector consistent with them.
struct RolloutState {
    Eigen::VectorXd g;
    Eigen::VectorXd h;
    Eigen::VectorXd upsilon;
    Eigen::Index k = 0;  // offset from the handoff sample
};

struct RolloutOptions {
    // Every resync_period steps the predicted observable is replaced by the
    // matching column of `truth` before the next step (1 = teacher forcing,
    // 0 = pure closed loop). `truth` columns align with prediction offsets:
    // column j is the true observable at handoff + 1 + j.
    Eigen::Index resync_period = 0;
    const TimeSeriesData* truth = nullptr;
};

struct RolloutResult {
    // predicted.observables column j holds the forecast for handoff + 1 + j;
    // predicted.inputs column j holds the input applied during that step.
    TimeSeriesData predicted;
    // states[j] is the regressor state the j-th step started from,
    // j = 0..n_steps; the last entry is where the rollout ended.
    std::vector<RolloutState> states;
};

// Closed-loop forecast of n_steps observables starting from the end of
// `warmup` (which must supply at least z + 1 samples to seed the history).
// future_inputs must have m rows and n_steps columns (0 x 0 when m == 0).
// Throws data_error on shape problems and numeric_error if the forecast
// stops being finite.
RolloutResult rollout(const koopman::KoopmanModel& model, const TimeSeriesData& warmup,
                      const Eigen::MatrixXd& future_inputs, Eigen::Index n_steps,
                      const RolloutOptions& opts = {});

}  // namespace koopuq::predict
