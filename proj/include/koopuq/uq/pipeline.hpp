#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "koopuq/koopman/model.hpp"
#include "koopuq/predict/batches.hpp"
#include "koopuq/types.hpp"
#include "koopuq/vamp/sensing.hpp"
#include "koopuq/vamp/solver.hpp"

namespace koopuq::uq {

// threshold -> uncertainty-window percentage; outer key is the batch size.
using WindowRow = std::map<double, double>;
using WindowCurve = std::map<Eigen::Index, WindowRow>;

struct UqConfig {
    Eigen::Index t_batch = 50;
    Eigen::Index stride = 0;  // 0 means t_batch (disjoint partition)
    // Normalized-variance thresholds (fractions of the prior variance),
    // strictly increasing, each in (0, 1).
    std::vector<double> thresholds = {0.1, 0.3, 0.5, 0.7, 0.9};
    vamp::PriorSpec prior = vamp::PriorSpec::bernoulli_gaussian_prior(0.05);
    // Measurement precision gamma_w; 0 defers to the model's training
    // residual variance.
    double noise_precision = 0.0;
    vamp::VampOptions vamp_opts;
    // Sample index of the truth series where prediction starts; -1 means the
    // earliest index with a full delay history (z).
    Eigen::Index handoff_index = -1;
    // Number of prediction steps; 0 means everything after the handoff.
    Eigen::Index prediction_steps = 0;

    Eigen::Index effective_stride() const { return stride > 0 ? stride : t_batch; }
    void validate() const;  // throws config_error
};

struct BatchUq {
    Eigen::Index t0 = 0;        // offset of the batch within the prediction region
    double sigma2 = 0.0;        // scalar posterior variance
    double normalized = 0.0;    // sigma2 / prior marginal variance
    std::vector<bool> flags;    // one per threshold: normalized > threshold
    double max_error = 0.0;     // largest per-step error inside the batch (0 without truth)
};

struct UncertaintyReport {
    Eigen::Index t_batch = 0;
    Eigen::Index stride = 0;
    Eigen::Index n_prediction_steps = 0;
    Eigen::Index handoff_index = 0;
    double dt = 0.0;
    double t_start = 0.0;  // time of the first predicted sample
    std::vector<double> thresholds;
    double prior_variance = 0.0;
    double noise_precision = 0.0;
    std::vector<BatchUq> per_batch;
    std::vector<double> per_step_error;  // ||g_hat - g_true||_2 per step
    WindowCurve window_curve;            // single row for run_uq, filled by sweeps
};

struct BatchSolution {
    Eigen::MatrixXd x_hat;  // posterior means, one column per batch column
    double sigma2 = 0.0;    // mean of the per-column scalar posterior variances
};

// Solves each column of the batch as an independent linear inverse problem
// with the shared sensing model. Solver divergence is rethrown with the
// batch offset attached.
BatchSolution solve_batch_inverse(const predict::PredictionBatch& batch,
                                  const vamp::SensingModel& sensing, const UqConfig& cfg);

// Convenience overload building the sensing model from a raw matrix;
// cfg.noise_precision must then be set explicitly.
BatchSolution solve_batch_inverse(const predict::PredictionBatch& batch,
                                  const Eigen::MatrixXd& a, const UqConfig& cfg);

// Full pass: closed-loop rollout from the handoff point, batch formation,
// per-batch inverse solves, normalized-variance flags and per-step errors
// against the remaining truth.
UncertaintyReport run_uq(const koopman::KoopmanModel& model, const TimeSeriesData& truth,
                         const UqConfig& cfg);

// Uncertainty window per threshold: percentage of prediction steps lying in
// at least one flagged batch.
WindowRow uncertainty_window(const UncertaintyReport& report);

// Repeats run_uq at each batch size (stride = batch size) and collects the
// window percentages.
WindowCurve sweep_batch_sizes(const koopman::KoopmanModel& model, const TimeSeriesData& truth,
                              const UqConfig& cfg, const std::vector<Eigen::Index>& batch_sizes);

}  // namespace koopuq::uq
