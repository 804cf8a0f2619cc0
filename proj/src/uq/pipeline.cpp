#include "koopuq/uq/pipeline.hpp"

#include <cmath>
#include <string>

#include "koopuq/errors.hpp"
#include "koopuq/predict/rollout.hpp"

namespace koopuq::uq {

void UqConfig::validate() const {
    if (t_batch < 1) throw config_error("uq: t_batch must be >= 1");
    if (stride < 0) throw config_error("uq: stride must be >= 0");
    if (thresholds.empty()) throw config_error("uq: at least one threshold required");
    double prev = 0.0;
    for (double th : thresholds) {
        if (!(th > 0.0 && th < 1.0))
            throw config_error("uq: thresholds must lie in (0, 1), got " + std::to_string(th));
        if (th <= prev) throw config_error("uq: thresholds must be strictly increasing");
        prev = th;
    }
    prior.validate();
    if (noise_precision < 0.0) throw config_error("uq: noise_precision must be >= 0");
    vamp_opts.validate();
    if (handoff_index < -1) throw config_error("uq: handoff_index must be >= -1");
    if (prediction_steps < 0) throw config_error("uq: prediction_steps must be >= 0");
}

BatchSolution solve_batch_inverse(const predict::PredictionBatch& batch,
                                  const vamp::SensingModel& sensing, const UqConfig& cfg) {
    cfg.validate();
    if (sensing.cols() != batch.x.rows())
        throw data_error("solve_batch_inverse: sensing matrix has " +
                         std::to_string(sensing.cols()) + " columns, regressors have " +
                         std::to_string(batch.x.rows()) + " rows");
    if (batch.length() < 1) throw data_error("solve_batch_inverse: empty batch");

    BatchSolution solution;
    solution.x_hat.resize(batch.x.rows(), batch.length());
    double variance_sum = 0.0;
    for (Eigen::Index col = 0; col < batch.length(); ++col) {
        try {
            const vamp::VampResult res =
                vamp::vamp_solve(sensing, batch.y.col(col), cfg.prior, cfg.vamp_opts);
            solution.x_hat.col(col) = res.x_hat;
            variance_sum += res.posterior_variance;
        } catch (const vamp::vamp_diverged& e) {
            throw numeric_error("batch at offset " + std::to_string(batch.t0) + ", column " +
                                std::to_string(col) + ": " + e.what());
        }
    }
    solution.sigma2 = variance_sum / static_cast<double>(batch.length());
    return solution;
}

BatchSolution solve_batch_inverse(const predict::PredictionBatch& batch,
                                  const Eigen::MatrixXd& a, const UqConfig& cfg) {
    if (!(cfg.noise_precision > 0.0))
        throw config_error("solve_batch_inverse: explicit noise_precision required "
                           "when passing a raw sensing matrix");
    return solve_batch_inverse(batch, vamp::SensingModel(a, cfg.noise_precision), cfg);
}

UncertaintyReport run_uq(const koopman::KoopmanModel& model, const TimeSeriesData& truth,
                         const UqConfig& cfg) {
    cfg.validate();
    model.validate();
    truth.validate();

    const Eigen::Index z = model.embedding.z;
    const Eigen::Index handoff = cfg.handoff_index >= 0 ? cfg.handoff_index : z;
    if (handoff < z)
        throw config_error("uq: handoff_index " + std::to_string(handoff) +
                           " leaves less than z = " + std::to_string(z) + " history samples");
    const Eigen::Index available = truth.length() - 1 - handoff;
    if (available < 1)
        throw data_error("uq: no prediction steps after handoff index " +
                         std::to_string(handoff));
    const Eigen::Index n_steps =
        cfg.prediction_steps > 0 ? std::min(cfg.prediction_steps, available) : available;

    // Closed-loop rollout from the handoff, fed the recorded inputs.
    const TimeSeriesData warmup = truth.slice(0, handoff + 1);
    Eigen::MatrixXd future_inputs(model.m, n_steps);
    if (model.m > 0) future_inputs = truth.inputs.middleCols(handoff, n_steps);
    const predict::RolloutResult rolled = predict::rollout(model, warmup, future_inputs, n_steps);

    const double gamma_w = cfg.noise_precision > 0.0
                               ? cfg.noise_precision
                               : 1.0 / model.training_residual_variance;
    if (!(gamma_w > 0.0) || !std::isfinite(gamma_w))
        throw config_error("uq: no usable noise precision (training residuals are zero "
                           "and no override was given)");

    // One sensing matrix for every batch: the same effective operator the
    // rollout stepped with, so Y = A X holds exactly.
    const vamp::SensingModel sensing(model.effective_operator(), gamma_w);

    UncertaintyReport report;
    report.t_batch = cfg.t_batch;
    report.stride = cfg.effective_stride();
    report.n_prediction_steps = n_steps;
    report.handoff_index = handoff;
    report.dt = truth.dt;
    report.t_start = rolled.predicted.t0;
    report.thresholds = cfg.thresholds;
    report.prior_variance = cfg.prior.marginal_variance();
    report.noise_precision = gamma_w;

    report.per_step_error.resize(n_steps);
    for (Eigen::Index j = 0; j < n_steps; ++j)
        report.per_step_error[j] =
            (rolled.predicted.observables.col(j) - truth.observables.col(handoff + 1 + j)).norm();

    const auto batches = predict::make_batches(rolled, cfg.t_batch, report.stride);
    for (const auto& batch : batches) {
        const BatchSolution sol = solve_batch_inverse(batch, sensing, cfg);
        BatchUq entry;
        entry.t0 = batch.t0;
        entry.sigma2 = sol.sigma2;
        entry.normalized = sol.sigma2 / report.prior_variance;
        entry.flags.reserve(cfg.thresholds.size());
        for (double th : cfg.thresholds) entry.flags.push_back(entry.normalized > th);
        for (Eigen::Index i = 0; i < batch.length(); ++i)
            entry.max_error = std::max(entry.max_error,
                                       report.per_step_error[static_cast<std::size_t>(batch.t0 + i)]);
        report.per_batch.push_back(std::move(entry));
    }

    report.window_curve[cfg.t_batch] = uncertainty_window(report);
    return report;
}

WindowRow uncertainty_window(const UncertaintyReport& report) {
    const Eigen::Index n = report.n_prediction_steps;
    WindowRow row;
    for (std::size_t ti = 0; ti < report.thresholds.size(); ++ti) {
        // A step counts when any flagged batch covers it.
        std::vector<bool> flagged(static_cast<std::size_t>(n), false);
        for (const auto& batch : report.per_batch) {
            if (!batch.flags[ti]) continue;
            const Eigen::Index len =
                std::min(report.t_batch, n - batch.t0);  // tail batches are shorter
            for (Eigen::Index i = 0; i < len; ++i)
                flagged[static_cast<std::size_t>(batch.t0 + i)] = true;
        }
        Eigen::Index count = 0;
        for (bool f : flagged) count += f ? 1 : 0;
        row[report.thresholds[ti]] =
            100.0 * static_cast<double>(count) / static_cast<double>(n);
    }
    return row;
}

WindowCurve sweep_batch_sizes(const koopman::KoopmanModel& model, const TimeSeriesData& truth,
                              const UqConfig& cfg, const std::vector<Eigen::Index>& batch_sizes) {
    if (batch_sizes.empty()) throw config_error("sweep: no batch sizes given");
    WindowCurve curve;
    for (Eigen::Index size : batch_sizes) {
        if (size < 1) throw config_error("sweep: batch sizes must be >= 1");
        UqConfig sized = cfg;
        sized.t_batch = size;
        sized.stride = 0;  // disjoint partition per sweep point
        curve[size] = run_uq(model, truth, sized).window_curve.at(size);
    }
    return curve;
}

}  // namespace koopuq::uq
