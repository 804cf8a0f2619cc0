#include "koopuq/predict/rollout.hpp"

#include <string>

#include "koopuq/errors.hpp"
#include "koopuq/koopman/embedding.hpp"

namespace koopuq::predict {

RolloutResult rollout(const koopman::KoopmanModel& model, const TimeSeriesData& warmup,
                      const Eigen::MatrixXd& future_inputs, Eigen::Index n_steps,
                      const RolloutOptions& opts) {
    model.validate();
    warmup.validate();
    const Eigen::Index z = model.embedding.z;
    if (warmup.length() < z + 1)
        throw data_error("rollout: warmup has " + std::to_string(warmup.length()) +
                         " samples, need at least z + 1 = " + std::to_string(z + 1));
    if (warmup.obs_dim() != model.p)
        throw data_error("rollout: warmup observable dimension " +
                         std::to_string(warmup.obs_dim()) + " does not match the model's " +
                         std::to_string(model.p));
    if (warmup.input_dim() != model.m)
        throw data_error("rollout: warmup input dimension does not match the model");
    if (n_steps < 0) throw config_error("rollout: n_steps must be non-negative");
    if (model.m > 0 && (future_inputs.rows() != model.m || future_inputs.cols() < n_steps))
        throw data_error("rollout: future inputs must be " + std::to_string(model.m) + " x " +
                         std::to_string(n_steps));
    if (opts.resync_period < 0) throw config_error("rollout: resync_period must be >= 0");
    if (opts.resync_period > 0) {
        if (opts.truth == nullptr)
            throw config_error("rollout: resync requested without a truth series");
        if (opts.truth->obs_dim() != model.p || opts.truth->length() < n_steps)
            throw data_error("rollout: truth series does not cover the prediction range");
    }

    const koopman::LiftEvaluator lift(model.lift, model.p, z * (model.p + model.m));
    // One effective operator instance for the whole rollout, so downstream
    // consumers reusing it see bit-identical products.
    const Eigen::MatrixXd a_eff = model.effective_operator();

    const Eigen::Index handoff = warmup.length() - 1;
    koopman::DelayBuffer history =
        koopman::DelayBuffer::from_series(warmup, model.embedding, handoff);

    RolloutResult result;
    result.predicted.dt = model.dt;
    result.predicted.t0 = warmup.time(handoff) + model.dt;
    result.predicted.observables.resize(model.p, n_steps);
    result.predicted.inputs.resize(model.m, n_steps);

    RolloutState state;
    state.k = 0;
    state.g = warmup.observables.col(handoff);
    state.h = history.vector();
    state.upsilon = lift(state.g, state.h);
    result.states.reserve(n_steps + 1);
    result.states.push_back(state);

    Eigen::VectorXd regressor(model.regressor_dim());
    for (Eigen::Index j = 0; j < n_steps; ++j) {
        const Eigen::VectorXd u = model.m > 0 ? Eigen::VectorXd(future_inputs.col(j))
                                              : Eigen::VectorXd(0);
        regressor.head(model.p) = state.g;
        if (model.m > 0) regressor.segment(model.p, model.m) = u;
        if (model.ell > 0) regressor.tail(model.ell) = state.upsilon;

        const Eigen::VectorXd g_next = a_eff * regressor;
        if (!g_next.allFinite())
            throw numeric_error("rollout: forecast diverged at step " + std::to_string(j + 1));

        result.predicted.observables.col(j) = g_next;
        if (model.m > 0) result.predicted.inputs.col(j) = u;

        // Advance the regressor state, optionally resynchronizing on truth.
        Eigen::VectorXd g_new = g_next;
        if (opts.resync_period > 0 && (j + 1) % opts.resync_period == 0)
            g_new = opts.truth->observables.col(j);
        history.push(state.g, u);
        state.g = g_new;
        state.h = history.vector();
        state.upsilon = lift(state.g, state.h);
        state.k = j + 1;
        result.states.push_back(state);
    }
    return result;
}

}  // namespace koopuq::predict
