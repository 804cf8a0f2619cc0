#include "koopuq/predict/batches.hpp"

#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::predict {

std::vector<PredictionBatch> make_batches(const RolloutResult& rollout_result,
                                          Eigen::Index t_batch, Eigen::Index stride) {
    if (t_batch < 1) throw config_error("make_batches: t_batch must be >= 1");
    if (stride < 1) throw config_error("make_batches: stride must be >= 1");

    const TimeSeriesData& pred = rollout_result.predicted;
    const Eigen::Index n = pred.observables.cols();
    if (t_batch > n)
        throw data_error("make_batches: t_batch of " + std::to_string(t_batch) +
                         " exceeds the rollout length of " + std::to_string(n));
    if (rollout_result.states.size() < static_cast<std::size_t>(n))
        throw data_error("make_batches: rollout is missing regressor states");

    const Eigen::Index p = pred.obs_dim();
    const Eigen::Index m = pred.input_dim();
    const Eigen::Index reg_dim = rollout_result.states.front().g.size() + m +
                                 rollout_result.states.front().upsilon.size();

    auto cut = [&](Eigen::Index start, Eigen::Index len) {
        PredictionBatch batch;
        batch.t0 = start;
        batch.y = pred.observables.middleCols(start, len);
        batch.x.resize(reg_dim, len);
        for (Eigen::Index i = 0; i < len; ++i) {
            const RolloutState& st = rollout_result.states[static_cast<std::size_t>(start + i)];
            batch.x.col(i).head(p) = st.g;
            if (m > 0) batch.x.col(i).segment(p, m) = pred.inputs.col(start + i);
            if (st.upsilon.size() > 0) batch.x.col(i).tail(st.upsilon.size()) = st.upsilon;
        }
        return batch;
    };

    // Full windows every `stride` steps, plus one covering tail window when
    // they stop short of the end.
    std::vector<PredictionBatch> batches;
    Eigen::Index covered = 0;
    Eigen::Index start = 0;
    for (; start + t_batch <= n; start += stride) {
        batches.push_back(cut(start, t_batch));
        covered = start + t_batch;
    }
    if (covered < n && start < n) batches.push_back(cut(start, n - start));
    return batches;
}

}  // namespace koopuq::predict
