#include "koopuq/koopman/snapshots.hpp"

#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::koopman {

SnapshotSet assemble_snapshots(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                               const LiftSpec& spec) {
    data.validate();
    cfg.validate();

    const Eigen::Index q = data.length();
    const Eigen::Index z = cfg.z;
    const Eigen::Index t_count = q - z - 1;
    if (t_count < 1)
        throw data_error("assemble_snapshots: series of length " + std::to_string(q) +
                         " is too short for z = " + std::to_string(z) +
                         "; need at least z + 2 samples");

    const Eigen::Index p = data.obs_dim();
    const Eigen::Index m = data.input_dim();
    const LiftEvaluator lift(spec, p, static_cast<Eigen::Index>(cfg.z) * (p + m));
    const Eigen::Index ell = lift.dim();

    SnapshotSet set;
    set.first_index = z;
    set.x.resize(p, t_count);
    set.x_plus.resize(p, t_count);
    set.u.resize(m, t_count);
    set.upsilon.resize(ell, t_count);
    set.upsilon_plus.resize(ell, t_count);

    // Lifted vectors for k = z .. q-1; column j of upsilon is entry j, of
    // upsilon_plus entry j + 1.
    Eigen::MatrixXd lifted(ell, t_count + 1);
    for (Eigen::Index j = 0; j <= t_count; ++j) {
        const Eigen::Index k = z + j;
        lifted.col(j) = lift(data.observables.col(k), build_delay_embedding(data, cfg, k));
    }

    for (Eigen::Index j = 0; j < t_count; ++j) {
        const Eigen::Index k = z + j;
        set.x.col(j) = data.observables.col(k);
        set.x_plus.col(j) = data.observables.col(k + 1);
        if (m > 0) set.u.col(j) = data.inputs.col(k);
        set.upsilon.col(j) = lifted.col(j);
        set.upsilon_plus.col(j) = lifted.col(j + 1);
    }
    return set;
}

}  // namespace koopuq::koopman
