#include "koopuq/koopman/model.hpp"

#include <string>

#include "koopuq/errors.hpp"
#include "koopuq/numeric/linalg.hpp"

namespace koopuq::koopman {

void FitOptions::validate() const {
    if (zeta < 0) throw config_error("fit: zeta must be non-negative");
    if (!(energy_target > 0.0 && energy_target <= 1.0))
        throw config_error("fit: energy_target must lie in (0, 1]");
    if (!(svd_cutoff > 0.0 && svd_cutoff < 1.0))
        throw config_error("fit: svd_cutoff must lie in (0, 1)");
}

Eigen::MatrixXd KoopmanModel::effective_operator() const {
    switch (mode) {
        case FitMode::linear_full:
            return op.topRows(p);
        case FitMode::nonlinear_full:
            return op;
        case FitMode::nonlinear_pod:
            return op * pod.phi.transpose();
    }
    throw numeric_error("model: unknown fit mode");
}

void KoopmanModel::validate() const {
    if (p < 1 || m < 0 || ell < 0) throw data_error("model: invalid dimensions");
    const Eigen::Index cols = mode == FitMode::nonlinear_pod ? pod.modes() : regressor_dim();
    const Eigen::Index rows = mode == FitMode::linear_full ? p + ell : p;
    if (op.rows() != rows || op.cols() != cols)
        throw data_error("model: operator is " + std::to_string(op.rows()) + "x" +
                         std::to_string(op.cols()) + ", expected " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    if (mode == FitMode::nonlinear_pod && pod.phi.rows() != regressor_dim())
        throw data_error("model: POD basis rows do not match the regressor dimension");
    embedding.validate();
    if (!(dt > 0.0)) throw data_error("model: dt must be positive");
}

namespace {

Eigen::MatrixXd stack_regressors(const SnapshotSet& snaps) {
    Eigen::MatrixXd r(snaps.x.rows() + snaps.u.rows() + snaps.upsilon.rows(), snaps.count());
    r.topRows(snaps.x.rows()) = snaps.x;
    if (snaps.u.rows() > 0) r.middleRows(snaps.x.rows(), snaps.u.rows()) = snaps.u;
    if (snaps.upsilon.rows() > 0) r.bottomRows(snaps.upsilon.rows()) = snaps.upsilon;
    return r;
}

}  // namespace

KoopmanModel fit_model(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                       const LiftSpec& spec, const FitOptions& opts) {
    opts.validate();
    const SnapshotSet snaps = assemble_snapshots(data, cfg, spec);
    const Eigen::MatrixXd regressors = stack_regressors(snaps);
    if (regressors.norm() == 0.0)
        throw data_error("fit: regressor stack is identically zero");

    KoopmanModel model;
    model.mode = opts.mode;
    model.embedding = cfg;
    model.lift = spec;
    model.dt = data.dt;
    model.p = snaps.x.rows();
    model.m = snaps.u.rows();
    model.ell = snaps.upsilon.rows();

    switch (opts.mode) {
        case FitMode::linear_full: {
            Eigen::MatrixXd targets(model.p + model.ell, snaps.count());
            targets.topRows(model.p) = snaps.x_plus;
            if (model.ell > 0) targets.bottomRows(model.ell) = snaps.upsilon_plus;
            model.op = numeric::lstsq_operator(targets, regressors, opts.svd_cutoff);
            break;
        }
        case FitMode::nonlinear_full:
            model.op = numeric::lstsq_operator(snaps.x_plus, regressors, opts.svd_cutoff);
            break;
        case FitMode::nonlinear_pod: {
            model.pod = opts.zeta > 0
                            ? compute_pod(snaps.x, snaps.u, snaps.upsilon, opts.zeta)
                            : compute_pod_energy(snaps.x, snaps.u, snaps.upsilon,
                                                 opts.energy_target);
            const Eigen::MatrixXd projected = model.pod.phi.transpose() * regressors;
            model.op = numeric::lstsq_operator(snaps.x_plus, projected, opts.svd_cutoff);
            break;
        }
    }

    // One-step observable residuals of the fitted operator on its own
    // training regressors, as a per-entry variance.
    const Eigen::MatrixXd residuals = snaps.x_plus - model.effective_operator() * regressors;
    model.training_residual_variance =
        residuals.squaredNorm() / static_cast<double>(residuals.size());
    return model;
}

}  // namespace koopuq::koopman
