#pragma once

#include <Eigen/Dense>

#include "koopuq/koopman/embedding.hpp"
#include "koopuq/koopman/lift.hpp"
#include "koopuq/koopman/pod.hpp"
#include "koopuq/koopman/snapshots.hpp"
#include "koopuq/types.hpp"

namespace koopuq::koopman {

enum class FitMode {
    linear_full,     // propagate [g; upsilon] jointly: operator (p+L) x (p+L+m)
    nonlinear_full,  // predict g only, lift re-evaluated each step: p x (p+L+m)
    nonlinear_pod,   // like nonlinear_full but regressors projected on POD modes: p x zeta
};

struct FitOptions {
    FitMode mode = FitMode::nonlinear_pod;
    Eigen::Index zeta = 0;         // POD modes to keep; 0 picks by energy_target
    double energy_target = 0.9999;
    double svd_cutoff = 1e-10;     // relative singular value cutoff in least squares

    void validate() const;
};

// Identified one-step model. The operator acts on the stacked regressor
// [g; u; upsilon] (or its POD projection) and returns the next observable
// (plus the next lifted vector in linear_full mode).
struct KoopmanModel {
    FitMode mode = FitMode::nonlinear_full;
    Eigen::MatrixXd op;
    PodBasis pod;              // populated in nonlinear_pod mode only
    EmbeddingConfig embedding;
    LiftSpec lift;
    double dt = 0.0;
    Eigen::Index p = 0, m = 0, ell = 0;
    // Per-entry variance of the one-step observable residuals on the
    // training data; the default measurement precision in downstream UQ.
    double training_residual_variance = 0.0;

    Eigen::Index regressor_dim() const { return p + m + ell; }

    // The p x (p + m + L) map from a raw regressor stack to the next
    // observable, with the POD projection folded in where applicable.
    Eigen::MatrixXd effective_operator() const;

    void validate() const;  // structural shape checks; throws data_error
};

// Least-squares fit of the chosen operator on the snapshot matrices of
// `data`. Throws data_error when the regressor stack is identically zero or
// the series is too short.
KoopmanModel fit_model(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                       const LiftSpec& spec, const FitOptions& opts);

}  // namespace koopuq::koopman
