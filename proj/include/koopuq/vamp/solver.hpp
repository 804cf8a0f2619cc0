#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "koopuq/errors.hpp"
#include "koopuq/vamp/prior.hpp"
#include "koopuq/vamp/sensing.hpp"

namespace koopuq::vamp {

enum class LmmsePath {
    direct,  // dense (gamma_w A^T A + gamma_e I) inverse; reference path
    svd,     // same quantities via the cached SVD, O(N R) per call
};

struct LmmseResult {
    Eigen::VectorXd x_hat;
    double gamma_p = 0.0;
};

// Posterior mean and scalar posterior precision of x given y = A x + n and
// the Gaussian message x ~ N(x_hat_e, I / gamma_e). gamma_p is N over the
// trace of the posterior covariance. Throws numeric_error for gamma_e <= 0.
LmmseResult lmmse_estimate(const SensingModel& model, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& x_hat_e, double gamma_e,
                           LmmsePath path = LmmsePath::svd);

struct ExtrinsicResult {
    Eigen::VectorXd x_hat;
    double gamma = 0.0;
    bool clipped = false;  // raw precision fell at or below the floor
};

// Removes the incoming message from a posterior: gamma_out = gamma_p -
// gamma_e_in and x_hat_out = (gamma_p x_hat_p - gamma_e_in x_hat_e_in) /
// gamma_out. Non-Gaussian denoisers can push gamma_out to or below zero;
// it is then clipped to `floor` (and the clipped value used in the mean's
// denominator) with the flag set.
ExtrinsicResult extrinsic_update(double gamma_p, const Eigen::VectorXd& x_hat_p,
                                 double gamma_e_in, const Eigen::VectorXd& x_hat_e_in,
                                 double floor = 1e-11);

struct VampOptions {
    int max_iters = 50;
    double damping = 0.9;  // convex-combination factor on extrinsic pairs; 1 = off
    double tol = 1e-8;     // relative change of the denoiser mean
    double precision_floor = 1e-11;
    LmmsePath path = LmmsePath::svd;
    Eigen::VectorXd init_mean;    // empty: prior marginal mean
    double init_precision = 0.0;  // <= 0: inverse prior marginal variance

    void validate() const;
};

// Message-passing state between the two estimators.
struct VampState {
    Eigen::VectorXd x_hat_e_plus;   // extrinsic mean into the denoiser
    double gamma_e_plus = 0.0;
    Eigen::VectorXd x_hat_e_minus;  // extrinsic mean into the LMMSE step
    double gamma_e_minus = 0.0;
    int iteration = 0;
};

struct VampIterate {
    int iteration = 0;
    double gamma_p_plus = 0.0;   // denoiser posterior precision
    double gamma_p_minus = 0.0;  // LMMSE posterior precision
    double gamma_e_plus = 0.0;   // extrinsic precisions after damping
    double gamma_e_minus = 0.0;
    double alpha = 0.0;
    double delta = 0.0;          // relative change of the denoiser mean
    bool clipped_minus = false;
    bool clipped_plus = false;
};

struct VampResult {
    Eigen::VectorXd x_hat;            // posterior mean from the final denoiser step
    double posterior_variance = 0.0;  // 1 / gamma_p of that step
    std::vector<VampIterate> trace;
    bool converged = false;
    int iterations_run = 0;
};

// Thrown when a message stops being finite; carries the work so far.
class vamp_diverged : public numeric_error {
public:
    vamp_diverged(const std::string& what, VampResult partial);
    const VampResult& partial() const { return partial_; }

private:
    VampResult partial_;
};

// Alternates MMSE denoising under the prior with LMMSE estimation under the
// measurement model, exchanging damped extrinsic messages, until the
// denoiser mean settles or max_iters is reached.
VampResult vamp_solve(const SensingModel& model, const Eigen::VectorXd& y,
                      const PriorSpec& prior, const VampOptions& opts = {});

// Per-iteration scalars as CSV, one row per iterate, for convergence plots.
void write_trace_csv(std::ostream& os, const VampResult& result);

}  // namespace koopuq::vamp
