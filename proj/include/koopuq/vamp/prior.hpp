#pragma once

#include <Eigen/Dense>

namespace koopuq::vamp {

enum class PriorKind { gaussian, bernoulli_gaussian };

// Separable prior on the unknown vector: either N(mean, variance) per entry
// or the spike-and-slab mixture (1-rho)*delta_0 + rho*N(mean, variance).
// sparsity_rho = 1 reduces the mixture to the plain Gaussian.
struct PriorSpec {
    PriorKind kind = PriorKind::gaussian;
    double mean = 0.0;
    double variance = 1.0;
    double sparsity_rho = 1.0;

    static PriorSpec gaussian_prior(double mean, double variance);
    // active_variance <= 0 picks the default 1/rho, which gives the mixture
    // unit signal power for mean 0.
    static PriorSpec bernoulli_gaussian_prior(double rho, double mean = 0.0,
                                              double active_variance = 0.0);

    // Mean and variance of one marginal draw (mixture moments for the
    // Bernoulli-Gaussian case); used to initialize the solver.
    double marginal_mean() const;
    double marginal_variance() const;

    void validate() const;  // throws config_error
};

struct DenoiseResult {
    Eigen::VectorXd x_hat;  // componentwise posterior mean
    double alpha = 0.0;     // mean diagonal of d x_hat / d r
    double gamma_p = 0.0;   // posterior precision, gamma / alpha
};

// Componentwise MMSE estimate of x from the pseudo-observation r = x + e,
// e ~ N(0, 1/gamma), under the given prior. Throws numeric_error for
// gamma <= 0.
DenoiseResult denoise_mmse(const PriorSpec& prior, const Eigen::VectorXd& r, double gamma);

}  // namespace koopuq::vamp
