#include "koopuq/vamp/prior.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::vamp {

PriorSpec PriorSpec::gaussian_prior(double mean, double variance) {
    PriorSpec spec;
    spec.kind = PriorKind::gaussian;
    spec.mean = mean;
    spec.variance = variance;
    spec.sparsity_rho = 1.0;
    spec.validate();
    return spec;
}

PriorSpec PriorSpec::bernoulli_gaussian_prior(double rho, double mean, double active_variance) {
    PriorSpec spec;
    spec.kind = PriorKind::bernoulli_gaussian;
    spec.mean = mean;
    spec.variance = active_variance > 0.0 ? active_variance : 1.0 / rho;
    spec.sparsity_rho = rho;
    spec.validate();
    return spec;
}

double PriorSpec::marginal_mean() const {
    return kind == PriorKind::gaussian ? mean : sparsity_rho * mean;
}

double PriorSpec::marginal_variance() const {
    if (kind == PriorKind::gaussian) return variance;
    const double second_moment = sparsity_rho * (variance + mean * mean);
    const double first_moment = sparsity_rho * mean;
    return second_moment - first_moment * first_moment;
}

void PriorSpec::validate() const {
    if (!(variance > 0.0))
        throw config_error("prior: variance must be positive, got " + std::to_string(variance));
    if (!(sparsity_rho > 0.0 && sparsity_rho <= 1.0))
        throw config_error("prior: sparsity_rho must lie in (0, 1], got " +
                           std::to_string(sparsity_rho));
    if (!std::isfinite(mean)) throw config_error("prior: mean must be finite");
}

namespace {

double log_normal_pdf(double x, double mu, double var) {
    const double d = x - mu;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

}  // namespace

DenoiseResult denoise_mmse(const PriorSpec& prior, const Eigen::VectorXd& r, double gamma) {
    prior.validate();
    if (!(gamma > 0.0))
        throw numeric_error("denoise_mmse: precision must be positive, got " +
                            std::to_string(gamma));

    DenoiseResult out;
    const double v = prior.variance;
    const double m = prior.mean;

    if (prior.kind == PriorKind::gaussian || prior.sparsity_rho >= 1.0) {
        // Conjugate Gaussian update; the Jacobian diagonal is constant.
        out.x_hat = (gamma * r.array() + m / v) / (gamma + 1.0 / v);
        out.alpha = gamma / (gamma + 1.0 / v);
        out.gamma_p = gamma / out.alpha;
        return out;
    }

    // Spike-and-slab: responsibility-weighted conjugate mean. The Jacobian
    // diagonal equals gamma times the posterior variance, averaged.
    const double rho = prior.sparsity_rho;
    const double t = 1.0 / gamma;
    const double va = 1.0 / (gamma + 1.0 / v);
    const double log_odds_prior = std::log(rho) - std::log1p(-rho);

    out.x_hat.resize(r.size());
    double alpha_sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double ri = r(i);
        const double xa = va * (gamma * ri + m / v);
        const double xi =
            log_odds_prior + log_normal_pdf(ri, m, v + t) - log_normal_pdf(ri, 0.0, t);
        const double pi = 1.0 / (1.0 + std::exp(-xi));
        out.x_hat(i) = pi * xa;
        const double post_var = pi * va + pi * (1.0 - pi) * xa * xa;
        alpha_sum += gamma * post_var;
    }
    out.alpha = alpha_sum / static_cast<double>(r.size());
    out.gamma_p = gamma / out.alpha;
    return out;
}

}  // namespace koopuq::vamp
