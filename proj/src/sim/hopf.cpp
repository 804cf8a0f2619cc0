#include "koopuq/sim/hopf.hpp"

#include <cmath>
#include <random>
#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::sim {

void HopfParams::validate() const {
    if (!(sigma > 0.0)) throw config_error("hopf: sigma must be positive");
    if (noise_d < 0.0) throw config_error("hopf: noise intensity D must be non-negative");
}

Eigen::Vector2d hopf_drift(const HopfParams& p, const Eigen::Vector2d& x) {
    const double r2 = x.squaredNorm();
    const double radial = p.sigma * (p.mu - r2);
    const double angular = 1.0 + p.rho * (r2 - p.mu);
    return {radial * x(0) - angular * x(1), radial * x(1) + angular * x(0)};
}

namespace {

Eigen::Vector2d rk4_step(const HopfParams& p, const Eigen::Vector2d& x, double h) {
    const Eigen::Vector2d k1 = hopf_drift(p, x);
    const Eigen::Vector2d k2 = hopf_drift(p, x + 0.5 * h * k1);
    const Eigen::Vector2d k3 = hopf_drift(p, x + 0.5 * h * k2);
    const Eigen::Vector2d k4 = hopf_drift(p, x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TimeSeriesData simulate_hopf(const HopfParams& params, const HopfState& x0, double dt,
                             Eigen::Index n_steps, std::uint64_t seed) {
    params.validate();
    if (!(dt > 0.0)) throw config_error("simulate_hopf: dt must be positive");
    if (n_steps < 0) throw config_error("simulate_hopf: n_steps must be non-negative");

    TimeSeriesData out;
    out.dt = dt;
    out.observables.resize(1, n_steps + 1);
    out.inputs.resize(0, n_steps + 1);
    out.states.resize(2, n_steps + 1);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool stochastic = params.noise_d > 0.0;
    const double noise_scale = std::sqrt(2.0 * params.noise_d * dt);

    Eigen::Vector2d x(x0.x1, x0.x2);
    for (Eigen::Index k = 0; k <= n_steps; ++k) {
        out.observables(0, k) = x(0);
        out.states.col(k) = x;
        if (k == n_steps) break;

        if (stochastic) {
            const Eigen::Vector2d drift = hopf_drift(params, x);
            x += dt * drift;
            x(0) += noise_scale * gauss(rng);
        } else {
            x = rk4_step(params, x, dt);
        }
        if (!x.allFinite())
            throw numeric_error("simulate_hopf: state diverged at step " + std::to_string(k + 1));
    }
    return out;
}

}  // namespace koopuq::sim
