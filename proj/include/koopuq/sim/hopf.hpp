#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "koopuq/types.hpp"

namespace koopuq::sim {

// Planar normal form of a Hopf bifurcation with shear and optional additive
// noise on the first coordinate. For mu > 0 the deterministic flow has a
// stable limit cycle of radius sqrt(mu); rho skews the angular speed with
// the distance from it.
struct HopfParams {
    double mu = 1.0;     // bifurcation parameter
    double rho = -0.1;   // shear coefficient
    double sigma = 0.3;  // radial relaxation rate
    double noise_d = 0.0;  // noise intensity D; 0 gives a deterministic flow

    void validate() const;  // throws config_error
};

struct HopfState {
    double x1 = 1.0;
    double x2 = 0.0;
};

// Deterministic right-hand side.
Eigen::Vector2d hopf_drift(const HopfParams& params, const Eigen::Vector2d& x);

// Integrates the system for n_steps of size dt, returning n_steps + 1 samples.
// The observable is x1 alone; full states are recorded, there are no inputs.
// With noise_d == 0 a fixed-step RK4 scheme is used; otherwise Euler-Maruyama
// with a N(0, 2*D*dt) increment on x1 each step, drawn from a generator
// seeded with `seed` so runs are reproducible.
TimeSeriesData simulate_hopf(const HopfParams& params, const HopfState& x0, double dt,
                             Eigen::Index n_steps, std::uint64_t seed = 0);

}  // namespace koopuq::sim
