#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "koopuq/sim/neuron.hpp"
#include "koopuq/types.hpp"

namespace koopuq::sim {

// Finite-time Lyapunov exponent series. lambda[j] is the exponent at
// times[j], measured over the window ending there.
struct FtleSeries {
    double window = 0.0;
    std::vector<double> times;
    std::vector<double> lambda;
};

// Jacobian of the linearized dynamics as a function of time.
using JacobianSource = std::function<Eigen::MatrixXd(double)>;

// For each sample time t >= t0 + window, integrates the variational equation
// dPsi/dt = J(t) Psi over [t - window, t] with Psi(t - window) = I (fixed-step
// RK4 on the dt grid) and returns (1 / window) * log of the largest singular
// value of Psi restricted to the columns in `directions`, i.e. the maximal
// exponential growth rate of perturbations seeded in those coordinates.
FtleSeries compute_ftle(const JacobianSource& jacobian, Eigen::Index state_dim, double t0,
                        double dt, Eigen::Index n_samples, double window,
                        const std::vector<Eigen::Index>& directions);

// Same, with the Jacobian evaluated along a simulated neuron trajectory
// (states required; linear interpolation between samples for RK4 midpoints).
// Default directions are the observed coordinates V and q.
FtleSeries compute_neuron_ftle(const NeuronParams& params, const TimeSeriesData& trajectory,
                               double window, const std::vector<Eigen::Index>& directions = {0, 1});

}  // namespace koopuq::sim
