#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "koopuq/types.hpp"

namespace koopuq::sim {

// Single-compartment spiking neuron with sodium, delayed-rectifier potassium,
// leak and slow adaptation currents. State is (V, q, n, w): membrane voltage,
// sodium inactivation gate, potassium activation gate and adaptation variable.
// Sodium activation is slaved to its voltage-dependent steady state m_inf(V).
struct NeuronParams {
    double c_m = 1.0;    // membrane capacitance, uF/cm^2
    double g_na = 35.0;  // maximal conductances, mS/cm^2
    double g_k = 9.0;
    double g_l = 0.1;
    double g_w = 2.0;    // adaptation conductance (potassium reversal)
    double e_na = 55.0;  // reversal potentials, mV
    double e_k = -90.0;
    double e_l = -65.0;
    double i_b = 10.0;   // constant bias current, uA/cm^2
    double a = 0.02;     // adaptation rate, 1/ms
    double b = -5.0;     // adaptation half-activation voltage, mV
    double k = 0.5;      // adaptation activation slope, mV

    void validate() const;  // throws config_error on non-physical values
};

struct NeuronState {
    double v = -65.0;
    double q = 0.8;
    double n = 0.08;
    double w = 0.0;

    Eigen::Vector4d vec() const { return {v, q, n, w}; }
    static NeuronState from_vec(const Eigen::Vector4d& x) { return {x(0), x(1), x(2), x(3)}; }
};

// Voltage-dependent gating rates (1/ms). The alpha_m and alpha_n expressions
// have removable singularities that are handled analytically.
double alpha_m(double v);
double beta_m(double v);
double alpha_n(double v);
double beta_n(double v);
double alpha_q(double v);
double beta_q(double v);
double m_inf(double v);

// State with the gates at their steady-state values for voltage v0 and w at
// its voltage-dependent equilibrium. A convenient quiescent initial condition.
NeuronState neuron_rest_state(double v0 = -65.0, const NeuronParams& params = {});

// A point on the periodic spiking orbit of the default parameter set with
// zero external input. Starting here removes the initial transient, so spike
// statistics are stationary from t = 0.
NeuronState neuron_limit_cycle_state();

// Right-hand side dx/dt for state x = (V, q, n, w) and external current u.
Eigen::Vector4d neuron_rhs(const NeuronParams& params, const Eigen::Vector4d& x, double u);

// Jacobian of neuron_rhs with respect to the state, evaluated analytically.
Eigen::Matrix4d neuron_jacobian(const NeuronParams& params, const Eigen::Vector4d& x);

using InputSignal = std::function<double(double)>;

// Fixed-step fourth-order Runge-Kutta integration. The returned series has
// n_steps + 1 samples spaced dt apart; each sampling interval is subdivided
// into `substeps` internal steps. Observables are (V, q), inputs the applied
// current, and the full state is recorded as well. Throws numeric_error if
// the state stops being finite and data_error if a gate leaves [0, 1].
TimeSeriesData simulate_neuron(const NeuronParams& params, const NeuronState& x0,
                               const InputSignal& input, double dt, Eigen::Index n_steps,
                               int substeps = 1);

// Times of upward threshold crossings of the voltage trace, located by linear
// interpolation between samples.
std::vector<double> spike_times(const TimeSeriesData& trajectory, double threshold = 0.0);

// Mean interval between consecutive spikes. Throws data_error given < 2 spikes.
double mean_interspike_interval(const std::vector<double>& spikes);

}  // namespace koopuq::sim
