#include "koopuq/sim/neuron.hpp"

#include <cmath>
#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::sim {

namespace {

// y / (exp(y) - 1), continued analytically through y = 0. The Bernoulli
// series keeps full precision where the direct quotient would lose it.
double expm1_ratio(double y) {
    if (std::abs(y) < 1e-4) return 1.0 - 0.5 * y + y * y / 12.0;
    return y / std::expm1(y);
}

// Derivative of expm1_ratio.
double expm1_ratio_d(double y) {
    if (std::abs(y) < 1e-4) return -0.5 + y / 6.0 - y * y * y / 180.0;
    const double em = std::expm1(y);
    return (em - y * std::exp(y)) / (em * em);
}

// Gates must stay inside [0, 1]; allow a hair of integrator slop beyond it.
constexpr double kGateTol = 1e-6;

}  // namespace

void NeuronParams::validate() const {
    if (!(c_m > 0.0)) throw koopuq::config_error("neuron: membrane capacitance must be positive");
    if (g_na < 0.0 || g_k < 0.0 || g_l < 0.0 || g_w < 0.0)
        throw koopuq::config_error("neuron: conductances must be non-negative");
    if (!(k != 0.0)) throw koopuq::config_error("neuron: adaptation slope k must be non-zero");
}

double alpha_m(double v) { return expm1_ratio(-0.1 * (v + 35.0)); }
double beta_m(double v) { return 4.0 * std::exp(-(v + 60.0) / 18.0); }
double alpha_n(double v) { return 0.1 * expm1_ratio(-0.1 * (v + 34.0)); }
double beta_n(double v) { return 0.125 * std::exp(-(v + 44.0) / 80.0); }
double alpha_q(double v) { return 0.07 * std::exp(-(v + 58.0) / 20.0); }
double beta_q(double v) { return 1.0 / (std::exp(-0.1 * (v + 28.0)) + 1.0); }
double m_inf(double v) {
    const double am = alpha_m(v);
    return am / (am + beta_m(v));
}

NeuronState neuron_rest_state(double v0, const NeuronParams& params) {
    NeuronState s;
    s.v = v0;
    s.q = alpha_q(v0) / (alpha_q(v0) + beta_q(v0));
    s.n = alpha_n(v0) / (alpha_n(v0) + beta_n(v0));
    s.w = 1.5 / (1.0 + std::exp((params.b - v0) / params.k));
    return s;
}

NeuronState neuron_limit_cycle_state() {
    // Sampled from a long default-parameter run after the transient decayed,
    // at an upward zero crossing of the voltage.
    NeuronState s;
    s.v = 0.0;
    s.q = 0.25838396747778319;
    s.n = 0.29242724651209751;
    s.w = 0.098177410775347779;
    return s;
}

Eigen::Vector4d neuron_rhs(const NeuronParams& p, const Eigen::Vector4d& x, double u) {
    const double v = x(0), q = x(1), n = x(2), w = x(3);
    const double minf = m_inf(v);
    const double m3 = minf * minf * minf;
    const double n4 = n * n * n * n;

    const double i_na = p.g_na * m3 * q * (v - p.e_na);
    const double i_k = p.g_k * n4 * (v - p.e_k);
    const double i_l = p.g_l * (v - p.e_l);
    const double i_w = p.g_w * w * (v - p.e_k);

    Eigen::Vector4d dx;
    dx(0) = (-i_na - i_k - i_l - i_w + u + p.i_b) / p.c_m;
    dx(1) = 5.0 * (alpha_q(v) * (1.0 - q) - beta_q(v) * q);
    dx(2) = 5.0 * (alpha_n(v) * (1.0 - n) - beta_n(v) * n);
    dx(3) = p.a * (1.5 / (1.0 + std::exp((p.b - v) / p.k)) - w);
    return dx;
}

Eigen::Matrix4d neuron_jacobian(const NeuronParams& p, const Eigen::Vector4d& x) {
    const double v = x(0), q = x(1), n = x(2), w = x(3);

    const double am = alpha_m(v);
    const double bm = beta_m(v);
    const double dam = -0.1 * expm1_ratio_d(-0.1 * (v + 35.0));
    const double dbm = -bm / 18.0;
    const double minf = am / (am + bm);
    const double dminf = (dam * bm - am * dbm) / ((am + bm) * (am + bm));

    const double an = alpha_n(v);
    const double bn = beta_n(v);
    const double dan = -0.01 * expm1_ratio_d(-0.1 * (v + 34.0));
    const double dbn = -bn / 80.0;

    const double aq = alpha_q(v);
    const double bq = beta_q(v);
    const double daq = -aq / 20.0;
    const double dbq = 0.1 * bq * (1.0 - bq);

    const double m3 = minf * minf * minf;
    const double n4 = n * n * n * n;
    const double sw = 1.5 / (1.0 + std::exp((p.b - v) / p.k));
    const double dsw = (sw / p.k) * (1.0 - sw / 1.5);

    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 0) = (-p.g_na * q * (3.0 * minf * minf * dminf * (v - p.e_na) + m3) -
               p.g_k * n4 - p.g_l - p.g_w * w) /
              p.c_m;
    j(0, 1) = -p.g_na * m3 * (v - p.e_na) / p.c_m;
    j(0, 2) = -4.0 * p.g_k * n * n * n * (v - p.e_k) / p.c_m;
    j(0, 3) = -p.g_w * (v - p.e_k) / p.c_m;

    j(1, 0) = 5.0 * (daq * (1.0 - q) - dbq * q);
    j(1, 1) = -5.0 * (aq + bq);

    j(2, 0) = 5.0 * (dan * (1.0 - n) - dbn * n);
    j(2, 2) = -5.0 * (an + bn);

    j(3, 0) = p.a * dsw;
    j(3, 3) = -p.a;
    return j;
}

namespace {

Eigen::Vector4d rk4_step(const NeuronParams& p, const Eigen::Vector4d& x, double t, double h,
                         const InputSignal& input) {
    const Eigen::Vector4d k1 = neuron_rhs(p, x, input(t));
    const Eigen::Vector4d k2 = neuron_rhs(p, x + 0.5 * h * k1, input(t + 0.5 * h));
    const Eigen::Vector4d k3 = neuron_rhs(p, x + 0.5 * h * k2, input(t + 0.5 * h));
    const Eigen::Vector4d k4 = neuron_rhs(p, x + h * k3, input(t + h));
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

TimeSeriesData simulate_neuron(const NeuronParams& params, const NeuronState& x0,
                               const InputSignal& input, double dt, Eigen::Index n_steps,
                               int substeps) {
    params.validate();
    if (!(dt > 0.0)) throw config_error("simulate_neuron: dt must be positive");
    if (n_steps < 0) throw config_error("simulate_neuron: n_steps must be non-negative");
    if (substeps < 1) throw config_error("simulate_neuron: substeps must be >= 1");
    if (!input) throw config_error("simulate_neuron: input signal is empty");

    const Eigen::Index q = n_steps + 1;
    TimeSeriesData out;
    out.dt = dt;
    out.observables.resize(2, q);
    out.inputs.resize(1, q);
    out.states.resize(4, q);

    const double h = dt / static_cast<double>(substeps);
    Eigen::Vector4d x = x0.vec();
    for (Eigen::Index ks = 0; ks <= n_steps; ++ks) {
        const double t = dt * static_cast<double>(ks);
        out.observables(0, ks) = x(0);
        out.observables(1, ks) = x(1);
        out.inputs(0, ks) = input(t);
        out.states.col(ks) = x;
        if (ks == n_steps) break;

        for (int s = 0; s < substeps; ++s)
            x = rk4_step(params, x, t + h * static_cast<double>(s), h, input);

        if (!x.allFinite())
            throw numeric_error("simulate_neuron: state diverged at step " + std::to_string(ks + 1));
        for (int gi = 1; gi <= 2; ++gi) {
            if (x(gi) < -kGateTol || x(gi) > 1.0 + kGateTol)
                throw data_error("simulate_neuron: gating variable left [0, 1] at step " +
                                 std::to_string(ks + 1) + "; reduce the step size");
        }
    }
    return out;
}

std::vector<double> spike_times(const TimeSeriesData& trajectory, double threshold) {
    trajectory.validate();
    std::vector<double> times;
    const auto& v = trajectory.observables;
    for (Eigen::Index k = 1; k < trajectory.length(); ++k) {
        const double v0 = v(0, k - 1), v1 = v(0, k);
        if (v0 < threshold && v1 >= threshold) {
            const double frac = (threshold - v0) / (v1 - v0);
            times.push_back(trajectory.time(k - 1) + frac * trajectory.dt);
        }
    }
    return times;
}

double mean_interspike_interval(const std::vector<double>& spikes) {
    if (spikes.size() < 2)
        throw data_error("mean_interspike_interval: need at least two spikes, got " +
                         std::to_string(spikes.size()));
    return (spikes.back() - spikes.front()) / static_cast<double>(spikes.size() - 1);
}

}  // namespace koopuq::sim
