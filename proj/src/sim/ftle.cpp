#include "koopuq/sim/ftle.hpp"

#include <cmath>
#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::sim {

FtleSeries compute_ftle(const JacobianSource& jacobian, Eigen::Index state_dim, double t0,
                        double dt, Eigen::Index n_samples, double window,
                        const std::vector<Eigen::Index>& directions) {
    if (!jacobian) throw config_error("compute_ftle: jacobian source is empty");
    if (state_dim < 1) throw config_error("compute_ftle: state_dim must be >= 1");
    if (!(dt > 0.0)) throw config_error("compute_ftle: dt must be positive");
    if (directions.empty()) throw config_error("compute_ftle: no perturbation directions given");
    for (Eigen::Index d : directions)
        if (d < 0 || d >= state_dim)
            throw config_error("compute_ftle: direction " + std::to_string(d) +
                               " outside state dimension " + std::to_string(state_dim));

    const auto steps = static_cast<Eigen::Index>(std::llround(window / dt));
    if (steps < 1) throw config_error("compute_ftle: window must cover at least one step");
    if (steps > n_samples - 1)
        throw data_error("compute_ftle: window of " + std::to_string(steps) +
                         " steps exceeds the " + std::to_string(n_samples) + "-sample series");

    FtleSeries out;
    out.window = window;
    const auto n_dir = static_cast<Eigen::Index>(directions.size());
    const double nu = dt * static_cast<double>(steps);

    for (Eigen::Index i = steps; i < n_samples; ++i) {
        // RK4 on the matrix equation Psi' = J(t) Psi over the window.
        Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(state_dim, state_dim);
        for (Eigen::Index s = i - steps; s < i; ++s) {
            const double t = t0 + dt * static_cast<double>(s);
            const Eigen::MatrixXd j1 = jacobian(t);
            const Eigen::MatrixXd jm = jacobian(t + 0.5 * dt);
            const Eigen::MatrixXd j2 = jacobian(t + dt);
            const Eigen::MatrixXd k1 = j1 * psi;
            const Eigen::MatrixXd k2 = jm * (psi + 0.5 * dt * k1);
            const Eigen::MatrixXd k3 = jm * (psi + 0.5 * dt * k2);
            const Eigen::MatrixXd k4 = j2 * (psi + dt * k3);
            psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!psi.allFinite())
            throw numeric_error("compute_ftle: variational state diverged at t = " +
                                std::to_string(t0 + dt * static_cast<double>(i)));

        Eigen::MatrixXd sub(state_dim, n_dir);
        for (Eigen::Index c = 0; c < n_dir; ++c) sub.col(c) = psi.col(directions[c]);
        const double sigma = sub.jacobiSvd().singularValues()(0);
        out.times.push_back(t0 + dt * static_cast<double>(i));
        out.lambda.push_back(std::log(sigma) / nu);
    }
    return out;
}

FtleSeries compute_neuron_ftle(const NeuronParams& params, const TimeSeriesData& trajectory,
                               double window, const std::vector<Eigen::Index>& directions) {
    trajectory.validate();
    if (!trajectory.has_states())
        throw data_error("compute_neuron_ftle: trajectory carries no state samples");
    params.validate();

    const auto& st = trajectory.states;
    const double dt = trajectory.dt;
    const double t0 = trajectory.t0;
    const Eigen::Index q = trajectory.length();

    JacobianSource jac = [&params, &st, dt, t0, q](double t) {
        // Linear interpolation of the state between samples.
        double pos = (t - t0) / dt;
        if (pos < 0.0) pos = 0.0;
        const auto k = std::min(static_cast<Eigen::Index>(pos), q - 2);
        const double frac = std::min(pos - static_cast<double>(k), 1.0);
        const Eigen::Vector4d x = (1.0 - frac) * st.col(k) + frac * st.col(k + 1);
        return Eigen::MatrixXd(neuron_jacobian(params, x));
    };
    return compute_ftle(jac, st.rows(), t0, dt, q, window, directions);
}

}  // namespace koopuq::sim
