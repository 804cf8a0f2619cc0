#pragma once

#include <Eigen/Dense>

namespace koopuq {

// Uniformly sampled trajectory data. Columns are time steps; sample k lives
// at time t0 + k*dt. `observables` holds g(x^k) (p rows), `inputs` holds u^k
// (m rows, zero rows for autonomous systems) and `states` optionally holds
// the full simulator state (empty when the data came from measurements).
struct TimeSeriesData {
    double dt = 0.0;
    double t0 = 0.0;
    Eigen::MatrixXd observables;  // p x q
    Eigen::MatrixXd inputs;       // m x q (m may be 0)
    Eigen::MatrixXd states;       // n x q, or 0 x 0 when not recorded

    Eigen::Index length() const { return observables.cols(); }
    Eigen::Index obs_dim() const { return observables.rows(); }
    Eigen::Index input_dim() const { return inputs.rows(); }
    bool has_states() const { return states.size() > 0; }
    double time(Eigen::Index k) const { return t0 + dt * static_cast<double>(k); }

    // Checks the column counts line up and dt is usable; throws data_error.
    void validate() const;

    // Copy of samples [start, start + count), with t0 shifted accordingly.
    TimeSeriesData slice(Eigen::Index start, Eigen::Index count) const;
};

}  // namespace koopuq
