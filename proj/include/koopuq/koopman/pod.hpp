#pragma once

#include <Eigen/Dense>

namespace koopuq::koopman {

// Proper orthogonal decomposition of the stacked snapshot matrix
// B = [X; U; Upsilon]. phi holds the leading modes (orthonormal columns),
// eigenvalues the corresponding eigenvalues of B * B^T in descending order,
// and energy_fraction the share of total energy the retained modes capture.
struct PodBasis {
    Eigen::MatrixXd phi;          // (p + m + L) x zeta
    Eigen::VectorXd eigenvalues;  // zeta entries
    double energy_fraction = 0.0;

    Eigen::Index modes() const { return phi.cols(); }
};

// Retain exactly zeta modes. Computed through the SVD of B rather than an
// eigendecomposition of B * B^T for numerical stability. Throws data_error
// when zeta exceeds the numerical rank of B (the message reports the rank).
PodBasis compute_pod(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                     const Eigen::MatrixXd& upsilon, Eigen::Index zeta);

// Retain the smallest number of modes whose energy fraction reaches
// energy_target (in (0, 1]).
PodBasis compute_pod_energy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& u,
                            const Eigen::MatrixXd& upsilon, double energy_target);

}  // namespace koopuq::koopman
