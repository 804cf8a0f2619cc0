#pragma once

#include <Eigen/Dense>

#include "koopuq/koopman/embedding.hpp"
#include "koopuq/koopman/lift.hpp"
#include "koopuq/types.hpp"

namespace koopuq::koopman {

// Aligned snapshot matrices over the usable range of a series. Column j
// corresponds to sample k = first_index + j of the source data:
//   x       column j: g^k            x_plus       column j: g^{k+1}
//   u       column j: u^k            upsilon      column j: lift(g^k, h^k)
//                                    upsilon_plus column j: lift(g^{k+1}, h^{k+1})
struct SnapshotSet {
    Eigen::MatrixXd x, x_plus;             // p x T
    Eigen::MatrixXd u;                     // m x T
    Eigen::MatrixXd upsilon, upsilon_plus; // L x T
    Eigen::Index first_index = 0;

    Eigen::Index count() const { return x.cols(); }
};

// Builds the matrices for k = z .. q-2 (T = q - z - 1 columns); the first z
// samples only seed histories and the last sample only appears shifted.
// Throws data_error when the series is too short (q < z + 2).
SnapshotSet assemble_snapshots(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                               const LiftSpec& spec);

}  // namespace koopuq::koopman
