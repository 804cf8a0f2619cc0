#pragma once

#include <Eigen/Dense>

#include "koopuq/types.hpp"

namespace koopuq::koopman {

struct EmbeddingConfig {
    int z = 1;  // number of delayed (observable, input) pairs in the history

    void validate() const;  // throws config_error if z < 1
};

// Delay-embedded history at sample k: the z most recent observables followed
// by the z most recent inputs, newest first,
//   h^k = [g^{k-1}; ...; g^{k-z}; u^{k-1}; ...; u^{k-z}],
// of dimension z * (p + m). Requires k >= z.
Eigen::VectorXd build_delay_embedding(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                                      Eigen::Index k);

// Rolling buffer holding the same layout for step-by-step prediction. push()
// shifts the newest pair in and drops the oldest.
class DelayBuffer {
public:
    DelayBuffer(int z, Eigen::Index p, Eigen::Index m);

    // Buffer positioned at sample k of a recorded series.
    static DelayBuffer from_series(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                                   Eigen::Index k);

    void push(const Eigen::VectorXd& g, const Eigen::VectorXd& u);
    const Eigen::VectorXd& vector() const { return h_; }
    Eigen::Index dim() const { return h_.size(); }

private:
    int z_;
    Eigen::Index p_, m_;
    Eigen::VectorXd h_;
};

}  // namespace koopuq::koopman
