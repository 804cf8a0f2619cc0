#include "koopuq/koopman/embedding.hpp"

#include <string>

#include "koopuq/errors.hpp"

namespace koopuq::koopman {

void EmbeddingConfig::validate() const {
    if (z < 1) throw config_error("embedding: z must be >= 1, got " + std::to_string(z));
}

Eigen::VectorXd build_delay_embedding(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                                      Eigen::Index k) {
    cfg.validate();
    data.validate();
    if (k < cfg.z || k >= data.length())
        throw data_error("delay embedding at sample " + std::to_string(k) + " needs " +
                         std::to_string(cfg.z) + " past samples within the series of length " +
                         std::to_string(data.length()));

    const Eigen::Index p = data.obs_dim();
    const Eigen::Index m = data.input_dim();
    Eigen::VectorXd h(cfg.z * (p + m));
    for (int d = 1; d <= cfg.z; ++d) {
        h.segment(static_cast<Eigen::Index>(d - 1) * p, p) = data.observables.col(k - d);
        if (m > 0)
            h.segment(static_cast<Eigen::Index>(cfg.z) * p + static_cast<Eigen::Index>(d - 1) * m,
                      m) = data.inputs.col(k - d);
    }
    return h;
}

DelayBuffer::DelayBuffer(int z, Eigen::Index p, Eigen::Index m)
    : z_(z), p_(p), m_(m), h_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z) * (p + m))) {
    if (z < 1) throw config_error("delay buffer: z must be >= 1");
    if (p < 1) throw config_error("delay buffer: observable dimension must be >= 1");
    if (m < 0) throw config_error("delay buffer: input dimension must be >= 0");
}

DelayBuffer DelayBuffer::from_series(const TimeSeriesData& data, const EmbeddingConfig& cfg,
                                     Eigen::Index k) {
    DelayBuffer buf(cfg.z, data.obs_dim(), data.input_dim());
    buf.h_ = build_delay_embedding(data, cfg, k);
    return buf;
}

void DelayBuffer::push(const Eigen::VectorXd& g, const Eigen::VectorXd& u) {
    if (g.size() != p_ || u.size() != m_)
        throw data_error("delay buffer push: expected dimensions (" + std::to_string(p_) + ", " +
                         std::to_string(m_) + "), got (" + std::to_string(g.size()) + ", " +
                         std::to_string(u.size()) + ")");
    const Eigen::Index zi = z_;
    // Shift each block one slot toward the past, then write the new pair.
    for (Eigen::Index d = zi - 1; d >= 1; --d)
        h_.segment(d * p_, p_) = h_.segment((d - 1) * p_, p_);
    h_.segment(0, p_) = g;
    if (m_ > 0) {
        const Eigen::Index off = zi * p_;
        for (Eigen::Index d = zi - 1; d >= 1; --d)
            h_.segment(off + d * m_, m_) = h_.segment(off + (d - 1) * m_, m_);
        h_.segment(off, m_) = u;
    }
}

}  // namespace koopuq::koopman
