#include "koopuq/vamp/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "koopuq/numeric/format.hpp"

namespace koopuq::vamp {

void VampOptions::validate() const {
    if (max_iters < 1) throw config_error("vamp: max_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
        throw config_error("vamp: damping must lie in (0, 1], got " + std::to_string(damping));
    if (!(tol >= 0.0)) throw config_error("vamp: tol must be non-negative");
    if (!(precision_floor > 0.0)) throw config_error("vamp: precision_floor must be positive");
    if (init_precision < 0.0) throw config_error("vamp: init_precision must be >= 0");
}

LmmseResult lmmse_estimate(const SensingModel& model, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& x_hat_e, double gamma_e, LmmsePath path) {
    if (!(gamma_e > 0.0))
        throw numeric_error("lmmse: extrinsic precision must be positive, got " +
                            std::to_string(gamma_e));
    if (y.size() != model.rows() || x_hat_e.size() != model.cols())
        throw data_error("lmmse: measurement or message dimension does not match the model");

    const double gw = model.noise_precision();
    const auto n = static_cast<double>(model.cols());
    LmmseResult out;

    if (path == LmmsePath::direct) {
        const Eigen::MatrixXd normal =
            gw * model.a().transpose() * model.a() +
            gamma_e * Eigen::MatrixXd::Identity(model.cols(), model.cols());
        const Eigen::MatrixXd inv = normal.inverse();
        out.x_hat = inv * (gw * model.a().transpose() * y + gamma_e * x_hat_e);
        out.gamma_p = n / inv.trace();
        return out;
    }

    // SVD path: the posterior covariance is diagonal in the V-basis with
    // entries 1/(gw s_i^2 + gamma_e) on the range and 1/gamma_e off it.
    const Eigen::VectorXd& s = model.svd_s();
    const Eigen::Index r = model.rank();
    const Eigen::VectorXd d = (gw * s.array().square() + gamma_e).matrix();
    const Eigen::VectorXd uy = model.svd_u().transpose() * y;
    const Eigen::VectorXd c = model.svd_v().transpose() * x_hat_e;
    const Eigen::VectorXd w = (gw * s.array() * uy.array() + gamma_e * c.array()).matrix();
    out.x_hat = x_hat_e - model.svd_v() * c + model.svd_v() * (w.array() / d.array()).matrix();
    const double trace =
        d.cwiseInverse().sum() + static_cast<double>(model.cols() - r) / gamma_e;
    out.gamma_p = n / trace;
    return out;
}

ExtrinsicResult extrinsic_update(double gamma_p, const Eigen::VectorXd& x_hat_p,
                                 double gamma_e_in, const Eigen::VectorXd& x_hat_e_in,
                                 double floor) {
    if (!(gamma_p > 0.0) || !(gamma_e_in > 0.0))
        throw numeric_error("extrinsic update: precisions must be positive");
    if (x_hat_p.size() != x_hat_e_in.size())
        throw data_error("extrinsic update: mean vectors have different lengths");

    ExtrinsicResult out;
    const double raw = gamma_p - gamma_e_in;
    out.clipped = raw <= floor;
    out.gamma = out.clipped ? floor : raw;
    out.x_hat = (gamma_p * x_hat_p - gamma_e_in * x_hat_e_in) / out.gamma;
    return out;
}

vamp_diverged::vamp_diverged(const std::string& what, VampResult partial)
    : numeric_error(what), partial_(std::move(partial)) {}

VampResult vamp_solve(const SensingModel& model, const Eigen::VectorXd& y,
                      const PriorSpec& prior, const VampOptions& opts) {
    opts.validate();
    prior.validate();
    if (y.size() != model.rows())
        throw data_error("vamp: measurement length " + std::to_string(y.size()) +
                         " does not match the model's " + std::to_string(model.rows()));
    if (!y.allFinite()) throw data_error("vamp: measurement has non-finite entries");

    const Eigen::Index n = model.cols();
    VampState state;
    state.x_hat_e_plus = opts.init_mean.size() > 0
                             ? opts.init_mean
                             : Eigen::VectorXd::Constant(n, prior.marginal_mean());
    if (state.x_hat_e_plus.size() != n)
        throw data_error("vamp: init mean length does not match the unknown dimension");
    state.gamma_e_plus =
        opts.init_precision > 0.0 ? opts.init_precision : 1.0 / prior.marginal_variance();

    VampResult result;
    Eigen::VectorXd prev_mean;
    const double beta = opts.damping;

    for (int it = 1; it <= opts.max_iters; ++it) {
        state.iteration = it;
        const DenoiseResult den = denoise_mmse(prior, state.x_hat_e_plus, state.gamma_e_plus);

        ExtrinsicResult ext_minus = extrinsic_update(den.gamma_p, den.x_hat, state.gamma_e_plus,
                                                     state.x_hat_e_plus, opts.precision_floor);
        if (it == 1) {
            state.x_hat_e_minus = ext_minus.x_hat;
            state.gamma_e_minus = ext_minus.gamma;
        } else {
            state.x_hat_e_minus = beta * ext_minus.x_hat + (1.0 - beta) * state.x_hat_e_minus;
            state.gamma_e_minus = beta * ext_minus.gamma + (1.0 - beta) * state.gamma_e_minus;
        }

        const LmmseResult lm =
            lmmse_estimate(model, y, state.x_hat_e_minus, state.gamma_e_minus, opts.path);

        ExtrinsicResult ext_plus = extrinsic_update(lm.gamma_p, lm.x_hat, state.gamma_e_minus,
                                                    state.x_hat_e_minus, opts.precision_floor);
        if (it == 1) {
            state.x_hat_e_plus = ext_plus.x_hat;
            state.gamma_e_plus = ext_plus.gamma;
        } else {
            state.x_hat_e_plus = beta * ext_plus.x_hat + (1.0 - beta) * state.x_hat_e_plus;
            state.gamma_e_plus = beta * ext_plus.gamma + (1.0 - beta) * state.gamma_e_plus;
        }

        VampIterate iterate;
        iterate.iteration = it;
        iterate.gamma_p_plus = den.gamma_p;
        iterate.gamma_p_minus = lm.gamma_p;
        iterate.gamma_e_plus = state.gamma_e_plus;
        iterate.gamma_e_minus = state.gamma_e_minus;
        iterate.alpha = den.alpha;
        iterate.clipped_minus = ext_minus.clipped;
        iterate.clipped_plus = ext_plus.clipped;
        iterate.delta = prev_mean.size() > 0
                            ? (den.x_hat - prev_mean).norm() /
                                  std::max(den.x_hat.norm(), 1e-300)
                            : std::numeric_limits<double>::infinity();
        result.trace.push_back(iterate);

        result.x_hat = den.x_hat;
        result.posterior_variance = 1.0 / den.gamma_p;
        result.iterations_run = it;

        const bool finite = den.x_hat.allFinite() && state.x_hat_e_plus.allFinite() &&
                            state.x_hat_e_minus.allFinite() &&
                            std::isfinite(state.gamma_e_plus) &&
                            std::isfinite(state.gamma_e_minus) &&
                            std::isfinite(den.gamma_p) && std::isfinite(lm.gamma_p);
        if (!finite)
            throw vamp_diverged("vamp: message became non-finite at iteration " +
                                    std::to_string(it),
                                result);

        if (iterate.delta < opts.tol) {
            result.converged = true;
            break;
        }
        prev_mean = den.x_hat;
    }
    return result;
}

void write_trace_csv(std::ostream& os, const VampResult& result) {
    using numeric::format_double;
    os << "iteration,gamma_p_plus,gamma_p_minus,gamma_e_plus,gamma_e_minus,"
          "alpha,delta,clipped_minus,clipped_plus\n";
    for (const auto& it : result.trace) {
        os << it.iteration << ',' << format_double(it.gamma_p_plus) << ','
           << format_double(it.gamma_p_minus) << ',' << format_double(it.gamma_e_plus) << ','
           << format_double(it.gamma_e_minus) << ',' << format_double(it.alpha) << ','
           << format_double(it.delta) << ',' << (it.clipped_minus ? 1 : 0) << ','
           << (it.clipped_plus ? 1 : 0) << '\n';
    }
}

}  // namespace koopuq::vamp
