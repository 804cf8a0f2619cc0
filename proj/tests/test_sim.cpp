#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "koopuq/errors.hpp"
#include "koopuq/sim/ftle.hpp"
#include "koopuq/sim/hopf.hpp"
#include "koopuq/sim/neuron.hpp"
#include "support/oracles.hpp"

using namespace koopuq;

namespace {

double radius(const Eigen::Vector2d& x) { return x.norm(); }

sim::InputSignal zero_input() {
    return [](double) { return 0.0; };
}

}  // namespace

TEST_CASE("membrane with only a leak current relaxes exponentially") {
    sim::NeuronParams p;
    p.g_na = 0.0;
    p.g_k = 0.0;
    p.g_w = 0.0;
    p.i_b = 0.0;
    sim::NeuronState x0;
    x0.v = -20.0;

    const auto run = sim::simulate_neuron(p, x0, zero_input(), 0.01, 2000, 1);
    const double rate = p.g_l / p.c_m;
    for (Eigen::Index k = 0; k < run.length(); k += 100) {
        const double expected = p.e_l + (x0.v - p.e_l) * std::exp(-rate * run.time(k));
        CHECK(run.observables(0, k) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("gating rate helpers agree with their steady-state identities") {
    for (double v : {-80.0, -64.0, -35.0, -34.0, -20.0, 0.0, 30.0}) {
        CHECK(sim::m_inf(v) ==
              doctest::Approx(sim::alpha_m(v) / (sim::alpha_m(v) + sim::beta_m(v))));
        CHECK(sim::m_inf(v) > 0.0);
        CHECK(sim::m_inf(v) < 1.0);
    }
    // The removable singularities sit at v = -35 and v = -34; the rates must
    // pass through them smoothly.
    CHECK(sim::alpha_m(-35.0) == doctest::Approx(1.0));
    CHECK(sim::alpha_n(-34.0) == doctest::Approx(0.1));
    CHECK(sim::alpha_m(-35.0 + 1e-9) == doctest::Approx(sim::alpha_m(-35.0 - 1e-9)).epsilon(1e-7));

    const auto rest = sim::neuron_rest_state(-70.0);
    CHECK(rest.q == doctest::Approx(sim::alpha_q(-70.0) / (sim::alpha_q(-70.0) + sim::beta_q(-70.0))));
    CHECK(rest.n == doctest::Approx(sim::alpha_n(-70.0) / (sim::alpha_n(-70.0) + sim::beta_n(-70.0))));
}

TEST_CASE("neuron spike times match an adaptive reference integrator") {
    const sim::NeuronParams p;
    const sim::NeuronState x0 = sim::neuron_limit_cycle_state();
    const double dt = 0.01;
    const Eigen::Index n = 10000;  // 100 ms

    const auto run = sim::simulate_neuron(p, x0, zero_input(), dt, n, 2);

    const oracles::OdeRhs rhs = [&p](double, const Eigen::VectorXd& x) {
        return Eigen::VectorXd(sim::neuron_rhs(p, Eigen::Vector4d(x), 0.0));
    };
    const Eigen::MatrixXd ref = oracles::ck45_sample(rhs, x0.vec(), 0.0, dt, n, 1e-11, 1e-13);

    TimeSeriesData ref_series;
    ref_series.dt = dt;
    ref_series.observables = ref.topRows(2);

    const auto ours = sim::spike_times(run);
    const auto theirs = sim::spike_times(ref_series);
    REQUIRE(ours.size() == theirs.size());
    REQUIRE(ours.size() > 10);
    for (std::size_t i = 0; i < ours.size(); ++i)
        CHECK(std::abs(ours[i] - theirs[i]) < 2e-3);  // ms
}

TEST_CASE("spiking from the cycle state reproduces the stationary rate") {
    const auto run = sim::simulate_neuron(sim::NeuronParams{}, sim::neuron_limit_cycle_state(),
                                          zero_input(), 0.01, 5000, 2);
    const auto spikes = sim::spike_times(run);
    const double isi = sim::mean_interspike_interval(spikes);
    CHECK(std::abs(isi - 6.53) / 6.53 < 0.01);
}

TEST_CASE("gates stay inside the unit interval under a strong chirp") {
    const sim::InputSignal chirp = [](double t) {
        return 8.0 * std::sin(2.0 * M_PI * t / 40.0 + 3e-4 * t * t);
    };
    const auto run = sim::simulate_neuron(sim::NeuronParams{}, sim::neuron_rest_state(),
                                          chirp, 0.025, 8000, 2);
    for (Eigen::Index k = 0; k < run.length(); ++k) {
        CHECK(run.states(1, k) >= 0.0);
        CHECK(run.states(1, k) <= 1.0);
        CHECK(run.states(2, k) >= 0.0);
        CHECK(run.states(2, k) <= 1.0);
        CHECK(std::abs(run.states(0, k)) < 200.0);
    }
}

TEST_CASE("neuron integration failure modes raise typed errors") {
    const sim::NeuronParams p;
    CHECK_THROWS_AS(sim::simulate_neuron(p, {}, zero_input(), 0.0, 10), config_error);
    CHECK_THROWS_AS(sim::simulate_neuron(p, {}, zero_input(), 0.01, 10, 0), config_error);

    sim::NeuronParams bad = p;
    bad.c_m = 0.0;
    CHECK_THROWS_AS(sim::simulate_neuron(bad, {}, zero_input(), 0.01, 10), config_error);

    // A step far beyond the gating time scale overshoots the unit interval.
    CHECK_THROWS_AS(sim::simulate_neuron(p, {}, zero_input(), 5.0, 100), data_error);

    // An absurd reversal potential drives the voltage out of double range.
    sim::NeuronParams runaway = p;
    runaway.e_na = 1e308;
    CHECK_THROWS_AS(sim::simulate_neuron(runaway, {}, zero_input(), 0.025, 100), numeric_error);
}

TEST_CASE("analytic neuron jacobian matches central differences") {
    const sim::NeuronParams p;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> vdist(-80.0, 20.0);
    std::uniform_real_distribution<double> gdist(0.05, 0.95);

    std::vector<Eigen::Vector4d> points = {sim::neuron_limit_cycle_state().vec(),
                                           sim::neuron_rest_state().vec()};
    for (int i = 0; i < 6; ++i)
        points.emplace_back(Eigen::Vector4d{vdist(gen), gdist(gen), gdist(gen), gdist(gen)});

    for (const auto& x : points) {
        const Eigen::Matrix4d analytic = sim::neuron_jacobian(p, x);
        for (int col = 0; col < 4; ++col) {
            const double eps = 1e-6 * std::max(1.0, std::abs(x(col)));
            Eigen::Vector4d hi = x, lo = x;
            hi(col) += eps;
            lo(col) -= eps;
            const Eigen::Vector4d diff =
                (sim::neuron_rhs(p, hi, 0.0) - sim::neuron_rhs(p, lo, 0.0)) / (2.0 * eps);
            for (int row = 0; row < 4; ++row)
                CHECK(std::abs(diff(row) - analytic(row, col)) <=
                      1e-5 * std::max(1.0, std::abs(analytic(row, col))));
        }
    }
}

TEST_CASE("deterministic oscillator holds the unit circle") {
    const sim::HopfParams p;
    const auto run = sim::simulate_hopf(p, {1.0, 0.0}, 0.01, 10000);
    REQUIRE(run.length() == 10001);
    for (Eigen::Index k = 0; k < run.length(); ++k)
        CHECK(std::abs(radius(run.states.col(k)) - 1.0) < 1e-5);
    CHECK(run.obs_dim() == 1);
    CHECK(run.input_dim() == 0);
    for (Eigen::Index k = 0; k < run.length(); ++k)
        CHECK(run.observables(0, k) == run.states(0, k));
}

TEST_CASE("oscillator origin is a fixed point and the cycle period matches") {
    const sim::HopfParams p;
    const auto still = sim::simulate_hopf(p, {0.0, 0.0}, 0.01, 100);
    for (Eigen::Index k = 0; k < still.length(); ++k) {
        CHECK(still.states(0, k) == 0.0);
        CHECK(still.states(1, k) == 0.0);
    }

    // On the cycle the angular speed is exactly 1, so the period is 2 pi.
    const double dt = 2.0 * M_PI / 4000.0;
    const auto loop = sim::simulate_hopf(p, {1.0, 0.0}, dt, 4000);
    CHECK(std::abs(loop.states(0, 4000) - 1.0) < 1e-6);
    CHECK(std::abs(loop.states(1, 4000) - 0.0) < 1e-6);
}

TEST_CASE("radial relaxation is monotone from outside the cycle") {
    const sim::HopfParams p;
    const auto run = sim::simulate_hopf(p, {2.0, 0.0}, 0.01, 300);
    for (Eigen::Index k = 1; k < run.length(); ++k) {
        const double r_prev = radius(run.states.col(k - 1));
        const double r_now = radius(run.states.col(k));
        if (r_prev > 1.0 + 1e-9) CHECK(r_now < r_prev);
    }
}

TEST_CASE("stochastic runs are reproducible by seed and diverge across seeds") {
    sim::HopfParams p;
    p.noise_d = 0.05;
    const auto a = sim::simulate_hopf(p, {1.0, 0.0}, 0.01, 500, 42);
    const auto b = sim::simulate_hopf(p, {1.0, 0.0}, 0.01, 500, 42);
    const auto c = sim::simulate_hopf(p, {1.0, 0.0}, 0.01, 500, 43);
    CHECK((a.states - b.states).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.states - c.states).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("noise keeps the trajectory in a band around the cycle") {
    sim::HopfParams p;
    p.noise_d = 0.01;
    const auto run = sim::simulate_hopf(p, {1.0, 0.0}, 0.01, 200000, 1);
    double mean_r = 0.0;
    for (Eigen::Index k = 0; k < run.length(); ++k) mean_r += radius(run.states.col(k));
    mean_r /= static_cast<double>(run.length());
    double var_r = 0.0;
    for (Eigen::Index k = 0; k < run.length(); ++k) {
        const double d = radius(run.states.col(k)) - mean_r;
        var_r += d * d;
    }
    var_r /= static_cast<double>(run.length());
    CHECK(std::abs(mean_r - 1.0) < 0.05);
    CHECK(std::sqrt(var_r) > 0.01);
    CHECK(std::sqrt(var_r) < 0.2);
}

TEST_CASE("growth-rate estimate is exact for a scalar linear flow") {
    const double a = 0.7;
    const sim::JacobianSource jac = [a](double) {
        return Eigen::MatrixXd::Constant(1, 1, a);
    };
    const auto series = sim::compute_ftle(jac, 1, 0.0, 0.01, 301, 1.0, {0});
    REQUIRE(series.lambda.size() == 201);
    for (double lam : series.lambda) CHECK(lam == doctest::Approx(a).epsilon(1e-10));

    const sim::JacobianSource still = [](double) { return Eigen::MatrixXd::Zero(2, 2); };
    const auto flat = sim::compute_ftle(still, 2, 0.0, 0.01, 101, 0.5, {0, 1});
    for (double lam : flat.lambda) CHECK(std::abs(lam) < 1e-14);
}

TEST_CASE("growth rates of constant linear flows match the matrix exponential") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    const double nu = 0.4, dt = 2e-4;
    const auto steps = static_cast<Eigen::Index>(std::llround(nu / dt));

    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix2d j;
        j << dist(gen), dist(gen), dist(gen), dist(gen);
        const sim::JacobianSource jac = [&j](double) { return Eigen::MatrixXd(j); };
        const auto series = sim::compute_ftle(jac, 2, 0.0, dt, steps + 1, nu, {0, 1});
        REQUIRE(series.lambda.size() == 1);

        const Eigen::Matrix2d psi = (nu * j).exp();
        const double expected = std::log(psi.jacobiSvd().singularValues()(0)) / nu;
        CHECK(series.lambda[0] == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("time-dependent commuting flow matches its closed-form growth rate") {
    const sim::JacobianSource jac = [](double t) {
        return Eigen::MatrixXd(std::sin(t) * Eigen::Matrix2d::Identity());
    };
    const double dt = 1e-3, nu = 0.5;
    const auto series = sim::compute_ftle(jac, 2, 0.0, dt, 1500, nu, {0, 1});
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        const double expected = (std::cos(t - nu) - std::cos(t)) / nu;
        CHECK(series.lambda[i] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("growth-rate estimation rejects unusable windows and directions") {
    const sim::JacobianSource jac = [](double) { return Eigen::MatrixXd::Zero(2, 2); };
    CHECK_THROWS_AS(sim::compute_ftle(jac, 2, 0.0, 0.01, 10, 1.0, {0}), data_error);
    CHECK_THROWS_AS(sim::compute_ftle(jac, 2, 0.0, 0.01, 100, 0.5, {}), config_error);
    CHECK_THROWS_AS(sim::compute_ftle(jac, 2, 0.0, 0.01, 100, 0.5, {2}), config_error);
    CHECK_THROWS_AS(sim::compute_ftle(jac, 2, 0.0, 0.01, 100, 0.001, {0}), config_error);
}

TEST_CASE("neuron growth rates are finite and grow with the direction set") {
    const sim::NeuronParams p;
    const auto run = sim::simulate_neuron(p, sim::neuron_limit_cycle_state(), zero_input(),
                                          0.025, 800, 2);
    const auto narrow = sim::compute_neuron_ftle(p, run, 1.0, {0});
    const auto wide = sim::compute_neuron_ftle(p, run, 1.0, {0, 1});
    REQUIRE(narrow.lambda.size() == wide.lambda.size());
    REQUIRE(!narrow.lambda.empty());
    for (std::size_t i = 0; i < wide.lambda.size(); ++i) {
        CHECK(std::isfinite(wide.lambda[i]));
        // The best direction in a superset can only grow.
        CHECK(wide.lambda[i] >= narrow.lambda[i] - 1e-12);
    }

    TimeSeriesData stateless = run;
    stateless.states.resize(0, 0);
    CHECK_THROWS_AS(sim::compute_neuron_ftle(p, stateless, 1.0, {0, 1}), data_error);
}
