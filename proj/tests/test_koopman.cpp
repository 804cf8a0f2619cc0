#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "koopuq/errors.hpp"
#include "koopuq/koopman/embedding.hpp"
#include "koopuq/koopman/lift.hpp"
#include "koopuq/koopman/model.hpp"
#include "koopuq/koopman/model_io.hpp"
#include "koopuq/koopman/pod.hpp"
#include "koopuq/koopman/snapshots.hpp"
#include "koopuq/predict/rollout.hpp"
#include "koopuq/sim/hopf.hpp"
#include "support/oracles.hpp"

using namespace koopuq;

namespace {

TimeSeriesData random_series(Eigen::Index p, Eigen::Index m, Eigen::Index q,
                             std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist;
    TimeSeriesData data;
    data.dt = 0.1;
    data.observables = Eigen::MatrixXd::NullaryExpr(p, q, [&] { return dist(gen); });
    if (m > 0) data.inputs = Eigen::MatrixXd::NullaryExpr(m, q, [&] { return dist(gen); });
    return data;
}

koopman::LiftSpec poly_spec(int max_degree, bool include_linear = false) {
    koopman::LiftSpec spec;
    spec.kind = koopman::LiftKind::polynomial;
    spec.max_degree = max_degree;
    spec.include_linear = include_linear;
    return spec;
}

// Trajectories of a known stable linear system g+ = A g + B u.
TimeSeriesData linear_system_series(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                    Eigen::Index q, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist;
    TimeSeriesData data;
    data.dt = 0.05;
    data.observables.resize(a.rows(), q);
    data.inputs.resize(b.cols(), q);
    Eigen::VectorXd g = Eigen::VectorXd::NullaryExpr(a.rows(), [&] { return dist(gen); });
    for (Eigen::Index k = 0; k < q; ++k) {
        const Eigen::VectorXd u =
            Eigen::VectorXd::NullaryExpr(b.cols(), [&] { return dist(gen); });
        data.observables.col(k) = g;
        data.inputs.col(k) = u;
        g = a * g + b * u;
    }
    return data;
}

}  // namespace

TEST_CASE("delay history stacks the latest observables and inputs newest first") {
    const auto data = random_series(2, 1, 12, 3);
    koopman::EmbeddingConfig cfg;
    cfg.z = 3;

    const Eigen::VectorXd h = build_delay_embedding(data, cfg, 5);
    REQUIRE(h.size() == 3 * (2 + 1));
    CHECK(h.segment(0, 2) == data.observables.col(4));
    CHECK(h.segment(2, 2) == data.observables.col(3));
    CHECK(h.segment(4, 2) == data.observables.col(2));
    CHECK(h(6) == data.inputs(0, 4));
    CHECK(h(7) == data.inputs(0, 3));
    CHECK(h(8) == data.inputs(0, 2));

    CHECK_THROWS_AS(build_delay_embedding(data, cfg, 2), data_error);
    koopman::EmbeddingConfig bad;
    bad.z = 0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}

TEST_CASE("rolling delay buffer reproduces the recorded embedding") {
    const auto data = random_series(2, 1, 12, 4);
    koopman::EmbeddingConfig cfg;
    cfg.z = 3;

    auto buffer = koopman::DelayBuffer::from_series(data, cfg, 4);
    CHECK(buffer.vector() == build_delay_embedding(data, cfg, 4));
    for (Eigen::Index k = 4; k < 11; ++k) {
        buffer.push(data.observables.col(k), data.inputs.col(k));
        CHECK(buffer.vector() == build_delay_embedding(data, cfg, k + 1));
    }

    CHECK_THROWS_AS(buffer.push(Eigen::Vector3d::Zero(), Eigen::VectorXd::Zero(1)), data_error);
}

TEST_CASE("monomial exponents come out in graded order") {
    const auto exps = koopman::monomial_exponents(2, 2, 3);
    const std::vector<std::vector<int>> expected = {
        {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
    REQUIRE(exps.size() == expected.size());
    for (std::size_t i = 0; i < exps.size(); ++i) CHECK(exps[i] == expected[i]);

    // Degree-1 terms are the bare variables in order.
    const auto lin = koopman::monomial_exponents(3, 1, 1);
    REQUIRE(lin.size() == 3);
    CHECK(lin[0] == std::vector<int>{1, 0, 0});
    CHECK(lin[1] == std::vector<int>{0, 1, 0});
    CHECK(lin[2] == std::vector<int>{0, 0, 1});
}

TEST_CASE("lift dimension follows the multiset-coefficient count") {
    for (Eigen::Index d : {1, 2, 5, 10}) {
        for (int deg : {2, 3, 4}) {
            for (bool lin : {false, true}) {
                koopman::LiftSpec spec = poly_spec(deg, lin);
                long long expected = 0;
                for (int k = lin ? 1 : 2; k <= deg; ++k)
                    expected += oracles::binomial(static_cast<int>(d) + k - 1, k);
                CHECK(koopman::lift_dim(spec, d, 0) == expected);
            }
        }
    }

    // Ten variables, degrees two through four.
    CHECK(koopman::lift_dim(poly_spec(4), 2, 8) == 990);

    // Degree one without linear terms is an allowed empty lift.
    CHECK(koopman::lift_dim(poly_spec(1), 3, 3) == 0);

    koopman::LiftSpec big = poly_spec(12);
    try {
        koopman::lift_dim(big, 2, 8);
        FAIL("oversized lift was accepted");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("cap") != std::string::npos);
    }
}

TEST_CASE("univariate polynomial lift evaluates plain powers") {
    const koopman::LiftSpec spec = poly_spec(4);
    Eigen::VectorXd g(1);
    g << 1.7;
    const Eigen::VectorXd lifted = koopman::evaluate_lift(spec, g, Eigen::VectorXd());
    REQUIRE(lifted.size() == 3);
    CHECK(lifted(0) == 1.7 * 1.7);
    CHECK(lifted(1) == 1.7 * 1.7 * 1.7);
    CHECK(lifted(2) == doctest::Approx(std::pow(1.7, 4)).epsilon(1e-15));
}

TEST_CASE("multivariate lift covers the exact monomial set") {
    const koopman::LiftSpec spec = poly_spec(2, true);
    Eigen::VectorXd g(2), h(1);
    g << 2.0, 3.0;
    h << 5.0;
    const Eigen::VectorXd lifted = koopman::evaluate_lift(spec, g, h);
    // Variables (2, 3, 5): degree 1 then degree 2 in graded order.
    const std::vector<double> expected = {2, 3, 5, 4, 6, 10, 9, 15, 25};
    REQUIRE(lifted.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index i = 0; i < lifted.size(); ++i) CHECK(lifted(i) == expected[i]);
}

TEST_CASE("radial lift maps distances to centers before the polynomial") {
    koopman::LiftSpec spec;
    spec.kind = koopman::LiftKind::rbf_then_polynomial;
    spec.max_degree = 2;
    spec.rbf_centers.resize(2, 1);
    spec.rbf_centers << 1.0, -1.0;

    Eigen::VectorXd g(2), h(2);
    g << 4.0, 3.0;
    h << 9.0, 9.0;  // history must not influence the radial stage
    const Eigen::VectorXd lifted = koopman::evaluate_lift(spec, g, h);
    const double dist = std::sqrt(3.0 * 3.0 + 4.0 * 4.0);
    REQUIRE(lifted.size() == 1);
    CHECK(lifted(0) == doctest::Approx(dist * dist).epsilon(1e-15));

    // Centers drawn from ranges are reproducible and stay inside the box.
    const auto centers = koopman::draw_rbf_centers(50, {{-1.0, 2.0}, {0.0, 0.5}}, 9);
    const auto again = koopman::draw_rbf_centers(50, {{-1.0, 2.0}, {0.0, 0.5}}, 9);
    CHECK((centers - again).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index c = 0; c < centers.cols(); ++c) {
        CHECK(centers(0, c) >= -1.0);
        CHECK(centers(0, c) <= 2.0);
        CHECK(centers(1, c) >= 0.0);
        CHECK(centers(1, c) <= 0.5);
    }
}

TEST_CASE("snapshot matrices align current, shifted and lifted columns") {
    const auto data = random_series(2, 1, 8, 5);
    koopman::EmbeddingConfig cfg;
    cfg.z = 2;
    const koopman::LiftSpec spec = poly_spec(2);

    const auto snaps = koopman::assemble_snapshots(data, cfg, spec);
    REQUIRE(snaps.count() == 8 - 2 - 1);
    CHECK(snaps.first_index == 2);
    for (Eigen::Index j = 0; j < snaps.count(); ++j) {
        const Eigen::Index k = snaps.first_index + j;
        CHECK(snaps.x.col(j) == data.observables.col(k));
        CHECK(snaps.x_plus.col(j) == data.observables.col(k + 1));
        CHECK(snaps.u.col(j) == data.inputs.col(k));
        CHECK(snaps.upsilon.col(j) ==
              koopman::evaluate_lift(spec, data.observables.col(k),
                                     build_delay_embedding(data, cfg, k)));
        CHECK(snaps.upsilon_plus.col(j) ==
              koopman::evaluate_lift(spec, data.observables.col(k + 1),
                                     build_delay_embedding(data, cfg, k + 1)));
    }

    const auto brief = random_series(2, 1, 3, 6);
    CHECK_THROWS_AS(koopman::assemble_snapshots(brief, cfg, spec), data_error);
}

TEST_CASE("orthogonal modes carry the squared singular values as energies") {
    Eigen::MatrixXd x(2, 2);
    x << 3.0, 0.0, 0.0, 2.0;
    const auto basis = koopman::compute_pod(x, Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 2), 2);
    REQUIRE(basis.eigenvalues.size() == 2);
    CHECK(basis.eigenvalues(0) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(basis.eigenvalues(1) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(basis.energy_fraction == doctest::Approx(1.0).epsilon(1e-12));

    const auto lead = koopman::compute_pod(x, Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 2), 1);
    CHECK(lead.energy_fraction == doctest::Approx(9.0 / 13.0).epsilon(1e-12));

    std::mt19937_64 gen(12);
    std::normal_distribution<double> dist;
    const Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(12, 40, [&] { return dist(gen); });
    const auto random_basis =
        koopman::compute_pod(b, Eigen::MatrixXd(0, 40), Eigen::MatrixXd(0, 40), 5);
    const Eigen::MatrixXd gram =
        random_basis.phi.transpose() * random_basis.phi;
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);

    // Keeping every mode reproduces the stack.
    const auto full = koopman::compute_pod(b, Eigen::MatrixXd(0, 40), Eigen::MatrixXd(0, 40), 12);
    CHECK((full.phi * (full.phi.transpose() * b) - b).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("energy-targeted mode count matches a dense eigendecomposition") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd b = Eigen::MatrixXd::NullaryExpr(20, 100, [&] { return dist(gen); });
    // Skew the spectrum so the target lands mid-way.
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        b.row(i) *= std::pow(0.7, static_cast<double>(i));

    const auto basis =
        koopman::compute_pod_energy(b, Eigen::MatrixXd(0, 100), Eigen::MatrixXd(0, 100), 0.9);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b * b.transpose());
    Eigen::VectorXd evs = eig.eigenvalues().reverse();
    const double total = evs.sum();
    double cum = 0.0;
    Eigen::Index expected_count = 0;
    while (cum / total < 0.9) cum += evs(expected_count++);

    CHECK(basis.modes() == expected_count);
    for (Eigen::Index i = 0; i < basis.modes(); ++i)
        CHECK(basis.eigenvalues(i) == doctest::Approx(evs(i)).epsilon(1e-8));

    // Rank-deficient stacks cap the achievable mode count.
    const Eigen::MatrixXd rank1 = Eigen::VectorXd::LinSpaced(6, 1.0, 6.0) *
                                  Eigen::RowVectorXd::LinSpaced(30, 1.0, 3.0);
    try {
        koopman::compute_pod(rank1, Eigen::MatrixXd(0, 30), Eigen::MatrixXd(0, 30), 3);
        FAIL("mode count beyond the stack rank was accepted");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("rank") != std::string::npos);
    }
}

TEST_CASE("a linear plant is recovered exactly from clean trajectories") {
    Eigen::MatrixXd a(3, 3), b(3, 1);
    a << 0.6, 0.1, 0.0, -0.1, 0.5, 0.2, 0.0, 0.1, 0.4;
    b << 1.0, 0.0, 0.5;
    const auto data = linear_system_series(a, b, 200, 21);

    koopman::EmbeddingConfig cfg;
    cfg.z = 1;
    const koopman::LiftSpec empty = poly_spec(1);  // no lifted coordinates
    koopman::FitOptions opts;
    opts.mode = koopman::FitMode::linear_full;

    const auto model = koopman::fit_model(data, cfg, empty, opts);
    CHECK(model.ell == 0);
    const Eigen::MatrixXd eff = model.effective_operator();
    REQUIRE(eff.rows() == 3);
    REQUIRE(eff.cols() == 4);
    CHECK((eff.leftCols(3) - a).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((eff.rightCols(1) - b).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(model.training_residual_variance < 1e-16);
}

TEST_CASE("least-squares fit agrees with independent solvers") {
    const auto data = random_series(2, 1, 120, 22);
    koopman::EmbeddingConfig cfg;
    cfg.z = 2;
    const koopman::LiftSpec spec = poly_spec(2);
    koopman::FitOptions opts;
    opts.mode = koopman::FitMode::nonlinear_full;

    const auto model = koopman::fit_model(data, cfg, spec, opts);
    const auto snaps = koopman::assemble_snapshots(data, cfg, spec);
    Eigen::MatrixXd regressors(snaps.x.rows() + snaps.u.rows() + snaps.upsilon.rows(),
                               snaps.count());
    regressors << snaps.x, snaps.u, snaps.upsilon;

    // Overdetermined and well-conditioned: the normal equations agree.
    const Eigen::MatrixXd viaNormal = oracles::ls_normal_equations(snaps.x_plus, regressors);
    CHECK((model.op - viaNormal).cwiseAbs().maxCoeff() < 1e-8);

    // Underdetermined: the minimum-norm solution is the one returned.
    const auto narrow = random_series(2, 1, 24, 23);
    const auto tiny = koopman::fit_model(narrow, cfg, spec, opts);
    const auto tsnaps = koopman::assemble_snapshots(narrow, cfg, spec);
    Eigen::MatrixXd treg(tsnaps.x.rows() + tsnaps.u.rows() + tsnaps.upsilon.rows(),
                         tsnaps.count());
    treg << tsnaps.x, tsnaps.u, tsnaps.upsilon;
    const Eigen::MatrixXd viaCod = oracles::ls_cod(tsnaps.x_plus, treg);
    CHECK((tiny.op - viaCod).cwiseAbs().maxCoeff() < 1e-8);
    // It interpolates the data and no solution has smaller norm.
    CHECK((tiny.op * treg - tsnaps.x_plus).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(tiny.op.norm() <= viaCod.norm() + 1e-8);
}

TEST_CASE("projected and unprojected fits coincide at full basis size") {
    sim::HopfParams hp;
    hp.noise_d = 0.01;
    const auto data = sim::simulate_hopf(hp, {1.0, 0.0}, 0.04, 400, 5);

    koopman::EmbeddingConfig cfg;
    cfg.z = 3;
    const koopman::LiftSpec spec = poly_spec(3);

    koopman::FitOptions full_opts;
    full_opts.mode = koopman::FitMode::nonlinear_full;
    const auto full = koopman::fit_model(data, cfg, spec, full_opts);

    const auto snaps = koopman::assemble_snapshots(data, cfg, spec);
    Eigen::MatrixXd regressors(1 + 0 + snaps.upsilon.rows(), snaps.count());
    regressors << snaps.x, snaps.upsilon;
    const Eigen::VectorXd sv = regressors.bdcSvd().singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rank;

    koopman::FitOptions pod_opts;
    pod_opts.mode = koopman::FitMode::nonlinear_pod;
    pod_opts.zeta = rank;
    const auto projected = koopman::fit_model(data, cfg, spec, pod_opts);

    CHECK((full.effective_operator() - projected.effective_operator()).cwiseAbs().maxCoeff() <
          1e-8);
    CHECK(projected.training_residual_variance ==
          doctest::Approx(full.training_residual_variance).epsilon(1e-6));
}

TEST_CASE("smooth oscillator dynamics fit with a small residual") {
    const auto data = sim::simulate_hopf(sim::HopfParams{}, {1.3, 0.0}, 0.04, 600);
    koopman::EmbeddingConfig cfg;
    cfg.z = 3;
    koopman::FitOptions opts;
    opts.mode = koopman::FitMode::nonlinear_pod;
    opts.energy_target = 0.999999;

    // Linear terms matter here: the oscillatory part of the map is close to
    // an AR model in the delayed observables.
    const auto model = koopman::fit_model(data, cfg, poly_spec(4, true), opts);
    CHECK(model.training_residual_variance < 1e-6);
    CHECK(model.pod.modes() > 0);
    CHECK(model.pod.modes() <= model.regressor_dim());

    // The projected operator still predicts the held-out continuation.
    const auto warmup = data.slice(0, 200);
    const auto rolled = predict::rollout(model, warmup, Eigen::MatrixXd(0, 0), 100);
    for (Eigen::Index j = 0; j < 100; ++j)
        CHECK(std::abs(rolled.predicted.observables(0, j) - data.observables(0, 200 + j)) <
              0.05);
}

TEST_CASE("identically zero training data is rejected") {
    TimeSeriesData hollow;
    hollow.dt = 0.1;
    hollow.observables = Eigen::MatrixXd::Zero(2, 30);
    koopman::EmbeddingConfig cfg;
    CHECK_THROWS_AS(koopman::fit_model(hollow, cfg, poly_spec(2), {}), data_error);
}

TEST_CASE("model artifacts survive a round trip bit for bit") {
    sim::HopfParams hp;
    hp.noise_d = 0.02;
    auto data = sim::simulate_hopf(hp, {1.0, 0.0}, 0.04, 300, 8);
    // Attach a synthetic input channel so every matrix block is exercised.
    data.inputs.resize(1, data.length());
    for (Eigen::Index k = 0; k < data.length(); ++k)
        data.inputs(0, k) = std::sin(0.1 * static_cast<double>(k));

    koopman::EmbeddingConfig cfg;
    cfg.z = 2;
    koopman::LiftSpec spec;
    spec.kind = koopman::LiftKind::rbf_then_polynomial;
    spec.max_degree = 3;
    spec.rbf_centers = koopman::draw_rbf_centers(6, {{-1.5, 1.5}}, 17);
    koopman::FitOptions opts;
    opts.mode = koopman::FitMode::nonlinear_pod;
    opts.zeta = 8;

    const auto model = koopman::fit_model(data, cfg, spec, opts);
    const auto path = std::filesystem::temp_directory_path() / "koopuq_model_roundtrip.kqm";
    koopman::save_model(path.string(), model);
    const auto loaded = koopman::load_model(path.string());

    CHECK(loaded.mode == model.mode);
    CHECK(loaded.embedding.z == model.embedding.z);
    CHECK(loaded.lift.max_degree == model.lift.max_degree);
    CHECK(loaded.dt == model.dt);
    CHECK(loaded.p == model.p);
    CHECK(loaded.m == model.m);
    CHECK(loaded.ell == model.ell);
    CHECK(loaded.training_residual_variance == model.training_residual_variance);
    CHECK(loaded.op == model.op);
    CHECK(loaded.pod.phi == model.pod.phi);
    CHECK(loaded.pod.eigenvalues == model.pod.eigenvalues);
    CHECK(loaded.lift.rbf_centers == model.lift.rbf_centers);

    // Identical artifacts drive identical forecasts.
    const auto warmup = data.slice(0, 100);
    const Eigen::MatrixXd fut = data.inputs.middleCols(99, 50);
    const auto a = predict::rollout(model, warmup, fut, 50);
    const auto b = predict::rollout(loaded, warmup, fut, 50);
    CHECK((a.predicted.observables - b.predicted.observables).cwiseAbs().maxCoeff() == 0.0);

    std::filesystem::remove(path);
}

TEST_CASE("corrupt model artifacts are refused") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "koopuq_model_corrupt.kqm";
    {
        std::ofstream os(path, std::ios::binary);
        os << "NOTMODEL garbage";
    }
    CHECK_THROWS_AS(koopman::load_model(path.string()), data_error);
    CHECK_THROWS_AS(koopman::load_model((dir / "koopuq_missing.kqm").string()), data_error);

    // Truncation inside the matrix blocks is caught as well.
    const auto data = sim::simulate_hopf(sim::HopfParams{}, {1.0, 0.0}, 0.04, 120);
    koopman::FitOptions opts;
    opts.mode = koopman::FitMode::nonlinear_full;
    const auto model = koopman::fit_model(data, {}, poly_spec(2), opts);
    const auto whole = dir / "koopuq_model_whole.kqm";
    koopman::save_model(whole.string(), model);
    const auto clipped = dir / "koopuq_model_clipped.kqm";
    {
        std::ifstream is(whole, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(is)),
                          std::istreambuf_iterator<char>());
        std::ofstream os(clipped, std::ios::binary);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 16));
    }
    CHECK_THROWS_AS(koopman::load_model(clipped.string()), data_error);
    std::filesystem::remove(whole);
    std::filesystem::remove(clipped);
    std::filesystem::remove(path);
}
