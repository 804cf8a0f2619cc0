#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "koopuq/errors.hpp"
#include "koopuq/io/config.hpp"
#include "koopuq/io/csv.hpp"
#include "koopuq/koopman/model.hpp"
#include "koopuq/koopman/model_io.hpp"
#include "koopuq/numeric/format.hpp"
#include "koopuq/predict/rollout.hpp"
#include "koopuq/sim/ftle.hpp"
#include "koopuq/sim/hopf.hpp"
#include "koopuq/sim/neuron.hpp"
#include "koopuq/uq/pipeline.hpp"
#include "koopuq/uq/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace koopuq;

struct CommonArgs {
    std::string config_path;
    std::string output_dir;  // overrides the config when set
    std::string data_path;   // overrides <out>/truth.csv when set
    std::string model_path;  // overrides <out>/model.kqm when set
};

fs::path resolve_output_dir(const io::PipelineConfig& cfg, const CommonArgs& args) {
    const fs::path dir = args.output_dir.empty() ? cfg.output_dir : args.output_dir;
    fs::create_directories(dir);
    return dir;
}

fs::path truth_path(const fs::path& dir, const CommonArgs& args) {
    return args.data_path.empty() ? dir / "truth.csv" : fs::path(args.data_path);
}

fs::path model_path(const fs::path& dir, const CommonArgs& args) {
    return args.model_path.empty() ? dir / "model.kqm" : fs::path(args.model_path);
}

TimeSeriesData simulate_truth(const io::PipelineConfig& cfg) {
    const io::SimulationConfig& sim_cfg = cfg.simulation;
    const Eigen::Index total = sim_cfg.burn_in_steps + sim_cfg.n_steps;
    TimeSeriesData series;
    switch (cfg.system) {
        case io::SystemKind::neuron:
            series = sim::simulate_neuron(sim_cfg.neuron,
                                          sim_cfg.neuron_x0.resolve(sim_cfg.neuron),
                                          sim_cfg.input.make(), sim_cfg.dt, total,
                                          sim_cfg.substeps);
            break;
        case io::SystemKind::hopf:
            series = sim::simulate_hopf(sim_cfg.hopf,
                                        {sim_cfg.hopf_x0[0], sim_cfg.hopf_x0[1]}, sim_cfg.dt,
                                        total, cfg.seed);
            break;
        case io::SystemKind::external:
            throw config_error("simulate: system=external has nothing to simulate");
    }
    // Drop the burn-in but keep absolute time, so input phases line up.
    return series.slice(sim_cfg.burn_in_steps, sim_cfg.n_steps + 1);
}

TimeSeriesData load_fit_series(const io::PipelineConfig& cfg, const fs::path& dir,
                               const CommonArgs& args, double* energy_out = nullptr) {
    if (cfg.system == io::SystemKind::external) {
        const io::SnapshotDataset dataset =
            io::ingest_csv(args.data_path.empty() ? cfg.external.path : args.data_path);
        io::PodProjection projection =
            io::project_pod_observables(dataset, cfg.external.n_modes);
        if (energy_out != nullptr) *energy_out = projection.energy_fraction;
        return std::move(projection.series);
    }
    return io::read_time_series_csv_file(truth_path(dir, args).string());
}

int cmd_simulate(const io::PipelineConfig& cfg, const CommonArgs& args) {
    const fs::path dir = resolve_output_dir(cfg, args);
    const TimeSeriesData series = simulate_truth(cfg);
    const fs::path out = dir / "truth.csv";
    io::write_time_series_csv_file(out.string(), series);
    std::cout << "wrote " << out.string() << " (" << series.length() << " samples)\n";
    return 0;
}

int cmd_fit(const io::PipelineConfig& cfg, const CommonArgs& args) {
    const fs::path dir = resolve_output_dir(cfg, args);
    double energy = 0.0;
    TimeSeriesData series = load_fit_series(cfg, dir, args, &energy);
    if (cfg.system == io::SystemKind::external)
        std::cout << "pod observables capture " << 100.0 * energy << "% of snapshot energy\n";

    if (cfg.fit.train_samples > 0 && cfg.fit.train_samples < series.length())
        series = series.slice(0, cfg.fit.train_samples);

    const koopman::LiftSpec spec = cfg.lift.make_spec(series.obs_dim());
    const koopman::KoopmanModel model =
        koopman::fit_model(series, cfg.embedding, spec, cfg.fit.options);

    const fs::path out = model_path(dir, args);
    koopman::save_model(out.string(), model);
    std::cout << "wrote " << out.string() << " (mode ";
    switch (model.mode) {
        case koopman::FitMode::linear_full: std::cout << "linear_full"; break;
        case koopman::FitMode::nonlinear_full: std::cout << "nonlinear_full"; break;
        case koopman::FitMode::nonlinear_pod:
            std::cout << "nonlinear_pod, zeta " << model.pod.modes();
            break;
    }
    std::cout << ", L " << model.ell << ", residual variance "
              << model.training_residual_variance << ")\n";
    return 0;
}

// Shares the uq geometry: handoff defaults to z, steps to the rest of truth.
std::pair<Eigen::Index, Eigen::Index> prediction_range(const io::PipelineConfig& cfg,
                                                       const koopman::KoopmanModel& model,
                                                       const TimeSeriesData& truth) {
    const Eigen::Index handoff =
        cfg.uq.handoff_index >= 0 ? cfg.uq.handoff_index : Eigen::Index(model.embedding.z);
    const Eigen::Index available = truth.length() - 1 - handoff;
    if (available < 1)
        throw data_error("predict: no steps after handoff index " + std::to_string(handoff));
    const Eigen::Index n_steps = cfg.uq.prediction_steps > 0
                                     ? std::min(cfg.uq.prediction_steps, available)
                                     : available;
    return {handoff, n_steps};
}

int cmd_predict(const io::PipelineConfig& cfg, const CommonArgs& args) {
    const fs::path dir = resolve_output_dir(cfg, args);
    const TimeSeriesData truth = load_fit_series(cfg, dir, args);
    const koopman::KoopmanModel model = koopman::load_model(model_path(dir, args).string());

    const auto [handoff, n_steps] = prediction_range(cfg, model, truth);
    const TimeSeriesData warmup = truth.slice(0, handoff + 1);
    Eigen::MatrixXd future_inputs(model.m, n_steps);
    if (model.m > 0) future_inputs = truth.inputs.middleCols(handoff, n_steps);

    const predict::RolloutResult rolled =
        predict::rollout(model, warmup, future_inputs, n_steps);

    TimeSeriesData truth_part = warmup;
    truth_part.states.resize(0, 0);
    const fs::path out = dir / "prediction.csv";
    std::ofstream os(out);
    if (!os) throw data_error("predict: cannot open '" + out.string() + "' for writing");
    io::write_prediction_csv(os, truth_part, rolled.predicted);
    std::cout << "wrote " << out.string() << " (" << n_steps << " predicted steps)\n";
    return 0;
}

int cmd_uq(const io::PipelineConfig& cfg, const CommonArgs& args) {
    const fs::path dir = resolve_output_dir(cfg, args);
    const TimeSeriesData truth = load_fit_series(cfg, dir, args);
    const koopman::KoopmanModel model = koopman::load_model(model_path(dir, args).string());

    const uq::UncertaintyReport report = uq::run_uq(model, truth, cfg.uq);

    const fs::path report_path = dir / "report.json";
    std::ofstream rs(report_path);
    if (!rs) throw data_error("uq: cannot open '" + report_path.string() + "' for writing");
    uq::write_report_json(rs, report);

    const fs::path var_path = dir / "variance_vs_time.csv";
    std::ofstream vs(var_path);
    if (!vs) throw data_error("uq: cannot open '" + var_path.string() + "' for writing");
    uq::write_variance_csv(vs, report);

    std::cout << "wrote " << report_path.string() << " and " << var_path.string() << " ("
              << report.per_batch.size() << " batches)\n";
    return 0;
}

int cmd_sweep(const io::PipelineConfig& cfg, const CommonArgs& args,
              const std::vector<Eigen::Index>& size_override) {
    const fs::path dir = resolve_output_dir(cfg, args);
    const TimeSeriesData truth = load_fit_series(cfg, dir, args);
    const koopman::KoopmanModel model = koopman::load_model(model_path(dir, args).string());

    const auto& sizes = size_override.empty() ? cfg.sweep_batch_sizes : size_override;
    const uq::WindowCurve curve = uq::sweep_batch_sizes(model, truth, cfg.uq, sizes);

    const fs::path out = dir / "window_vs_batchsize.csv";
    std::ofstream os(out);
    if (!os) throw data_error("sweep: cannot open '" + out.string() + "' for writing");
    uq::write_window_csv(os, curve);
    std::cout << "wrote " << out.string() << " (" << sizes.size() << " batch sizes)\n";
    return 0;
}

int cmd_ftle(const io::PipelineConfig& cfg, const CommonArgs& args) {
    if (cfg.system != io::SystemKind::neuron)
        throw config_error("ftle: only the neuron system provides a Jacobian");
    const fs::path dir = resolve_output_dir(cfg, args);
    const TimeSeriesData truth = io::read_time_series_csv_file(truth_path(dir, args).string());

    const double window = cfg.ftle.window > 0.0
                              ? cfg.ftle.window
                              : static_cast<double>(cfg.uq.t_batch) * truth.dt;
    const sim::FtleSeries series =
        sim::compute_neuron_ftle(cfg.simulation.neuron, truth, window, cfg.ftle.directions);

    const fs::path out = dir / "ftle.csv";
    std::ofstream os(out);
    if (!os) throw data_error("ftle: cannot open '" + out.string() + "' for writing");
    os << "t,lambda\n";
    for (std::size_t i = 0; i < series.times.size(); ++i)
        os << numeric::format_double(series.times[i]) << ','
           << numeric::format_double(series.lambda[i]) << '\n';
    std::cout << "wrote " << out.string() << " (" << series.times.size() << " samples)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koopman-style model identification with VAMP uncertainty quantification"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string batch_sizes_arg;
    app.add_option("--config", args.config_path, "pipeline config JSON")
        ->required()
        ->envname("KOOPUQ_CONFIG");
    app.add_option("--output-dir", args.output_dir, "override the config's output directory");
    app.add_option("--data", args.data_path, "override the input data path");
    app.add_option("--model", args.model_path, "override the model artifact path");

    auto* c_sim = app.add_subcommand("simulate", "generate the ground-truth series");
    auto* c_fit = app.add_subcommand("fit", "fit the one-step model");
    auto* c_pred = app.add_subcommand("predict", "closed-loop forecast to prediction.csv");
    auto* c_uq = app.add_subcommand("uq", "per-batch posterior-variance report");
    auto* c_sweep = app.add_subcommand("sweep", "uncertainty window vs batch size");
    c_sweep->add_option("--batch-sizes", batch_sizes_arg,
                        "comma-separated batch sizes (overrides the config)");
    auto* c_ftle = app.add_subcommand("ftle", "finite-time Lyapunov exponents of the truth");

    try {
        app.parse(argc, argv);

        const koopuq::io::PipelineConfig cfg = koopuq::io::load_config(args.config_path);
        std::vector<Eigen::Index> sizes;
        if (!batch_sizes_arg.empty()) {
            std::istringstream ss(batch_sizes_arg);
            std::string token;
            while (std::getline(ss, token, ','))
                sizes.push_back(static_cast<Eigen::Index>(std::stoll(token)));
        }

        if (c_sim->parsed()) return cmd_simulate(cfg, args);
        if (c_fit->parsed()) return cmd_fit(cfg, args);
        if (c_pred->parsed()) return cmd_predict(cfg, args);
        if (c_uq->parsed()) return cmd_uq(cfg, args);
        if (c_sweep->parsed()) return cmd_sweep(cfg, args, sizes);
        if (c_ftle->parsed()) return cmd_ftle(cfg, args);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    } catch (const koopuq::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
