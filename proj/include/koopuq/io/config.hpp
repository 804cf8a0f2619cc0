#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "koopuq/koopman/model.hpp"
#include "koopuq/sim/hopf.hpp"
#include "koopuq/sim/neuron.hpp"
#include "koopuq/uq/pipeline.hpp"

namespace koopuq::io {

enum class SystemKind { neuron, hopf, external };

struct InputSpec {
    enum class Kind { zero, constant, chirp } kind = Kind::zero;
    double value = 0.0;       // constant
    double amplitude = 0.0;   // chirp: amplitude * sin(2*pi*t/period + quad_coeff*t^2)
    double period = 1.0;
    double quad_coeff = 0.0;

    sim::InputSignal make() const;
    void validate() const;
};

struct NeuronX0Spec {
    enum class Kind { rest, limit_cycle, values } kind = Kind::rest;
    sim::NeuronState values;  // when kind == values

    sim::NeuronState resolve(const sim::NeuronParams& params) const;
};

struct SimulationConfig {
    double dt = 0.025;
    Eigen::Index n_steps = 0;
    int substeps = 1;
    Eigen::Index burn_in_steps = 0;  // simulated, then discarded from the output
    InputSpec input;
    sim::NeuronParams neuron;
    NeuronX0Spec neuron_x0;
    sim::HopfParams hopf;
    double hopf_x0[2] = {1.0, 0.0};
};

struct LiftConfig {
    koopman::LiftKind kind = koopman::LiftKind::polynomial;
    int max_degree = 4;
    bool include_linear = false;
    Eigen::Index rbf_count = 10;
    std::vector<std::pair<double, double>> rbf_ranges;
    std::uint64_t rbf_seed = 0;

    // Concrete spec; draws centers for the rbf kind.
    koopman::LiftSpec make_spec(Eigen::Index p) const;
};

struct FitConfig {
    koopman::FitOptions options;
    Eigen::Index train_samples = 0;  // leading samples used for fitting; 0 = all
};

struct ExternalConfig {
    std::string path;
    Eigen::Index n_modes = 0;
};

struct FtleConfig {
    double window = 0.0;  // time units; 0 = t_batch * dt
    std::vector<Eigen::Index> directions = {0, 1};
};

struct PipelineConfig {
    SystemKind system = SystemKind::neuron;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    SimulationConfig simulation;
    ExternalConfig external;
    koopman::EmbeddingConfig embedding;
    LiftConfig lift;
    FitConfig fit;
    uq::UqConfig uq;
    std::vector<Eigen::Index> sweep_batch_sizes = {5, 10, 20, 50, 100};
    FtleConfig ftle;

    void validate() const;
};

// Strict parse: unknown keys anywhere are a config_error.
PipelineConfig parse_config(const nlohmann::ordered_json& root);
PipelineConfig load_config(const std::string& path);

// Canonical serialization with every field materialized; parse(to_json(c))
// reproduces c exactly.
nlohmann::ordered_json to_json(const PipelineConfig& config);

}  // namespace koopuq::io
