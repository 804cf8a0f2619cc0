#include "koopuq/io/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>

#include <nlohmann/json.hpp>

#include "koopuq/errors.hpp"

namespace koopuq::io {

using json = nlohmann::ordered_json;

namespace {

void require_object(const json& node, const std::string& where) {
    if (!node.is_object()) throw config_error("config: " + where + " must be an object");
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* name : allowed)
            if (key == name) { ok = true; break; }
        if (!ok) throw config_error("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_field(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error(std::string("config: field '") + key + "' has the wrong type");
    }
}

InputSpec parse_input(const json& node) {
    require_object(node, "simulation.input");
    check_keys(node, "simulation.input",
               {"kind", "value", "amplitude", "period", "quad_coeff"});
    InputSpec spec;
    const auto kind = get_field<std::string>(node, "kind", "zero");
    if (kind == "zero") spec.kind = InputSpec::Kind::zero;
    else if (kind == "constant") spec.kind = InputSpec::Kind::constant;
    else if (kind == "chirp") spec.kind = InputSpec::Kind::chirp;
    else throw config_error("config: unknown input kind '" + kind + "'");
    spec.value = get_field(node, "value", spec.value);
    spec.amplitude = get_field(node, "amplitude", spec.amplitude);
    spec.period = get_field(node, "period", spec.period);
    spec.quad_coeff = get_field(node, "quad_coeff", spec.quad_coeff);
    spec.validate();
    return spec;
}

sim::NeuronParams parse_neuron_params(const json& node) {
    require_object(node, "simulation.neuron");
    check_keys(node, "simulation.neuron",
               {"c_m", "g_na", "g_k", "g_l", "g_w", "e_na", "e_k", "e_l", "i_b", "a", "b", "k",
                "x0"});
    sim::NeuronParams p;
    p.c_m = get_field(node, "c_m", p.c_m);
    p.g_na = get_field(node, "g_na", p.g_na);
    p.g_k = get_field(node, "g_k", p.g_k);
    p.g_l = get_field(node, "g_l", p.g_l);
    p.g_w = get_field(node, "g_w", p.g_w);
    p.e_na = get_field(node, "e_na", p.e_na);
    p.e_k = get_field(node, "e_k", p.e_k);
    p.e_l = get_field(node, "e_l", p.e_l);
    p.i_b = get_field(node, "i_b", p.i_b);
    p.a = get_field(node, "a", p.a);
    p.b = get_field(node, "b", p.b);
    p.k = get_field(node, "k", p.k);
    p.validate();
    return p;
}

NeuronX0Spec parse_neuron_x0(const json& node) {
    require_object(node, "simulation.neuron.x0");
    check_keys(node, "simulation.neuron.x0", {"kind", "v", "q", "n", "w"});
    NeuronX0Spec spec;
    const auto kind = get_field<std::string>(node, "kind", "rest");
    if (kind == "rest") spec.kind = NeuronX0Spec::Kind::rest;
    else if (kind == "limit_cycle") spec.kind = NeuronX0Spec::Kind::limit_cycle;
    else if (kind == "values") spec.kind = NeuronX0Spec::Kind::values;
    else throw config_error("config: unknown neuron x0 kind '" + kind + "'");
    spec.values.v = get_field(node, "v", spec.values.v);
    spec.values.q = get_field(node, "q", spec.values.q);
    spec.values.n = get_field(node, "n", spec.values.n);
    spec.values.w = get_field(node, "w", spec.values.w);
    return spec;
}

sim::HopfParams parse_hopf_params(const json& node, double x0[2]) {
    require_object(node, "simulation.hopf");
    check_keys(node, "simulation.hopf", {"mu", "rho", "sigma", "noise_d", "x0"});
    sim::HopfParams p;
    p.mu = get_field(node, "mu", p.mu);
    p.rho = get_field(node, "rho", p.rho);
    p.sigma = get_field(node, "sigma", p.sigma);
    p.noise_d = get_field(node, "noise_d", p.noise_d);
    if (node.contains("x0")) {
        const auto& arr = node.at("x0");
        if (!arr.is_array() || arr.size() != 2)
            throw config_error("config: simulation.hopf.x0 must be a two-element array");
        x0[0] = arr[0].get<double>();
        x0[1] = arr[1].get<double>();
    }
    p.validate();
    return p;
}

SimulationConfig parse_simulation(const json& node) {
    require_object(node, "simulation");
    check_keys(node, "simulation",
               {"dt", "n_steps", "substeps", "burn_in_steps", "input", "neuron", "hopf"});
    SimulationConfig cfg;
    cfg.dt = get_field(node, "dt", cfg.dt);
    cfg.n_steps = get_field(node, "n_steps", cfg.n_steps);
    cfg.substeps = get_field(node, "substeps", cfg.substeps);
    cfg.burn_in_steps = get_field(node, "burn_in_steps", cfg.burn_in_steps);
    if (node.contains("input")) cfg.input = parse_input(node.at("input"));
    if (node.contains("neuron")) {
        cfg.neuron = parse_neuron_params(node.at("neuron"));
        if (node.at("neuron").contains("x0"))
            cfg.neuron_x0 = parse_neuron_x0(node.at("neuron").at("x0"));
    }
    if (node.contains("hopf")) cfg.hopf = parse_hopf_params(node.at("hopf"), cfg.hopf_x0);
    return cfg;
}

LiftConfig parse_lift(const json& node) {
    require_object(node, "lift");
    check_keys(node, "lift",
               {"kind", "max_degree", "include_linear", "rbf_count", "rbf_ranges", "rbf_seed"});
    LiftConfig cfg;
    const auto kind = get_field<std::string>(node, "kind", "polynomial");
    if (kind == "polynomial") cfg.kind = koopman::LiftKind::polynomial;
    else if (kind == "rbf_then_polynomial") cfg.kind = koopman::LiftKind::rbf_then_polynomial;
    else throw config_error("config: unknown lift kind '" + kind + "'");
    cfg.max_degree = get_field(node, "max_degree", cfg.max_degree);
    cfg.include_linear = get_field(node, "include_linear", cfg.include_linear);
    cfg.rbf_count = get_field(node, "rbf_count", cfg.rbf_count);
    cfg.rbf_seed = get_field(node, "rbf_seed", cfg.rbf_seed);
    if (node.contains("rbf_ranges")) {
        for (const auto& pair : node.at("rbf_ranges")) {
            if (!pair.is_array() || pair.size() != 2)
                throw config_error("config: lift.rbf_ranges entries must be [lo, hi] pairs");
            cfg.rbf_ranges.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
    }
    return cfg;
}

FitConfig parse_fit(const json& node) {
    require_object(node, "fit");
    check_keys(node, "fit", {"mode", "zeta", "energy_target", "svd_cutoff", "train_samples"});
    FitConfig cfg;
    const auto mode = get_field<std::string>(node, "mode", "nonlinear_pod");
    if (mode == "linear_full") cfg.options.mode = koopman::FitMode::linear_full;
    else if (mode == "nonlinear_full") cfg.options.mode = koopman::FitMode::nonlinear_full;
    else if (mode == "nonlinear_pod") cfg.options.mode = koopman::FitMode::nonlinear_pod;
    else throw config_error("config: unknown fit mode '" + mode + "'");
    cfg.options.zeta = get_field(node, "zeta", cfg.options.zeta);
    cfg.options.energy_target = get_field(node, "energy_target", cfg.options.energy_target);
    cfg.options.svd_cutoff = get_field(node, "svd_cutoff", cfg.options.svd_cutoff);
    cfg.train_samples = get_field(node, "train_samples", cfg.train_samples);
    cfg.options.validate();
    if (cfg.train_samples < 0) throw config_error("config: fit.train_samples must be >= 0");
    return cfg;
}

vamp::PriorSpec parse_prior(const json& node) {
    require_object(node, "uq.prior");
    check_keys(node, "uq.prior", {"kind", "mean", "variance", "sparsity_rho"});
    const auto kind = get_field<std::string>(node, "kind", "bernoulli_gaussian");
    const double mean = get_field(node, "mean", 0.0);
    if (kind == "gaussian")
        return vamp::PriorSpec::gaussian_prior(mean, get_field(node, "variance", 1.0));
    if (kind == "bernoulli_gaussian")
        return vamp::PriorSpec::bernoulli_gaussian_prior(
            get_field(node, "sparsity_rho", 0.05), mean, get_field(node, "variance", 0.0));
    throw config_error("config: unknown prior kind '" + kind + "'");
}

uq::UqConfig parse_uq(const json& node) {
    require_object(node, "uq");
    check_keys(node, "uq",
               {"t_batch", "stride", "thresholds", "prior", "noise_precision", "max_iters",
                "damping", "tol", "handoff_index", "prediction_steps"});
    uq::UqConfig cfg;
    cfg.t_batch = get_field(node, "t_batch", cfg.t_batch);
    cfg.stride = get_field(node, "stride", cfg.stride);
    if (node.contains("thresholds"))
        cfg.thresholds = node.at("thresholds").get<std::vector<double>>();
    if (node.contains("prior")) cfg.prior = parse_prior(node.at("prior"));
    cfg.noise_precision = get_field(node, "noise_precision", cfg.noise_precision);
    cfg.vamp_opts.max_iters = get_field(node, "max_iters", cfg.vamp_opts.max_iters);
    cfg.vamp_opts.damping = get_field(node, "damping", cfg.vamp_opts.damping);
    cfg.vamp_opts.tol = get_field(node, "tol", cfg.vamp_opts.tol);
    cfg.handoff_index = get_field(node, "handoff_index", cfg.handoff_index);
    cfg.prediction_steps = get_field(node, "prediction_steps", cfg.prediction_steps);
    cfg.validate();
    return cfg;
}

FtleConfig parse_ftle(const json& node) {
    require_object(node, "ftle");
    check_keys(node, "ftle", {"window", "directions"});
    FtleConfig cfg;
    cfg.window = get_field(node, "window", cfg.window);
    if (node.contains("directions"))
        cfg.directions = node.at("directions").get<std::vector<Eigen::Index>>();
    if (cfg.window < 0.0) throw config_error("config: ftle.window must be >= 0");
    return cfg;
}

ExternalConfig parse_external(const json& node) {
    require_object(node, "external");
    check_keys(node, "external", {"path", "n_modes"});
    ExternalConfig cfg;
    cfg.path = get_field<std::string>(node, "path", "");
    cfg.n_modes = get_field(node, "n_modes", cfg.n_modes);
    return cfg;
}

}  // namespace

sim::InputSignal InputSpec::make() const {
    switch (kind) {
        case Kind::zero:
            return [](double) { return 0.0; };
        case Kind::constant: {
            const double v = value;
            return [v](double) { return v; };
        }
        case Kind::chirp: {
            const double a = amplitude, per = period, qc = quad_coeff;
            return [a, per, qc](double t) {
                return a * std::sin(2.0 * std::numbers::pi * t / per + qc * t * t);
            };
        }
    }
    throw config_error("input spec: unknown kind");
}

void InputSpec::validate() const {
    if (kind == Kind::chirp && !(period > 0.0))
        throw config_error("input spec: chirp period must be positive");
}

sim::NeuronState NeuronX0Spec::resolve(const sim::NeuronParams& params) const {
    switch (kind) {
        case Kind::rest: return sim::neuron_rest_state(params.e_l, params);
        case Kind::limit_cycle: return sim::neuron_limit_cycle_state();
        case Kind::values: return values;
    }
    throw config_error("neuron x0: unknown kind");
}

koopman::LiftSpec LiftConfig::make_spec(Eigen::Index p) const {
    koopman::LiftSpec spec;
    spec.kind = kind;
    spec.max_degree = max_degree;
    spec.include_linear = include_linear;
    if (kind == koopman::LiftKind::rbf_then_polynomial) {
        auto ranges = rbf_ranges;
        if (ranges.empty())
            throw config_error("config: lift.rbf_ranges required for the rbf kind");
        if (static_cast<Eigen::Index>(ranges.size()) != p)
            throw config_error("config: lift.rbf_ranges must have one [lo, hi] pair per "
                               "observable coordinate");
        spec.rbf_centers = koopman::draw_rbf_centers(rbf_count, ranges, rbf_seed);
    }
    return spec;
}

void PipelineConfig::validate() const {
    embedding.validate();
    uq.validate();
    if (simulation.n_steps < 0) throw config_error("config: simulation.n_steps must be >= 0");
    if (simulation.burn_in_steps < 0)
        throw config_error("config: simulation.burn_in_steps must be >= 0");
    if (!(simulation.dt > 0.0)) throw config_error("config: simulation.dt must be positive");
    if (simulation.substeps < 1) throw config_error("config: simulation.substeps must be >= 1");
    if (system == SystemKind::external) {
        if (external.path.empty())
            throw config_error("config: external.path required for system=external");
        if (external.n_modes < 1)
            throw config_error("config: external.n_modes must be >= 1 for system=external");
    }
    for (Eigen::Index size : sweep_batch_sizes)
        if (size < 1) throw config_error("config: sweep_batch_sizes entries must be >= 1");
}

PipelineConfig parse_config(const json& root) {
    require_object(root, "top level");
    check_keys(root, "top level",
               {"system", "seed", "output_dir", "simulation", "external", "embedding", "lift",
                "fit", "uq", "sweep_batch_sizes", "ftle"});

    PipelineConfig cfg;
    const auto system = get_field<std::string>(root, "system", "neuron");
    if (system == "neuron") cfg.system = SystemKind::neuron;
    else if (system == "hopf") cfg.system = SystemKind::hopf;
    else if (system == "external") cfg.system = SystemKind::external;
    else throw config_error("config: unknown system '" + system + "'");

    cfg.seed = get_field(root, "seed", cfg.seed);
    cfg.output_dir = get_field(root, "output_dir", cfg.output_dir);
    if (root.contains("simulation")) cfg.simulation = parse_simulation(root.at("simulation"));
    if (root.contains("external")) cfg.external = parse_external(root.at("external"));
    if (root.contains("embedding")) {
        require_object(root.at("embedding"), "embedding");
        check_keys(root.at("embedding"), "embedding", {"z"});
        cfg.embedding.z = get_field(root.at("embedding"), "z", cfg.embedding.z);
    }
    if (root.contains("lift")) cfg.lift = parse_lift(root.at("lift"));
    if (root.contains("fit")) cfg.fit = parse_fit(root.at("fit"));
    if (root.contains("uq")) cfg.uq = parse_uq(root.at("uq"));
    if (root.contains("sweep_batch_sizes"))
        cfg.sweep_batch_sizes = root.at("sweep_batch_sizes").get<std::vector<Eigen::Index>>();
    if (root.contains("ftle")) cfg.ftle = parse_ftle(root.at("ftle"));

    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(is);
    } catch (const json::exception& e) {
        throw config_error("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(root);
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
    json root;
    switch (cfg.system) {
        case SystemKind::neuron: root["system"] = "neuron"; break;
        case SystemKind::hopf: root["system"] = "hopf"; break;
        case SystemKind::external: root["system"] = "external"; break;
    }
    root["seed"] = cfg.seed;
    root["output_dir"] = cfg.output_dir;

    json input;
    switch (cfg.simulation.input.kind) {
        case InputSpec::Kind::zero: input["kind"] = "zero"; break;
        case InputSpec::Kind::constant: input["kind"] = "constant"; break;
        case InputSpec::Kind::chirp: input["kind"] = "chirp"; break;
    }
    input["value"] = cfg.simulation.input.value;
    input["amplitude"] = cfg.simulation.input.amplitude;
    input["period"] = cfg.simulation.input.period;
    input["quad_coeff"] = cfg.simulation.input.quad_coeff;

    const sim::NeuronParams& np = cfg.simulation.neuron;
    json x0;
    switch (cfg.simulation.neuron_x0.kind) {
        case NeuronX0Spec::Kind::rest: x0["kind"] = "rest"; break;
        case NeuronX0Spec::Kind::limit_cycle: x0["kind"] = "limit_cycle"; break;
        case NeuronX0Spec::Kind::values: x0["kind"] = "values"; break;
    }
    x0["v"] = cfg.simulation.neuron_x0.values.v;
    x0["q"] = cfg.simulation.neuron_x0.values.q;
    x0["n"] = cfg.simulation.neuron_x0.values.n;
    x0["w"] = cfg.simulation.neuron_x0.values.w;

    root["simulation"] = {
        {"dt", cfg.simulation.dt},
        {"n_steps", cfg.simulation.n_steps},
        {"substeps", cfg.simulation.substeps},
        {"burn_in_steps", cfg.simulation.burn_in_steps},
        {"input", input},
        {"neuron",
         {{"c_m", np.c_m}, {"g_na", np.g_na}, {"g_k", np.g_k}, {"g_l", np.g_l},
          {"g_w", np.g_w}, {"e_na", np.e_na}, {"e_k", np.e_k}, {"e_l", np.e_l},
          {"i_b", np.i_b}, {"a", np.a}, {"b", np.b}, {"k", np.k}, {"x0", x0}}},
        {"hopf",
         {{"mu", cfg.simulation.hopf.mu}, {"rho", cfg.simulation.hopf.rho},
          {"sigma", cfg.simulation.hopf.sigma}, {"noise_d", cfg.simulation.hopf.noise_d},
          {"x0", {cfg.simulation.hopf_x0[0], cfg.simulation.hopf_x0[1]}}}},
    };

    root["external"] = {{"path", cfg.external.path}, {"n_modes", cfg.external.n_modes}};
    root["embedding"] = {{"z", cfg.embedding.z}};

    json ranges = json::array();
    for (const auto& [lo, hi] : cfg.lift.rbf_ranges) ranges.push_back({lo, hi});
    root["lift"] = {
        {"kind", cfg.lift.kind == koopman::LiftKind::polynomial ? "polynomial"
                                                                : "rbf_then_polynomial"},
        {"max_degree", cfg.lift.max_degree},
        {"include_linear", cfg.lift.include_linear},
        {"rbf_count", cfg.lift.rbf_count},
        {"rbf_ranges", ranges},
        {"rbf_seed", cfg.lift.rbf_seed},
    };

    std::string fit_mode;
    switch (cfg.fit.options.mode) {
        case koopman::FitMode::linear_full: fit_mode = "linear_full"; break;
        case koopman::FitMode::nonlinear_full: fit_mode = "nonlinear_full"; break;
        case koopman::FitMode::nonlinear_pod: fit_mode = "nonlinear_pod"; break;
    }
    root["fit"] = {
        {"mode", fit_mode},
        {"zeta", cfg.fit.options.zeta},
        {"energy_target", cfg.fit.options.energy_target},
        {"svd_cutoff", cfg.fit.options.svd_cutoff},
        {"train_samples", cfg.fit.train_samples},
    };

    json prior;
    prior["kind"] = cfg.uq.prior.kind == vamp::PriorKind::gaussian ? "gaussian"
                                                                   : "bernoulli_gaussian";
    prior["mean"] = cfg.uq.prior.mean;
    prior["variance"] = cfg.uq.prior.variance;
    prior["sparsity_rho"] = cfg.uq.prior.sparsity_rho;
    root["uq"] = {
        {"t_batch", cfg.uq.t_batch},
        {"stride", cfg.uq.stride},
        {"thresholds", cfg.uq.thresholds},
        {"prior", prior},
        {"noise_precision", cfg.uq.noise_precision},
        {"max_iters", cfg.uq.vamp_opts.max_iters},
        {"damping", cfg.uq.vamp_opts.damping},
        {"tol", cfg.uq.vamp_opts.tol},
        {"handoff_index", cfg.uq.handoff_index},
        {"prediction_steps", cfg.uq.prediction_steps},
    };

    root["sweep_batch_sizes"] = cfg.sweep_batch_sizes;
    root["ftle"] = {{"window", cfg.ftle.window}, {"directions", cfg.ftle.directions}};
    return root;
}

}  // namespace koopuq::io
