#include "koopuq/koopman/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "koopuq/errors.hpp"

// The raw float64 blocks are written in native byte order.
static_assert(std::endian::native == std::endian::little,
              "model artifacts assume a little-endian host");

namespace koopuq::koopman {

namespace {

constexpr char kMagic[8] = {'K', 'Q', 'M', 'O', 'D', 'E', 'L', '1'};

using json = nlohmann::json;

std::string mode_name(FitMode mode) {
    switch (mode) {
        case FitMode::linear_full: return "linear_full";
        case FitMode::nonlinear_full: return "nonlinear_full";
        case FitMode::nonlinear_pod: return "nonlinear_pod";
    }
    throw data_error("model artifact: unknown fit mode");
}

FitMode mode_from_name(const std::string& name) {
    if (name == "linear_full") return FitMode::linear_full;
    if (name == "nonlinear_full") return FitMode::nonlinear_full;
    if (name == "nonlinear_pod") return FitMode::nonlinear_pod;
    throw data_error("model artifact: unknown fit mode '" + name + "'");
}

std::string lift_kind_name(LiftKind kind) {
    return kind == LiftKind::polynomial ? "polynomial" : "rbf_then_polynomial";
}

LiftKind lift_kind_from_name(const std::string& name) {
    if (name == "polynomial") return LiftKind::polynomial;
    if (name == "rbf_then_polynomial") return LiftKind::rbf_then_polynomial;
    throw data_error("model artifact: unknown lift kind '" + name + "'");
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) {
            const double v = mat(i, j);
            os.write(reinterpret_cast<const char*>(&v), sizeof(double));
        }
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols,
                            const std::string& name) {
    Eigen::MatrixXd mat(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = 0.0;
            is.read(reinterpret_cast<char*>(&v), sizeof(double));
            if (!is) throw data_error("model artifact: truncated matrix block '" + name + "'");
            mat(i, j) = v;
        }
    return mat;
}

}  // namespace

void save_model(const std::string& path, const KoopmanModel& model) {
    model.validate();

    json header;
    header["version"] = 1;
    header["mode"] = mode_name(model.mode);
    header["dt"] = model.dt;
    header["p"] = model.p;
    header["m"] = model.m;
    header["L"] = model.ell;
    header["embedding"] = {{"z", model.embedding.z}};
    header["lift"] = {{"kind", lift_kind_name(model.lift.kind)},
                      {"max_degree", model.lift.max_degree},
                      {"include_linear", model.lift.include_linear},
                      {"dim_cap", model.lift.dim_cap}};
    header["training_residual_variance"] = model.training_residual_variance;

    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> blocks;
    blocks.emplace_back("op", &model.op);
    Eigen::MatrixXd eigenvalues;
    if (model.mode == FitMode::nonlinear_pod) {
        header["pod"] = {{"energy_fraction", model.pod.energy_fraction}};
        eigenvalues = model.pod.eigenvalues;
        blocks.emplace_back("phi", &model.pod.phi);
        blocks.emplace_back("pod_eigenvalues", &eigenvalues);
    }
    if (model.lift.kind == LiftKind::rbf_then_polynomial)
        blocks.emplace_back("rbf_centers", &model.lift.rbf_centers);

    json manifest = json::array();
    for (const auto& [name, mat] : blocks)
        manifest.push_back({{"name", name}, {"rows", mat->rows()}, {"cols", mat->cols()}});
    header["matrices"] = manifest;

    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("model artifact: cannot open '" + path + "' for writing");

    const std::string text = header.dump();
    const auto length = static_cast<std::uint64_t>(text.size());
    os.write(kMagic, sizeof(kMagic));
    os.write(reinterpret_cast<const char*>(&length), sizeof(length));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, mat] : blocks) write_matrix(os, *mat);
    if (!os) throw data_error("model artifact: write to '" + path + "' failed");
}

KoopmanModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("model artifact: cannot open '" + path + "'");

    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || !std::equal(magic, magic + 8, kMagic))
        throw data_error("model artifact: '" + path + "' has the wrong magic tag");

    std::uint64_t length = 0;
    is.read(reinterpret_cast<char*>(&length), sizeof(length));
    if (!is) throw data_error("model artifact: truncated header length");
    std::string text(length, '\0');
    is.read(text.data(), static_cast<std::streamsize>(length));
    if (!is) throw data_error("model artifact: truncated header");

    json header;
    try {
        header = json::parse(text);
    } catch (const json::exception& e) {
        throw data_error(std::string("model artifact: header is not valid JSON: ") + e.what());
    }

    try {
        if (header.at("version").get<int>() != 1)
            throw data_error("model artifact: unsupported version");

        KoopmanModel model;
        model.mode = mode_from_name(header.at("mode").get<std::string>());
        model.dt = header.at("dt").get<double>();
        model.p = header.at("p").get<Eigen::Index>();
        model.m = header.at("m").get<Eigen::Index>();
        model.ell = header.at("L").get<Eigen::Index>();
        model.embedding.z = header.at("embedding").at("z").get<int>();
        const auto& lift = header.at("lift");
        model.lift.kind = lift_kind_from_name(lift.at("kind").get<std::string>());
        model.lift.max_degree = lift.at("max_degree").get<int>();
        model.lift.include_linear = lift.at("include_linear").get<bool>();
        model.lift.dim_cap = lift.at("dim_cap").get<Eigen::Index>();
        model.training_residual_variance = header.at("training_residual_variance").get<double>();
        if (header.contains("pod"))
            model.pod.energy_fraction = header["pod"].at("energy_fraction").get<double>();

        for (const auto& entry : header.at("matrices")) {
            const auto name = entry.at("name").get<std::string>();
            const auto rows = entry.at("rows").get<Eigen::Index>();
            const auto cols = entry.at("cols").get<Eigen::Index>();
            Eigen::MatrixXd mat = read_matrix(is, rows, cols, name);
            if (name == "op") model.op = std::move(mat);
            else if (name == "phi") model.pod.phi = std::move(mat);
            else if (name == "pod_eigenvalues") model.pod.eigenvalues = mat.col(0);
            else if (name == "rbf_centers") model.lift.rbf_centers = std::move(mat);
            else throw data_error("model artifact: unknown matrix block '" + name + "'");
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw data_error(std::string("model artifact: malformed header: ") + e.what());
    }
}

}  // namespace koopuq::koopman
