#include "koopuq/io/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "koopuq/errors.hpp"
#include "koopuq/numeric/format.hpp"
#include "koopuq/numeric/linalg.hpp"

namespace koopuq::io {

using numeric::format_double;
using numeric::parse_double;

namespace {

constexpr const char* kTimeSeriesTag = "koopuq-timeseries v1";
constexpr const char* kSnapshotTag = "koopuq-snapshots v1";

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// Header comment of the form "# <tag> key=value ...". Returns the key/value
// pairs; throws when the tag does not match.
std::vector<std::pair<std::string, double>> parse_header(const std::string& line,
                                                         const std::string& tag) {
    const std::string prefix = "# " + tag;
    if (line.rfind(prefix, 0) != 0)
        throw data_error("csv: expected header '# " + tag + " ...', got '" + line + "'");
    std::vector<std::pair<std::string, double>> pairs;
    std::istringstream ss(line.substr(prefix.size()));
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw data_error("csv: malformed header token '" + token + "'");
        pairs.emplace_back(token.substr(0, eq),
                           parse_double(token.substr(eq + 1), "csv header"));
    }
    return pairs;
}

// Counts columns named `prefix`0.. in order starting at `at`; they must be
// contiguous and correctly numbered.
Eigen::Index count_prefixed(const std::vector<std::string>& names, std::size_t at,
                            const std::string& prefix) {
    Eigen::Index n = 0;
    while (at + static_cast<std::size_t>(n) < names.size() &&
           names[at + static_cast<std::size_t>(n)] == prefix + std::to_string(n))
        ++n;
    return n;
}

void write_series_rows(std::ostream& os, const TimeSeriesData& data, bool with_states,
                       const char* region) {
    for (Eigen::Index k = 0; k < data.length(); ++k) {
        os << format_double(data.time(k));
        for (Eigen::Index i = 0; i < data.obs_dim(); ++i)
            os << ',' << format_double(data.observables(i, k));
        for (Eigen::Index i = 0; i < data.input_dim(); ++i)
            os << ',' << format_double(data.inputs(i, k));
        if (with_states)
            for (Eigen::Index i = 0; i < data.states.rows(); ++i)
                os << ',' << format_double(data.states(i, k));
        if (region != nullptr) os << ',' << region;
        os << '\n';
    }
}

void write_series_header(std::ostream& os, const TimeSeriesData& data, bool with_states,
                         bool with_region) {
    os << "# " << kTimeSeriesTag << " dt=" << format_double(data.dt)
       << " t0=" << format_double(data.t0) << '\n';
    os << 't';
    for (Eigen::Index i = 0; i < data.obs_dim(); ++i) os << ",obs_" << i;
    for (Eigen::Index i = 0; i < data.input_dim(); ++i) os << ",in_" << i;
    if (with_states)
        for (Eigen::Index i = 0; i < data.states.rows(); ++i) os << ",state_" << i;
    if (with_region) os << ",region";
    os << '\n';
}

}  // namespace

void write_time_series_csv(std::ostream& os, const TimeSeriesData& data) {
    data.validate();
    write_series_header(os, data, data.has_states(), false);
    write_series_rows(os, data, data.has_states(), nullptr);
}

void write_prediction_csv(std::ostream& os, const TimeSeriesData& truth_part,
                          const TimeSeriesData& predicted_part) {
    truth_part.validate();
    predicted_part.validate();
    if (truth_part.obs_dim() != predicted_part.obs_dim() ||
        truth_part.input_dim() != predicted_part.input_dim())
        throw data_error("prediction csv: truth and predicted dimensions differ");
    write_series_header(os, truth_part, false, true);
    write_series_rows(os, truth_part, false, "truth");
    write_series_rows(os, predicted_part, false, "predicted");
}

TimeSeriesData read_time_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw data_error("time series csv: empty stream");
    TimeSeriesData data;
    bool saw_dt = false;
    for (const auto& [key, value] : parse_header(strip_cr(line), kTimeSeriesTag)) {
        if (key == "dt") { data.dt = value; saw_dt = true; }
        else if (key == "t0") data.t0 = value;
        else throw data_error("time series csv: unknown header key '" + key + "'");
    }
    if (!saw_dt) throw data_error("time series csv: header does not declare dt");

    if (!std::getline(is, line)) throw data_error("time series csv: missing column row");
    const auto names = split_csv_row(strip_cr(line));
    if (names.empty() || names[0] != "t")
        throw data_error("time series csv: first column must be t");

    std::size_t at = 1;
    const Eigen::Index p = count_prefixed(names, at, "obs_");
    at += static_cast<std::size_t>(p);
    const Eigen::Index m = count_prefixed(names, at, "in_");
    at += static_cast<std::size_t>(m);
    const Eigen::Index n = count_prefixed(names, at, "state_");
    at += static_cast<std::size_t>(n);
    bool has_region = false;
    if (at < names.size() && names[at] == "region") { has_region = true; ++at; }
    if (p < 1 || at != names.size())
        throw data_error("time series csv: unrecognized column layout");

    std::vector<std::vector<double>> rows;
    const std::size_t expected = 1 + static_cast<std::size_t>(p + m + n) + (has_region ? 1 : 0);
    Eigen::Index line_no = 2;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string clean = strip_cr(line);
        if (clean.empty()) continue;
        const auto cells = split_csv_row(clean);
        if (cells.size() != expected)
            throw data_error("time series csv: line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(expected));
        std::vector<double> row;
        row.reserve(expected - (has_region ? 1 : 0));
        for (std::size_t c = 0; c + (has_region ? 1 : 0) < cells.size(); ++c)
            row.push_back(parse_double(cells[c],
                                       "time series csv line " + std::to_string(line_no)));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("time series csv: no data rows");

    const auto q = static_cast<Eigen::Index>(rows.size());
    data.observables.resize(p, q);
    data.inputs.resize(m, q);
    data.states.resize(n, q);
    for (Eigen::Index k = 0; k < q; ++k) {
        std::size_t c = 1;  // skip t
        for (Eigen::Index i = 0; i < p; ++i) data.observables(i, k) = rows[k][c++];
        for (Eigen::Index i = 0; i < m; ++i) data.inputs(i, k) = rows[k][c++];
        for (Eigen::Index i = 0; i < n; ++i) data.states(i, k) = rows[k][c++];
    }
    if (n == 0) data.states.resize(0, 0);
    data.validate();
    return data;
}

TimeSeriesData read_time_series_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw data_error("time series csv: cannot open '" + path + "'");
    return read_time_series_csv(is);
}

void write_time_series_csv_file(const std::string& path, const TimeSeriesData& data) {
    std::ofstream os(path);
    if (!os) throw data_error("time series csv: cannot open '" + path + "' for writing");
    write_time_series_csv(os, data);
    if (!os) throw data_error("time series csv: write to '" + path + "' failed");
}

SnapshotDataset ingest_csv(const std::string& path, bool allow_nan) {
    std::ifstream is(path);
    if (!is) throw data_error("snapshot csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(is, line)) throw data_error("snapshot csv: '" + path + "' is empty");
    SnapshotDataset dataset;
    bool saw_dt = false;
    for (const auto& [key, value] : parse_header(strip_cr(line), kSnapshotTag)) {
        if (key == "dt") { dataset.dt = value; saw_dt = true; }
        else throw data_error("snapshot csv: unknown header key '" + key + "'");
    }
    if (!saw_dt) throw data_error("snapshot csv: header does not declare dt");
    if (!(dataset.dt > 0.0)) throw data_error("snapshot csv: dt must be positive");

    if (!std::getline(is, line)) throw data_error("snapshot csv: missing column row");
    const auto names = split_csv_row(strip_cr(line));
    const Eigen::Index n = count_prefixed(names, 0, "x_");
    const Eigen::Index m = count_prefixed(names, static_cast<std::size_t>(n), "in_");
    if (n < 1 || static_cast<std::size_t>(n + m) != names.size())
        throw data_error("snapshot csv: columns must be x_0..x_{n-1} then optional in_0..");

    std::vector<std::vector<double>> rows;
    Eigen::Index line_no = 2;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string clean = strip_cr(line);
        if (clean.empty()) continue;
        const auto cells = split_csv_row(clean);
        if (static_cast<Eigen::Index>(cells.size()) != n + m)
            throw data_error("snapshot csv: line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(n + m));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            row[c] = parse_double(cells[c], "snapshot csv line " + std::to_string(line_no));
            if (!allow_nan && !std::isfinite(row[c]))
                throw data_error("snapshot csv: non-finite value on line " +
                                 std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error("snapshot csv: no data rows");

    const auto q = static_cast<Eigen::Index>(rows.size());
    dataset.snapshots.resize(n, q);
    dataset.inputs.resize(m, q);
    for (Eigen::Index k = 0; k < q; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) dataset.snapshots(i, k) = rows[k][i];
        for (Eigen::Index i = 0; i < m; ++i) dataset.inputs(i, k) = rows[k][n + i];
    }
    return dataset;
}

void write_snapshot_csv(std::ostream& os, const SnapshotDataset& dataset) {
    os << "# " << kSnapshotTag << " dt=" << format_double(dataset.dt) << '\n';
    for (Eigen::Index i = 0; i < dataset.dim(); ++i) os << (i == 0 ? "" : ",") << "x_" << i;
    for (Eigen::Index i = 0; i < dataset.inputs.rows(); ++i) os << ",in_" << i;
    os << '\n';
    for (Eigen::Index k = 0; k < dataset.count(); ++k) {
        for (Eigen::Index i = 0; i < dataset.dim(); ++i)
            os << (i == 0 ? "" : ",") << format_double(dataset.snapshots(i, k));
        for (Eigen::Index i = 0; i < dataset.inputs.rows(); ++i)
            os << ',' << format_double(dataset.inputs(i, k));
        os << '\n';
    }
}

void write_snapshot_csv_file(const std::string& path, const SnapshotDataset& dataset) {
    std::ofstream os(path);
    if (!os) throw data_error("snapshot csv: cannot open '" + path + "' for writing");
    write_snapshot_csv(os, dataset);
    if (!os) throw data_error("snapshot csv: write to '" + path + "' failed");
}

PodProjection project_pod_observables(const SnapshotDataset& dataset, Eigen::Index n_modes) {
    if (dataset.count() < 2) throw data_error("pod projection: need at least two snapshots");
    if (n_modes < 1) throw config_error("pod projection: n_modes must be >= 1");

    PodProjection out;
    out.mean = dataset.snapshots.rowwise().mean();
    const Eigen::MatrixXd centered = dataset.snapshots.colwise() - out.mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
    const Eigen::Index rank = numeric::svd_rank(svd.singularValues(), 1e-12);
    if (n_modes > rank)
        throw data_error("pod projection: requested " + std::to_string(n_modes) +
                         " modes, centered snapshots have numerical rank " +
                         std::to_string(rank));

    out.modes = svd.matrixU().leftCols(n_modes);
    const Eigen::VectorXd energies = svd.singularValues().array().square();
    out.energy_fraction = energies.head(n_modes).sum() / energies.sum();

    out.series.dt = dataset.dt;
    out.series.observables = out.modes.transpose() * centered;
    out.series.inputs = dataset.inputs;
    return out;
}

}  // namespace koopuq::io
