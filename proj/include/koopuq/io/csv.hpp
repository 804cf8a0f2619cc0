#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "koopuq/types.hpp"

namespace koopuq::io {

// Time-series CSV: a comment header declaring dt and t0, a column-name row,
// then one row per sample (t, obs_*, in_*, state_*, optional region tag).
// See docs/formats.md.
void write_time_series_csv(std::ostream& os, const TimeSeriesData& data);

// Same schema with a trailing `region` column: `truth` rows first (the
// series up to the handoff), then `predicted` rows. Predicted rows carry no
// state columns, so states are omitted entirely.
void write_prediction_csv(std::ostream& os, const TimeSeriesData& truth_part,
                          const TimeSeriesData& predicted_part);

// Reads either flavor back (a region column, when present, is ignored).
TimeSeriesData read_time_series_csv(std::istream& is);

TimeSeriesData read_time_series_csv_file(const std::string& path);
void write_time_series_csv_file(const std::string& path, const TimeSeriesData& data);

// Raw snapshot matrix with optional input channels; one CSV row per
// snapshot. Column count per row is x-dimension + input count.
struct SnapshotDataset {
    double dt = 0.0;
    Eigen::MatrixXd snapshots;  // n x q, one column per snapshot
    Eigen::MatrixXd inputs;     // m x q

    Eigen::Index count() const { return snapshots.cols(); }
    Eigen::Index dim() const { return snapshots.rows(); }
};

// Parses a snapshot CSV (header comment with dt, column names x_* / in_*).
// Malformed cells raise data_error naming the file line; non-finite values
// are rejected unless allow_nan is set.
SnapshotDataset ingest_csv(const std::string& path, bool allow_nan = false);

void write_snapshot_csv(std::ostream& os, const SnapshotDataset& dataset);
void write_snapshot_csv_file(const std::string& path, const SnapshotDataset& dataset);

// Observables for model fitting from raw snapshots: coefficients of the
// leading n_modes POD modes of the mean-centered snapshot matrix.
struct PodProjection {
    TimeSeriesData series;        // observables = mode coefficients; inputs passed through
    double energy_fraction = 0.0;
    Eigen::MatrixXd modes;        // n x n_modes, orthonormal
    Eigen::VectorXd mean;         // n, the subtracted mean snapshot
};

PodProjection project_pod_observables(const SnapshotDataset& dataset, Eigen::Index n_modes);

}  // namespace koopuq::io
