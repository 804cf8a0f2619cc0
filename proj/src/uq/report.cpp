#include "koopuq/uq/report.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "koopuq/numeric/format.hpp"

namespace koopuq::uq {

using json = nlohmann::ordered_json;
using numeric::format_double;

void write_report_json(std::ostream& os, const UncertaintyReport& report) {
    json root;
    root["t_batch"] = report.t_batch;
    root["stride"] = report.stride;
    root["n_prediction_steps"] = report.n_prediction_steps;
    root["handoff_index"] = report.handoff_index;
    root["dt"] = report.dt;
    root["t_start"] = report.t_start;
    root["thresholds"] = report.thresholds;
    root["prior_variance"] = report.prior_variance;
    root["noise_precision"] = report.noise_precision;

    json batches = json::array();
    for (const auto& b : report.per_batch) {
        json entry;
        entry["t0"] = b.t0;
        entry["time"] = report.t_start + report.dt * static_cast<double>(b.t0);
        entry["sigma2"] = b.sigma2;
        entry["normalized"] = b.normalized;
        entry["max_error"] = b.max_error;
        json flags = json::array();
        for (bool f : b.flags) flags.push_back(f);
        entry["flags"] = flags;
        batches.push_back(entry);
    }
    root["per_batch"] = batches;
    root["per_step_error"] = report.per_step_error;

    json curve = json::array();
    for (const auto& [size, row] : report.window_curve)
        for (const auto& [threshold, pct] : row)
            curve.push_back({{"batch_size", size}, {"threshold", threshold}, {"window_pct", pct}});
    root["window_curve"] = curve;

    os << root.dump(2) << '\n';
}

void write_variance_csv(std::ostream& os, const UncertaintyReport& report) {
    os << "t0,sigma2,normalized,max_error\n";
    for (const auto& b : report.per_batch) {
        const double t = report.t_start + report.dt * static_cast<double>(b.t0);
        os << format_double(t) << ',' << format_double(b.sigma2) << ','
           << format_double(b.normalized) << ',' << format_double(b.max_error) << '\n';
    }
}

void write_window_csv(std::ostream& os, const WindowCurve& curve) {
    os << "batch_size,threshold,window_pct\n";
    for (const auto& [size, row] : curve)
        for (const auto& [threshold, pct] : row)
            os << size << ',' << format_double(threshold) << ',' << format_double(pct) << '\n';
}

}  // namespace koopuq::uq
