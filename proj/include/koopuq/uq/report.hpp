#pragma once

#include <iosfwd>

#include "koopuq/uq/pipeline.hpp"

namespace koopuq::uq {

// Full report as JSON (config echo, per-batch records, per-step errors,
// window curve).
void write_report_json(std::ostream& os, const UncertaintyReport& report);

// Tidy per-batch rows: t0 (time units), sigma2, normalized, max_error.
void write_variance_csv(std::ostream& os, const UncertaintyReport& report);

// Tidy sweep rows: batch_size, threshold, window_pct.
void write_window_csv(std::ostream& os, const WindowCurve& curve);

}  // namespace koopuq::uq
