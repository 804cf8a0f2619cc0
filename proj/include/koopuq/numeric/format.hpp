#pragma once

#include <string>

namespace koopuq::numeric {

// Shortest decimal representation that round-trips to the same double,
// locale-independent (std::to_chars).
std::string format_double(double value);

// Strict locale-independent parse of a full cell; throws data_error with
// `context` in the message when the cell is not a single finite number.
double parse_double(const std::string& cell, const std::string& context);

}  // namespace koopuq::numeric
