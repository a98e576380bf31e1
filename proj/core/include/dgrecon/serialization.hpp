#pragma once

#include <string>

#include "dgrecon/piecewise_poly.hpp"

namespace dgrecon {

/// {"nodes": [...]}
std::string to_json(const TimePartition& partition);
TimePartition partition_from_json(const std::string& text);

/// {"nodes": [...], "degree": l, "space_dim": m, "coefficients": [[...], ...]}
/// with one row per (interval, mode) pair, interval-major.
std::string to_json(const PiecewisePoly& u);
PiecewisePoly piecewise_poly_from_json(const std::string& text);

} // namespace dgrecon
