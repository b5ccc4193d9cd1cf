#pragma once

#include <span>
#include <string>

#include "resobs/harness.hpp"

namespace resobs {

/// MSE-vs-parameter scatter of every successful trial plus the median curve.
/// Each point carries data-value / data-mse attributes with the plotted numbers.
std::string render_sweep_svg(std::span<const SweepRecord> records, const std::string& parameter);

/// Median MSE bar per topology, annotated with the published reference value.
std::string render_comparison_svg(std::span<const ComparisonRecord> records);

} // namespace resobs
