#pragma once

#include <array>
#include <string>
#include <string_view>

#include <json.hpp>

#include "perpetuity/config.hpp"
#include "perpetuity/dist.hpp"

namespace perpetuity {

inline constexpr int kCsvSchemaVersion = 1;

inline constexpr std::array<std::string_view, 14> kCsvColumns = {
    "x",       "n",              "exceed_count",    "tail_est",          "ci_lo",
    "ci_hi",   "lb_gg",          "lb_simple",       "ub_paper",          "ub_paper_valid",
    "ub_chernoff_log", "ub_chernoff_delta", "ub_chernoff_lambda", "flags"};

struct PipelineOutput {
  std::string csv;
  // Everything in the metadata except wall time is a deterministic function
  // of the config.
  nlohmann::json metadata;
};

/// Runs the configured commands (compare when none are given) over the x grid.
/// Columns a command does not produce, or that are inapplicable to the model,
/// hold "NA". The CSV depends only on the config, never on the worker count.
PipelineOutput run_pipeline(const RunConfig& config, const PerpetuityModel& model);

/// %.17g, which round-trips every finite double.
std::string format_double(double v);

/// Log-scale plot of the tail estimate and bound columns of a pipeline CSV.
std::string render_svg(std::string_view csv);

}  // namespace perpetuity
