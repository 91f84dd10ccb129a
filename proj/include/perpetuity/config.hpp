#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "perpetuity/dist.hpp"
#include "perpetuity/simulate.hpp"

namespace perpetuity {

enum class Command { PDelta, Simulate, Bounds, Compare, Oracle };

std::string_view to_string(Command c) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

struct RunConfig {
  DistSpec m;
  DistSpec q;
  std::vector<double> xs;
  SimConfig sim;
  std::vector<Command> commands;
  std::string output_path;
  bool use_abs = true;
  std::uint64_t oracle_steps = 10;
};

/// Malformed configuration. `line` is 1-based within the config text.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg) : std::runtime_error(msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// {"type":"discrete","atoms":[[v,p],...]}, {"type":"uniform","a":..,"b":..}
/// or {"type":"cdf","knots":[[v,F],...]}. Structural checks happen later in
/// validate_spec; this only enforces the JSON shape.
DistSpec dist_spec_from_json(const nlohmann::json& j);
nlohmann::json dist_spec_to_json(const DistSpec& spec);

/// Linear grid of `count` points from start to stop inclusive.
std::vector<double> linear_grid(double start, double stop, std::uint64_t count);

RunConfig parse_run_config(std::string_view text);

/// 1-based line of the first occurrence of "key" in the config text (1 if absent).
int line_of_key(std::string_view text, std::string_view key);

}  // namespace perpetuity
