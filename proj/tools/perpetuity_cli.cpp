// perpetuity: simulate R = MR + Q, estimate P(|R| > x) and compare with tail bounds.
//
//   perpetuity --config run.json [--seed N] [--workers N] [--out PATH]
//              [--command NAME]... [--svg PATH]
//
// Writes PATH (CSV) and PATH.meta.json. Exit codes: 0 success, 1 runtime
// failure, 2 invalid config or model, 3 unsupported regime.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "perpetuity/config.hpp"
#include "perpetuity/error.hpp"
#include "perpetuity/pipeline.hpp"

namespace {

enum class Level { Error = 0, Info = 1, Debug = 2 };

Level log_level() {
  const char* env = std::getenv("PERPETUITY_LOG");
  const std::string v = env ? env : "error";
  if (v == "debug") return Level::Debug;
  if (v == "info") return Level::Info;
  return Level::Error;
}

void log(Level level, const std::string& msg) {
  static const Level threshold = log_level();
  if (level > threshold) return;
  static constexpr const char* kNames[] = {"error", "info", "debug"};
  std::cerr << "[perpetuity " << kNames[static_cast<int>(level)] << "] " << msg << '\n';
}

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitUnsupported = 3;

bool write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << contents;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo tails and tail bounds for perpetuities R = MR + Q"};
  std::string config_path;
  std::string out_path;
  std::string svg_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::vector<std::string> commands;
  app.add_option("--config", config_path, "JSON run config")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--workers", workers, "Worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "CSV output path (overrides output_path)");
  app.add_option("--command", commands, "pdelta, simulate, bounds, compare or oracle (repeatable)")
      ->check(CLI::IsMember({"pdelta", "simulate", "bounds", "compare", "oracle"}));
  app.add_option("--svg", svg_path, "Also write a log-scale plot of the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << config_path << ":1: cannot open config\n";
    return kExitInvalid;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  const std::string text = buffer.str();
  perpetuity::RunConfig config;
  try {
    config = perpetuity::parse_run_config(text);
  } catch (const perpetuity::ConfigError& e) {
    std::cerr << config_path << ':' << e.line() << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  if (seed) config.sim.seed = *seed;
  if (workers) config.sim.worker_hint = *workers;
  if (!out_path.empty()) config.output_path = out_path;
  for (const std::string& name : commands) config.commands.push_back(*perpetuity::parse_command(name));
  if (config.output_path.empty()) {
    std::cerr << config_path << ":1: no output path (set output_path or pass --out)\n";
    return kExitInvalid;
  }

  try {
    const perpetuity::PerpetuityModel model = perpetuity::validate_model(config.m, config.q);
    log(Level::Info, "model accepted: q_bound=" + perpetuity::format_double(model.q_bound) +
                         " E|M|=" + perpetuity::format_double(model.mean_abs_m));
    const perpetuity::PipelineOutput result = perpetuity::run_pipeline(config, model);
    if (!write_file(config.output_path, result.csv)) {
      std::cerr << config.output_path << ": cannot write CSV\n";
      return kExitInvalid;
    }
    const std::string meta_path = config.output_path + ".meta.json";
    if (!write_file(meta_path, result.metadata.dump(2) + "\n")) {
      std::cerr << meta_path << ": cannot write metadata\n";
      return kExitInvalid;
    }
    if (!svg_path.empty() && !write_file(svg_path, perpetuity::render_svg(result.csv))) {
      std::cerr << svg_path << ": cannot write SVG\n";
      return kExitInvalid;
    }
    log(Level::Info, "wrote " + config.output_path + " and " + meta_path);
    log(Level::Debug, result.metadata.dump());
    return kExitOk;
  } catch (const perpetuity::Error& e) {
    switch (e.kind()) {
      case perpetuity::ErrorKind::UnsupportedRegime:
        std::cerr << config_path << ':' << perpetuity::line_of_key(text, "m") << ": " << e.what() << '\n';
        return kExitUnsupported;
      case perpetuity::ErrorKind::InvalidSpec:
      case perpetuity::ErrorKind::InvalidArgument:
      case perpetuity::ErrorKind::DegenerateModel:
        std::cerr << config_path << ':' << perpetuity::line_of_key(text, "model") << ": " << e.what() << '\n';
        return kExitInvalid;
      default:
        log(Level::Error, e.what());
        return kExitRuntime;
    }
  }
}
