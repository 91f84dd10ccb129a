#include "perpetuity/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perpetuity {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Thrown while walking the document; carries the key whose line gets reported.
struct SchemaError {
  std::string key;
  std::string message;
};

[[noreturn]] void schema(const std::string& key, const std::string& msg) { throw SchemaError{key, msg}; }

const json& require(const json& obj, const std::string& key) {
  if (!obj.is_object()) schema(key, "expected an object containing \"" + key + "\"");
  auto it = obj.find(key);
  if (it == obj.end()) schema(key, "missing required key \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) schema(key, "\"" + key + "\" must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) schema(key, "\"" + key + "\" must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::vector<std::pair<double, double>> pairs(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) schema(key, "\"" + key + "\" must be a nonempty array of [a, b] pairs");
  std::vector<std::pair<double, double>> out;
  for (const json& e : v) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      schema(key, "\"" + key + "\" entries must be [number, number]");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

}  // namespace

int line_of_key(std::string_view text, std::string_view key) {
  std::size_t pos = text.find("\"" + std::string(key) + "\"");
  if (key.empty() || pos == std::string_view::npos) pos = 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::PDelta: return "pdelta";
    case Command::Simulate: return "simulate";
    case Command::Bounds: return "bounds";
    case Command::Compare: return "compare";
    case Command::Oracle: return "oracle";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
  for (Command c : {Command::PDelta, Command::Simulate, Command::Bounds, Command::Compare, Command::Oracle})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

namespace {

DistSpec parse_dist(const json& j) {
  const json& type = require(j, "type");
  if (!type.is_string()) schema("type", "\"type\" must be a string");
  const std::string t = type.get<std::string>();
  if (t == "discrete") {
    DiscreteFinite d;
    for (auto [v, p] : pairs(require(j, "atoms"), "atoms")) d.atoms.push_back({v, p});
    return d;
  }
  if (t == "uniform") return UniformInterval{number(require(j, "a"), "a"), number(require(j, "b"), "b")};
  if (t == "cdf") {
    PiecewiseLinearCdf c;
    for (auto [v, f] : pairs(require(j, "knots"), "knots")) c.knots.push_back({v, f});
    return c;
  }
  schema("type", "unknown distribution type \"" + t + "\" (expected discrete, uniform or cdf)");
}

}  // namespace

DistSpec dist_spec_from_json(const json& j) {
  try {
    return parse_dist(j);
  } catch (const SchemaError& e) {
    throw ConfigError(1, e.message);
  }
}

json dist_spec_to_json(const DistSpec& spec) {
  return std::visit(Overloaded{
                        [](const DiscreteFinite& d) {
                          json atoms = json::array();
                          for (const Atom& a : d.atoms) atoms.push_back({a.value, a.prob});
                          return json{{"type", "discrete"}, {"atoms", atoms}};
                        },
                        [](const UniformInterval& u) { return json{{"type", "uniform"}, {"a", u.a}, {"b", u.b}}; },
                        [](const PiecewiseLinearCdf& p) {
                          json knots = json::array();
                          for (const CdfKnot& k : p.knots) knots.push_back({k.value, k.cdf});
                          return json{{"type", "cdf"}, {"knots", knots}};
                        },
                    },
                    spec);
}

std::vector<double> linear_grid(double start, double stop, std::uint64_t n) {
  if (n == 1) return {start};
  std::vector<double> xs(n);
  const double step = (stop - start) / static_cast<double>(n - 1);
  for (std::uint64_t i = 0; i < n; ++i) xs[i] = start + step * static_cast<double>(i);
  xs.back() = stop;
  return xs;
}

RunConfig parse_run_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to a line
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n'));
    throw ConfigError(line, std::string("JSON syntax error: ") + e.what());
  }

  try {
    if (!doc.is_object()) schema("", "config must be a JSON object");
    RunConfig cfg;
    const json& model = require(doc, "model");
    cfg.m = parse_dist(require(model, "m"));
    cfg.q = parse_dist(require(model, "q"));

    const json& xs = require(doc, "xs");
    if (xs.is_array()) {
      for (const json& x : xs) cfg.xs.push_back(number(x, "xs"));
    } else if (xs.is_object()) {
      const double start = number(require(xs, "start"), "start");
      const double stop = number(require(xs, "stop"), "stop");
      const std::uint64_t n = count(require(xs, "count"), "count");
      if (n == 0) schema("count", "\"count\" must be positive");
      if (n > 1 && !(stop > start)) schema("stop", "\"stop\" must exceed \"start\"");
      cfg.xs = linear_grid(start, stop, n);
    } else {
      schema("xs", "\"xs\" must be an array or {start, stop, count}");
    }
    if (cfg.xs.empty()) schema("xs", "\"xs\" must not be empty");
    for (std::size_t i = 0; i < cfg.xs.size(); ++i) {
      if (!std::isfinite(cfg.xs[i])) schema("xs", "\"xs\" entries must be finite");
      if (i > 0 && !(cfg.xs[i] > cfg.xs[i - 1])) schema("xs", "\"xs\" must be strictly increasing");
    }

    if (auto it = doc.find("sim"); it != doc.end()) {
      const json& sim = *it;
      if (!sim.is_object()) schema("sim", "\"sim\" must be an object");
      if (sim.contains("n_samples")) cfg.sim.n_samples = count(sim["n_samples"], "n_samples");
      if (sim.contains("seed")) cfg.sim.seed = count(sim["seed"], "seed");
      if (sim.contains("truncation_eps")) cfg.sim.truncation_eps = number(sim["truncation_eps"], "truncation_eps");
      if (sim.contains("max_terms")) cfg.sim.max_terms = count(sim["max_terms"], "max_terms");
      if (sim.contains("workers")) cfg.sim.worker_hint = static_cast<unsigned>(count(sim["workers"], "workers"));
      if (cfg.sim.n_samples < 1) schema("n_samples", "\"n_samples\" must be at least 1");
      if (!(cfg.sim.truncation_eps > 0.0 && cfg.sim.truncation_eps < 1.0))
        schema("truncation_eps", "\"truncation_eps\" must lie in (0, 1)");
      if (cfg.sim.max_terms < 1) schema("max_terms", "\"max_terms\" must be at least 1");
      if (cfg.sim.worker_hint && *cfg.sim.worker_hint == 0) schema("workers", "\"workers\" must be positive");
    }

    if (auto it = doc.find("commands"); it != doc.end()) {
      if (!it->is_array()) schema("commands", "\"commands\" must be an array of strings");
      for (const json& c : *it) {
        if (!c.is_string()) schema("commands", "\"commands\" must be an array of strings");
        auto cmd = parse_command(c.get<std::string>());
        if (!cmd) schema("commands", "unknown command \"" + c.get<std::string>() + "\"");
        cfg.commands.push_back(*cmd);
      }
    }
    if (auto it = doc.find("output_path"); it != doc.end()) {
      if (!it->is_string()) schema("output_path", "\"output_path\" must be a string");
      cfg.output_path = it->get<std::string>();
    }
    if (auto it = doc.find("use_abs"); it != doc.end()) {
      if (!it->is_boolean()) schema("use_abs", "\"use_abs\" must be a boolean");
      cfg.use_abs = it->get<bool>();
    }
    if (auto it = doc.find("oracle_steps"); it != doc.end()) cfg.oracle_steps = count(*it, "oracle_steps");
    return cfg;
  } catch (const SchemaError& e) {
    throw ConfigError(line_of_key(text, e.key), e.message);
  } catch (const json::exception& e) {
    throw ConfigError(1, e.what());
  }
}

}  // namespace perpetuity
