#include "perpetuity/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "perpetuity/bounds.hpp"
#include "perpetuity/error.hpp"
#include "perpetuity/oracle.hpp"
#include "perpetuity/simulate.hpp"

namespace perpetuity {
namespace {

using nlohmann::json;

constexpr const char* kNA = "NA";

enum Col : std::size_t {
  kX, kN, kExceed, kTailEst, kCiLo, kCiHi, kLbGg, kLbSimple, kUbPaper, kUbPaperValid,
  kUbChernoffLog, kUbChernoffDelta, kUbChernoffLambda, kFlags,
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool lower_hypotheses_hold(const PerpetuityModel& model) {
  return model.flags.m_nonneg && model.flags.q_constant && model.q_constant_value() > 0.0;
}

bool is_dickman_model(const PerpetuityModel& model) {
  const auto* u = std::get_if<UniformInterval>(&model.m);
  return u != nullptr && u->a == 0.0 && u->b == 1.0 && model.flags.q_constant && model.q_constant_value() == 1.0;
}

json oracle_metadata(const RunConfig& config, const PerpetuityModel& model) {
  json out;
  if (is_dickman_model(model)) {
    out["kind"] = "dickman";
    json rows = json::array();
    for (double x : config.xs) rows.push_back({{"x", x}, {"tail", x < 1.0 ? 1.0 : dickman_tail(x)}});
    out["tail"] = rows;
    return out;
  }
  if (std::holds_alternative<DiscreteFinite>(model.m) && std::holds_alternative<DiscreteFinite>(model.q_dist)) {
    out["kind"] = "exact";
    out["n_steps"] = config.oracle_steps;
    try {
      const ExactPmf pmf = exact_distribution(model, config.oracle_steps);
      json atoms = json::array();
      for (const PmfAtom& a : pmf.atoms) atoms.push_back({{"value", a.value}, {"exact", a.exact}, {"prob", a.prob}});
      out["atoms"] = atoms;
      json rows = json::array();
      for (double x : config.xs) {
        double tail = 0.0;
        for (const PmfAtom& a : pmf.atoms)
          if ((config.use_abs ? std::abs(a.value) : a.value) > x) tail += a.prob;
        rows.push_back({{"x", x}, {"tail", tail}});
      }
      out["tail"] = rows;
    } catch (const Error& e) {
      out["error"] = e.what();
    }
    return out;
  }
  out["kind"] = "none";
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PipelineOutput run_pipeline(const RunConfig& config, const PerpetuityModel& model) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<Command> commands = config.commands;
  if (commands.empty()) commands.push_back(Command::Compare);
  auto wants = [&](Command c) { return std::find(commands.begin(), commands.end(), c) != commands.end(); };
  const bool compare = wants(Command::Compare);
  const bool simulate = compare || wants(Command::Simulate);
  const bool bounds = compare || wants(Command::Bounds);

  json meta;
  meta["schema"] = "perpetuity-tail-csv";
  meta["schema_version"] = kCsvSchemaVersion;
  meta["columns"] = json::array();
  for (auto c : kCsvColumns) meta["columns"].push_back(std::string(c));
  meta["commands"] = json::array();
  for (Command c : commands) meta["commands"].push_back(std::string(to_string(c)));
  meta["seed"] = config.sim.seed;
  meta["use_abs"] = config.use_abs;
  meta["model"] = {{"m", dist_spec_to_json(model.m)}, {"q", dist_spec_to_json(model.q_dist)}};
  meta["regime"] = {{"q_bound", model.q_bound},
                    {"mean_abs_m", model.mean_abs_m},
                    {"atom_at_one", model.atom_at_one},
                    {"m_nonneg", model.flags.m_nonneg},
                    {"q_constant", model.flags.q_constant},
                    {"contractive", model.flags.contractive}};

  std::optional<TailRun> run;
  if (simulate) {
    run = simulate_tail(model, config.sim, config.xs, config.use_abs);
    meta["simulation"] = {{"n_samples", run->meta.n_requested},
                          {"n_used", run->curve.n},
                          {"truncation_eps", config.sim.truncation_eps},
                          {"max_terms", config.sim.max_terms},
                          {"residual_bound", run->meta.residual_bound},
                          {"truncation_failures", run->meta.truncation_failures},
                          {"workers", run->meta.workers},
                          {"ci", "wilson-95"}};
  }

  std::ostringstream csv;
  {
    std::vector<std::string> header;
    for (auto c : kCsvColumns) header.emplace_back(c);
    csv << join(header, ',') << '\n';
  }

  std::uint64_t violations = 0;
  for (std::size_t i = 0; i < config.xs.size(); ++i) {
    const double x = config.xs[i];
    const double t = x / model.q_bound;
    std::array<std::string, kCsvColumns.size()> row;
    row.fill(kNA);
    std::vector<std::string> flags;
    row[kX] = format_double(x);

    if (run) {
      const TailCurve& c = run->curve;
      row[kN] = std::to_string(c.n);
      row[kExceed] = std::to_string(c.exceed_counts[i]);
      row[kTailEst] = format_double(c.estimates[i]);
      row[kCiLo] = format_double(c.ci_low[i]);
      row[kCiHi] = format_double(c.ci_high[i]);
    }

    std::optional<double> lb_simple;
    std::optional<double> ub_log;
    if (bounds) {
      if (!(t > 1.0)) {
        flags.emplace_back("lb_out_of_domain");
      } else if (!lower_hypotheses_hold(model)) {
        flags.emplace_back("lb_hypothesis");
      } else {
        row[kLbGg] = format_double(lower_bound_gg(model, x, 0.5).value);
        lb_simple = lower_bound_simplified(model, x).value;
        row[kLbSimple] = format_double(*lb_simple);
      }

      if (!(t > 2.0)) {
        flags.emplace_back("ub_paper_out_of_domain");
      } else {
        const BoundResult ub = upper_bound_paper(model, x);
        row[kUbPaper] = format_double(ub.value);
        row[kUbPaperValid] = ub.valid ? "1" : "0";
        if (!ub.valid) flags.emplace_back("ub_paper_invalid");
      }

      const ChernoffOptimum opt = optimize_chernoff(model, t);
      ub_log = opt.bound.log_value;
      row[kUbChernoffLog] = format_double(opt.bound.log_value);
      if (opt.candidates > 0) {
        row[kUbChernoffDelta] = format_double(opt.params.delta);
        row[kUbChernoffLambda] = format_double(opt.params.lambda);
      }
      if (opt.bound.vacuous) flags.emplace_back("ub_chernoff_vacuous");
      if (model.atom_at_one > 0.0) flags.emplace_back("atom_at_one");
    }

    if (compare && run) {
      const TailCurve& c = run->curve;
      if (lb_simple && *lb_simple > c.ci_high[i]) {
        flags.emplace_back("lb_violation");
        ++violations;
      }
      if (ub_log && c.ci_low[i] > std::min(1.0, std::exp(*ub_log))) {
        flags.emplace_back("ub_violation");
        ++violations;
      }
    }

    row[kFlags] = join(flags, ';');
    std::vector<std::string> cells;
    for (const std::string& cell : row) cells.push_back(csv_field(cell));
    csv << join(cells, ',') << '\n';
  }

  if (compare) meta["containment"] = {{"rows", config.xs.size()}, {"violations", violations}};

  if (wants(Command::PDelta)) {
    json rows = json::array();
    for (double x : config.xs) {
      const double t = x / model.q_bound;
      json r = {{"x", x}};
      if (t > 2.0) {
        r["delta_upper"] = 2.0 / t;
        r["p_upper"] = p_delta(model, 2.0 / t);
      }
      if (t > 0.5) {
        r["delta_lower"] = 0.5 / t;
        r["p_lower"] = p_delta(model, 0.5 / t);
      }
      rows.push_back(r);
    }
    meta["pdelta"] = rows;
  }

  if (wants(Command::Oracle)) meta["oracle"] = oracle_metadata(config, model);

  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  meta["wall_time_seconds"] = elapsed.count();
  return {csv.str(), meta};
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    if (end > start) rows.push_back(split_csv_line(csv.substr(start, end - start)));
    start = end + 1;
  }
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "empty CSV");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };

  struct Series {
    const char* name;
    const char* color;
    std::vector<std::pair<double, double>> points;  // (x, log10 y)
  };
  std::vector<Series> series = {{"tail_est", "#1f77b4", {}},
                                {"lb_simple", "#2ca02c", {}},
                                {"ub_paper", "#d62728", {}},
                                {"ub_chernoff_log", "#9467bd", {}}};
  const std::ptrdiff_t xcol = column("x");
  if (xcol < 0) throw Error(ErrorKind::InvalidArgument, "CSV has no x column");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const double x = std::strtod(rows[r][xcol].c_str(), nullptr);
    for (Series& s : series) {
      const std::ptrdiff_t col = column(s.name);
      if (col < 0 || rows[r][col] == kNA) continue;
      double y = std::strtod(rows[r][col].c_str(), nullptr);
      if (std::string_view(s.name) == "ub_chernoff_log") y = std::exp(std::min(0.0, y));
      if (y > 0.0 && std::isfinite(y)) s.points.emplace_back(x, std::log10(std::min(1.0, y)));
    }
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = 0.0;
  for (const Series& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
    }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  ymin = std::floor(std::min(ymin, -1.0));

  constexpr double kW = 640, kH = 420, kPad = 50;
  auto px = [&](double x) { return kPad + (x - xmin) / (xmax - xmin) * (kW - 2 * kPad); };
  auto py = [&](double y) { return kPad + (0.0 - y) / (0.0 - ymin) * (kH - 2 * kPad); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  svg << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kW - 2 * kPad << "\" height=\""
      << kH - 2 * kPad << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int d = 0; d >= static_cast<int>(ymin); --d)
    svg << "<text x=\"4\" y=\"" << py(d) + 4 << "\" font-size=\"10\">1e" << d << "</text>\n";
  int legend = 0;
  for (const Series& s : series) {
    if (s.points.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (auto [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    svg << "<text x=\"" << kW - 140 << "\" y=\"" << kPad + 14 * (++legend) << "\" font-size=\"11\" fill=\""
        << s.color << "\">" << s.name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace perpetuity
