#include "perpetuity/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "perpetuity/error.hpp"
#include "perpetuity/parallel.hpp"

namespace perpetuity {
namespace {

void require_unit_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
}

void require_strictly_increasing(const std::vector<double>& xs) {
  if (xs.empty()) throw Error(ErrorKind::InvalidArgument, "threshold grid is empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw Error(ErrorKind::InvalidArgument, "threshold grid has a non-finite entry");
    if (i > 0 && !(xs[i] > xs[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "threshold grid must be strictly increasing");
  }
}

}  // namespace

void validate_sim_config(const SimConfig& cfg) {
  if (cfg.n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples must be at least 1");
  if (!(cfg.truncation_eps > 0.0 && cfg.truncation_eps < 1.0))
    throw Error(ErrorKind::InvalidArgument, "truncation_eps must lie in (0, 1)");
  if (cfg.max_terms < 1) throw Error(ErrorKind::InvalidArgument, "max_terms must be at least 1");
  if (cfg.worker_hint && *cfg.worker_hint == 0) throw Error(ErrorKind::InvalidArgument, "workers must be positive");
}

double residual_bound(const PerpetuityModel& model, const SimConfig& cfg) {
  return model.q_bound * cfg.truncation_eps / (1.0 - model.mean_abs_m);
}

double sample_perpetuity(const PerpetuityModel& model, const SimConfig& cfg, std::uint64_t index) {
  if (!model.flags.contractive) throw Error(ErrorKind::DegenerateModel, "model is not contractive");
  CounterRng rng(cfg.seed, StreamId::Perpetuity, index);
  double sum = 0.0;
  double product = 1.0;
  for (std::uint64_t k = 1;; ++k) {
    sum += sample(model.q_dist, rng) * product;
    product *= sample(model.m, rng);
    if (std::abs(product) <= cfg.truncation_eps) return sum;
    if (k >= cfg.max_terms) {
      throw Error(ErrorKind::TruncationFailure,
                  "series needed more than " + std::to_string(cfg.max_terms) + " terms at index " +
                      std::to_string(index));
    }
  }
}

double sample_finite_horizon(const PerpetuityModel& model, std::uint64_t seed, std::uint64_t n_steps,
                             std::uint64_t index) {
  CounterRng rng(seed, StreamId::FiniteHorizon, index);
  double r = 0.0;
  for (std::uint64_t k = 0; k < n_steps; ++k) {
    const double m = sample(model.m, rng);
    const double q = sample(model.q_dist, rng);
    r = m * r + q;
  }
  return r;
}

std::uint64_t sample_geometric(double p, CounterRng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "geometric parameter p must lie in [0, 1)");
  if (p == 0.0) return 1;
  const double failures = std::floor(std::log(rng.uniform()) / std::log(p));
  if (failures >= 0x1.0p63) return std::numeric_limits<std::uint64_t>::max();
  return 1 + static_cast<std::uint64_t>(failures);
}

std::vector<double> sample_modulus_path(const PerpetuityModel& model, double delta, const SimConfig& cfg,
                                        std::uint64_t index) {
  require_unit_delta(delta);
  CounterRng rng(cfg.seed, StreamId::ModulusPath, index);
  const double edge = 1.0 - delta;
  std::vector<double> path;
  double product = 1.0;
  for (;;) {
    const double v = std::abs(sample(model.m, rng));
    path.push_back(v);
    product *= v;
    if (product <= cfg.truncation_eps && v <= edge) return path;
    if (path.size() >= cfg.max_terms)
      throw Error(ErrorKind::TruncationFailure, "modulus path exceeded max_terms at index " + std::to_string(index));
  }
}

PathDecomposition decompose_path(std::span<const double> abs_m_path, double delta) {
  require_unit_delta(delta);
  if (abs_m_path.empty()) throw Error(ErrorKind::InvalidArgument, "path is empty");
  for (double v : abs_m_path) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::InvalidArgument, "path entries must lie in [0, 1]");
  }
  const double edge = 1.0 - delta;
  if (!(abs_m_path.back() <= edge))
    throw Error(ErrorKind::InvalidArgument, "path must end on a completed epoch (last entry <= 1 - delta)");

  PathDecomposition out;
  out.delta = delta;
  std::uint64_t epoch = 0;
  for (double v : abs_m_path) {
    ++epoch;
    if (v <= edge) {
      out.t_values.push_back(epoch);
      epoch = 0;
    }
  }

  double product = 1.0;
  for (double v : abs_m_path) {
    out.lhs += product;
    product *= v;
  }

  double weight = 1.0;
  for (std::uint64_t t : out.t_values) {
    out.rhs += weight * static_cast<double>(t);
    weight *= edge;
  }
  return out;
}

double sample_dominating_series(const PerpetuityModel& model, double delta, const SimConfig& cfg,
                                std::uint64_t index) {
  require_unit_delta(delta);
  const double p = p_delta(model, delta);
  if (p >= 1.0) throw Error(ErrorKind::DegenerateModel, "p_delta = 1; epoch lengths are infinite");
  const double terms = std::ceil(std::log(cfg.truncation_eps * delta * (1.0 - p)) / std::log1p(-delta));
  const auto k_max = static_cast<std::uint64_t>(std::max(1.0, terms));
  if (k_max > cfg.max_terms)
    throw Error(ErrorKind::TruncationFailure, "dominating series needs " + std::to_string(k_max) + " terms");

  CounterRng rng(cfg.seed, StreamId::DominatingSeries, index);
  const double ratio = 1.0 - delta;
  double weight = 1.0;
  double sum = 0.0;
  for (std::uint64_t k = 0; k < k_max; ++k) {
    sum += weight * static_cast<double>(sample_geometric(p, rng));
    weight *= ratio;
  }
  return sum;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Wilson interval needs n >= 1");
  const double nn = static_cast<double>(n);
  const double k = static_cast<double>(successes);
  const double z2 = z * z;
  const double denom = nn + z2;
  const double center = (k + 0.5 * z2) / denom;
  const double half = z / denom * std::sqrt(k * (nn - k) / nn + 0.25 * z2);
  const double est = k / nn;
  return {std::clamp(std::min(center - half, est), 0.0, 1.0), std::clamp(std::max(center + half, est), 0.0, 1.0)};
}

TailCounter::TailCounter(std::vector<double> xs, bool use_abs)
    : xs_(std::move(xs)), use_abs_(use_abs), bins_(xs_.size() + 1, 0) {
  require_strictly_increasing(xs_);
}

void TailCounter::add(double sample) {
  const double s = use_abs_ ? std::abs(sample) : sample;
  // number of thresholds strictly below s, i.e. thresholds that s exceeds
  const auto m = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), s) - xs_.begin());
  ++bins_[m];
  ++n_;
}

void TailCounter::merge(const TailCounter& other) {
  if (other.xs_ != xs_ || other.use_abs_ != use_abs_)
    throw Error(ErrorKind::InvalidArgument, "cannot merge tail counters over different grids");
  for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] += other.bins_[i];
  n_ += other.n_;
}

TailCurve TailCounter::finalize() const {
  if (n_ == 0) throw Error(ErrorKind::InvalidArgument, "tail estimate needs at least one sample");
  TailCurve c;
  c.xs = xs_;
  c.n = n_;
  c.exceed_counts.resize(xs_.size());
  std::uint64_t above = 0;
  for (std::size_t i = xs_.size(); i-- > 0;) {
    above += bins_[i + 1];
    c.exceed_counts[i] = above;
  }
  for (std::uint64_t k : c.exceed_counts) {
    const WilsonInterval ci = wilson_interval(k, n_);
    c.estimates.push_back(static_cast<double>(k) / static_cast<double>(n_));
    c.ci_low.push_back(ci.low);
    c.ci_high.push_back(ci.high);
  }
  return c;
}

TailCurve estimate_tail(std::span<const double> samples, std::vector<double> xs, bool use_abs) {
  TailCounter counter(std::move(xs), use_abs);
  for (double s : samples) counter.add(s);
  return counter.finalize();
}

TailRun simulate_tail(const PerpetuityModel& model, const SimConfig& cfg, std::vector<double> xs, bool use_abs) {
  validate_sim_config(cfg);
  require_strictly_increasing(xs);
  if (!model.flags.contractive) throw Error(ErrorKind::DegenerateModel, "model is not contractive");

  struct Partial {
    std::optional<TailCounter> counter;
    std::uint64_t failures = 0;
  };
  const unsigned workers = resolve_workers(cfg.worker_hint.value_or(0));
  auto partials = map_chunks(cfg.n_samples, workers, [&](std::uint64_t begin, std::uint64_t end) {
    Partial part;
    part.counter.emplace(xs, use_abs);
    for (std::uint64_t i = begin; i < end; ++i) {
      try {
        part.counter->add(sample_perpetuity(model, cfg, i));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TruncationFailure) throw;
        ++part.failures;
      }
    }
    return part;
  });

  TailCounter total(xs, use_abs);
  TailRun run;
  for (const Partial& part : partials) {
    total.merge(*part.counter);
    run.meta.truncation_failures += part.failures;
  }
  if (total.count() == 0) throw Error(ErrorKind::TruncationFailure, "every sample exceeded max_terms");
  run.curve = total.finalize();
  run.meta.seed = cfg.seed;
  run.meta.n_requested = cfg.n_samples;
  run.meta.residual_bound = residual_bound(model, cfg);
  run.meta.workers = workers;
  return run;
}

}  // namespace perpetuity
