#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "perpetuity/dist.hpp"
#include "perpetuity/rng.hpp"

namespace perpetuity {

struct SimConfig {
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
  double truncation_eps = 1e-12;
  std::uint64_t max_terms = 1'000'000;
  std::optional<unsigned> worker_hint;
};

void validate_sim_config(const SimConfig& cfg);

/// Bound on the expected residual of the truncated series given the running
/// product reached eps: q * eps / (1 - E|M|).
double residual_bound(const PerpetuityModel& model, const SimConfig& cfg);

/// Truncated series sum_k Q_k prod_{j<k} M_j drawn on stream (seed, index).
/// Stops at the first k with prod_{j<=k} |M_j| <= truncation_eps.
double sample_perpetuity(const PerpetuityModel& model, const SimConfig& cfg, std::uint64_t index);

/// R_n from the forward recursion R_k = M_k R_{k-1} + Q_k with R_0 = 0.
double sample_finite_horizon(const PerpetuityModel& model, std::uint64_t seed, std::uint64_t n_steps,
                             std::uint64_t index);

/// Geometric on {1, 2, ...} with P(T = j) = p^{j-1} (1 - p), by inversion.
std::uint64_t sample_geometric(double p, CounterRng& rng);

/// Realized |M_1|, |M_2|, ... on stream (seed, index), extended until the
/// running product is <= truncation_eps and the last entry is <= 1 - delta,
/// so the path ends on a completed epoch.
std::vector<double> sample_modulus_path(const PerpetuityModel& model, double delta, const SimConfig& cfg,
                                        std::uint64_t index);

struct PathDecomposition {
  std::vector<std::uint64_t> t_values;
  double delta = 0.0;
  double lhs = 0.0;  // sum_k prod_{j<k} |M_j| over the scanned prefix
  double rhs = 0.0;  // sum_k (1 - delta)^{k-1} T_k
};

/// Splits the path into epochs ending at entries <= 1 - delta. The leading
/// empty product (k = 1 term) belongs to the first epoch.
PathDecomposition decompose_path(std::span<const double> abs_m_path, double delta);

/// Truncated sum_k (1 - delta)^{k-1} T_k with T_k i.i.d. geometric(1 - p_delta).
/// The number of terms K is the smallest with (1 - delta)^K E[T] / delta <= eps.
double sample_dominating_series(const PerpetuityModel& model, double delta, const SimConfig& cfg,
                                std::uint64_t index);

struct WilsonInterval {
  double low;
  double high;
};

inline constexpr double kWilsonZ95 = 1.96;

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kWilsonZ95);

struct TailCurve {
  std::vector<double> xs;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> exceed_counts;
  std::vector<double> estimates;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

/// Streaming exceedance counter over a fixed threshold grid. Partial counters
/// merge associatively and commutatively (integer histograms).
class TailCounter {
 public:
  TailCounter(std::vector<double> xs, bool use_abs);

  void add(double sample);
  void merge(const TailCounter& other);
  std::uint64_t count() const noexcept { return n_; }
  TailCurve finalize() const;

 private:
  std::vector<double> xs_;
  bool use_abs_;
  std::uint64_t n_ = 0;
  // bins_[m] counts samples exceeding exactly the first m thresholds
  std::vector<std::uint64_t> bins_;
};

TailCurve estimate_tail(std::span<const double> samples, std::vector<double> xs, bool use_abs);

struct RunMetadata {
  std::uint64_t seed = 0;
  std::uint64_t n_requested = 0;
  std::uint64_t truncation_failures = 0;
  double residual_bound = 0.0;
  unsigned workers = 1;
};

struct TailRun {
  TailCurve curve;
  RunMetadata meta;
};

/// Parallel Monte Carlo estimate of P(R > x) (or P(|R| > x)). Samples whose
/// series needs more than max_terms terms are excluded from n and counted in
/// the metadata.
TailRun simulate_tail(const PerpetuityModel& model, const SimConfig& cfg, std::vector<double> xs, bool use_abs);

}  // namespace perpetuity
