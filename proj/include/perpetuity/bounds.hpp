#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "perpetuity/dist.hpp"

namespace perpetuity {

/// The smallness threshold on p_delta under which (t/4) ln p_{2/t} is a proven
/// upper bound exponent: e^{-2} / 9.
inline const double kPaperValidityThreshold = std::exp(-2.0) / 9.0;

/// A tail-bound value carried in log space. `value` underflows to zero for
/// exponents below about -745; `log_value` stays exact.
struct BoundResult {
  double value = 0.0;
  double log_value = 0.0;
  bool valid = true;
  bool vacuous = false;
  std::vector<std::string> conditions;
};

struct ChernoffParams {
  double delta = 0.0;
  double lambda = 0.0;  // +inf when p = 0 (sentinel for the exact case)
  double p = 0.0;
  bool feasible = false;
  // e^lambda p <= 1/2, the simpler sufficient condition
  bool paper_sufficient = false;
};

/// Params for (delta, lambda) with p = p_delta(model, delta) and feasibility
/// e^lambda <= (1 + p) / (2p), which is exactly the conjunction of
/// e^lambda p < 1 and p/(1-p) (e^lambda - 1) <= 1/2.
ChernoffParams make_chernoff_params(const PerpetuityModel& model, double delta, double lambda);

/// E exp(lambda T) for T geometric on {1, 2, ...} with P(T = j) = p^{j-1}(1-p).
double geometric_mgf(double p, double lambda);

/// Lower bound on P(R > x) for 0 <= M <= 1 and Q = q > 0:
///   exp( ln(1-c) / ln(1 - cq/x) * ln p_{cq/x} ).
/// When the hypotheses fail the number is still produced with valid = false.
BoundResult lower_bound_gg(const PerpetuityModel& model, double x, double c);

/// The c = 1/2 weakening exp( (2 ln 2 / q) x ln p_{q/(2x)} ).
BoundResult lower_bound_simplified(const PerpetuityModel& model, double x);

/// exp( x / (4q) ln p_{2q/x} ) for x > 2q. Marked valid only when
/// p_{2q/x} < e^{-2}/9.
BoundResult upper_bound_paper(const PerpetuityModel& model, double x);

/// Chernoff bound on P(|R| > q t):
///   exp( -t lambda + lambda/delta + 2p/(1-p) (e^lambda - 1) / delta ).
/// With p = 0 the dominating sum is 1/delta exactly and the bound is 0 or 1.
BoundResult chernoff_bound(const PerpetuityModel& model, double t, const ChernoffParams& params);

/// delta = 2/t and lambda = ln(1 / (3 p_delta)), so that e^lambda p = 1/3.
ChernoffParams paper_candidate_params(const PerpetuityModel& model, double t);

struct ChernoffOptimum {
  ChernoffParams params;
  BoundResult bound;
  std::size_t candidates = 0;
};

/// Minimizes the Chernoff exponent over a 200-point log grid of delta in
/// (1/t, 1) with the closed-form inner lambda, plus the closed-form candidate.
/// Ties go to the smallest delta.
ChernoffOptimum optimize_chernoff(const PerpetuityModel& model, double t);

/// ln(1/p) - (1 + ln 3) + 3p - (1/2) ln(1/p); nonnegative for p <= e^{-2}/9.
inline double specialization_margin(double p) {
  const double l = -std::log(p);
  return l - (1.0 + std::log(3.0)) + 3.0 * p - 0.5 * l;
}

}  // namespace perpetuity
