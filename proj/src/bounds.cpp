#include "perpetuity/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perpetuity/error.hpp"

namespace perpetuity {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDeltaGridSize = 200;

BoundResult from_log(double log_value) {
  BoundResult r;
  r.log_value = log_value;
  r.value = std::exp(log_value);
  r.vacuous = log_value >= 0.0;
  return r;
}

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os.precision(17);
  os << label << v;
  return os.str();
}

// x/q, the only combination of x and q any of the bounds depend on.
double scaled_threshold(const PerpetuityModel& model, double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::InvalidArgument, "x must be finite");
  return x / model.q_bound;
}

void tag_lower_hypotheses(const PerpetuityModel& model, BoundResult& r) {
  if (!model.flags.m_nonneg) {
    r.valid = false;
    r.conditions.push_back("HypothesisViolation: M takes negative values");
  }
  if (!model.flags.q_constant) {
    r.valid = false;
    r.conditions.push_back("HypothesisViolation: Q is not constant");
  } else if (!(model.q_constant_value() > 0.0)) {
    r.valid = false;
    r.conditions.push_back("HypothesisViolation: Q is not a positive constant");
  }
}

void tag_atom_at_one(const PerpetuityModel& model, BoundResult& r) {
  if (model.atom_at_one > 0.0) r.conditions.push_back(fmt("atom_at_one=", model.atom_at_one));
}

bool feasible(double p, double lambda) {
  if (p == 0.0) return true;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) return false;
  return std::exp(lambda) <= (1.0 + p) / (2.0 * p);
}

}  // namespace

ChernoffParams make_chernoff_params(const PerpetuityModel& model, double delta, double lambda) {
  ChernoffParams params;
  params.delta = delta;
  params.lambda = lambda;
  params.p = p_delta(model, delta);
  params.feasible = feasible(params.p, lambda);
  params.paper_sufficient = params.p == 0.0 || (std::isfinite(lambda) && std::exp(lambda) * params.p <= 0.5);
  return params;
}

double geometric_mgf(double p, double lambda) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "p must lie in [0, 1)");
  const double growth = std::exp(lambda);
  if (p == 0.0) return growth;
  if (growth * p >= 1.0) throw Error(ErrorKind::InfeasibleParameter, "e^lambda p >= 1; the MGF is infinite");
  return growth * (1.0 - p) / (1.0 - growth * p);
}

BoundResult lower_bound_gg(const PerpetuityModel& model, double x, double c) {
  if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::InvalidArgument, "c must lie in (0, 1)");
  const double t = scaled_threshold(model, x);
  if (!(t > 1.0)) throw Error(ErrorKind::OutOfDomain, "lower bound needs x > q");
  const double delta = c / t;
  const double p = p_delta(model, delta);
  const double log_value = p == 0.0 ? -kInf : std::log1p(-c) / std::log1p(-delta) * std::log(p);
  BoundResult r = from_log(log_value);
  r.conditions.push_back(fmt("p=", p));
  tag_lower_hypotheses(model, r);
  return r;
}

BoundResult lower_bound_simplified(const PerpetuityModel& model, double x) {
  const double t = scaled_threshold(model, x);
  if (!(t > 1.0)) throw Error(ErrorKind::OutOfDomain, "lower bound needs x > q");
  const double p = p_delta(model, 0.5 / t);
  const double log_value = p == 0.0 ? -kInf : 2.0 * std::numbers::ln2 * t * std::log(p);
  BoundResult r = from_log(log_value);
  r.conditions.push_back(fmt("p=", p));
  tag_lower_hypotheses(model, r);
  return r;
}

BoundResult upper_bound_paper(const PerpetuityModel& model, double x) {
  const double t = scaled_threshold(model, x);
  if (!(t > 2.0)) throw Error(ErrorKind::OutOfDomain, "upper bound needs x > 2q");
  if (!model.flags.contractive) throw Error(ErrorKind::DegenerateModel, "model is not contractive");
  const double p = p_delta(model, 2.0 / t);
  const double log_value = p == 0.0 ? -kInf : 0.25 * t * std::log(p);
  BoundResult r = from_log(log_value);
  r.valid = p < kPaperValidityThreshold;
  r.conditions.push_back(fmt("p=", p));
  if (!r.valid) r.conditions.push_back("p_delta >= e^-2/9: x not large enough for the closed form");
  tag_atom_at_one(model, r);
  return r;
}

BoundResult chernoff_bound(const PerpetuityModel& model, double t, const ChernoffParams& params) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "t must be positive and finite");
  if (!model.flags.contractive) throw Error(ErrorKind::DegenerateModel, "model is not contractive");
  const double delta = params.delta;
  const double p = p_delta(model, delta);
  if (!params.feasible || !feasible(p, params.lambda)) {
    throw Error(ErrorKind::InfeasibleParameter,
                fmt("lambda outside (0, ln((1+p)/(2p))] for delta=", delta) + fmt(", lambda=", params.lambda));
  }
  BoundResult r;
  if (p == 0.0) {
    // the dominating sum is exactly 1/delta
    r = from_log(t > 1.0 / delta ? -kInf : 0.0);
  } else {
    const double lambda = params.lambda;
    const double exponent = -t * lambda + lambda / delta + 2.0 * p / (1.0 - p) * std::expm1(lambda) / delta;
    r = from_log(exponent);
  }
  r.conditions.push_back(fmt("p=", p));
  if (!params.paper_sufficient) r.conditions.push_back("e^lambda p > 1/2 (feasible under the exact constraint only)");
  tag_atom_at_one(model, r);
  return r;
}

ChernoffParams paper_candidate_params(const PerpetuityModel& model, double t) {
  if (!(t > 2.0)) throw Error(ErrorKind::OutOfDomain, "closed-form candidate needs t > 2");
  const double delta = 2.0 / t;
  const double p = p_delta(model, delta);
  if (p >= 1.0 / 3.0) throw Error(ErrorKind::HypothesisViolation, fmt("p_delta >= 1/3: p=", p));
  ChernoffParams params;
  params.delta = delta;
  params.p = p;
  params.lambda = p == 0.0 ? kInf : -std::log(3.0 * p);
  params.feasible = true;
  params.paper_sufficient = true;
  return params;
}

ChernoffOptimum optimize_chernoff(const PerpetuityModel& model, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "t must be positive and finite");
  if (!model.flags.contractive) throw Error(ErrorKind::DegenerateModel, "model is not contractive");

  struct Candidate {
    ChernoffParams params;
    BoundResult bound;
  };
  std::vector<Candidate> candidates;

  // delta <= 1/t makes -t lambda + lambda/delta >= 0, so only (1/t, 1) is searched
  if (t > 1.0) {
    const double log_lo = -std::log(t);
    for (std::size_t i = 0; i < kDeltaGridSize; ++i) {
      const double frac = 1.0 - static_cast<double>(i + 1) / static_cast<double>(kDeltaGridSize + 1);
      const double delta = std::exp(log_lo * frac);
      const double p = p_delta(model, delta);
      if (p >= 1.0) continue;
      ChernoffParams params;
      if (p == 0.0) {
        params = make_chernoff_params(model, delta, kInf);
      } else {
        const double stationary = (t * delta - 1.0) * (1.0 - p) / (2.0 * p);
        const double growth = std::min(stationary, (1.0 + p) / (2.0 * p));
        if (!(growth > 1.0)) continue;
        params = make_chernoff_params(model, delta, std::log(growth));
        if (!params.feasible) continue;
      }
      candidates.push_back({params, chernoff_bound(model, t, params)});
    }
  }
  if (t > 2.0 && p_delta(model, 2.0 / t) < 1.0 / 3.0) {
    const ChernoffParams params = paper_candidate_params(model, t);
    candidates.push_back({params, chernoff_bound(model, t, params)});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.params.delta < b.params.delta; });

  ChernoffOptimum best;
  best.candidates = candidates.size();
  best.bound = from_log(0.0);
  best.bound.conditions.push_back("no candidate gave a negative exponent");
  bool found = false;
  for (const Candidate& c : candidates) {
    if (c.bound.log_value < best.bound.log_value) {
      best.params = c.params;
      best.bound = c.bound;
      found = true;
    }
  }
  if (!found && !candidates.empty()) best.params = candidates.front().params;
  return best;
}

}  // namespace perpetuity
