#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "perpetuity/rng.hpp"

namespace perpetuity {

struct Atom {
  double value;
  double prob;
};

/// Finitely many atoms; probabilities sum to one.
struct DiscreteFinite {
  std::vector<Atom> atoms;
};

struct UniformInterval {
  double a;
  double b;
};

struct CdfKnot {
  double value;
  double cdf;
};

/// Continuous law whose CDF interpolates linearly between knots.
struct PiecewiseLinearCdf {
  std::vector<CdfKnot> knots;
};

using DistSpec = std::variant<DiscreteFinite, UniformInterval, PiecewiseLinearCdf>;

/// Throws Error{InvalidSpec} when a structural invariant fails.
void validate_spec(const DistSpec& spec);

/// Smallest and largest points of the support (atoms with positive mass,
/// interval endpoints, or the knots bracketing the region where the CDF moves).
std::pair<double, double> support_range(const DistSpec& spec);

double mean_abs(const DistSpec& spec);

/// P(1 - delta <= |X| <= 1) for 0 < delta < 1. Atoms lying on 1 - delta up
/// to decimal rounding of the threshold (1e-15) count in full.
double abs_mass_near_one(const DistSpec& spec, double delta);

/// True when the law is a single point mass.
bool is_point_mass(const DistSpec& spec);

/// One variate from `rng`. Point masses do not consume randomness; every other
/// law consumes exactly one uniform, so a draw is a pure function of the
/// stream coordinate and its position.
double sample(const DistSpec& spec, CounterRng& rng);

struct ModelFlags {
  bool m_nonneg = false;
  bool q_constant = false;
  bool contractive = false;
};

/// The pair of laws (M, Q) with |M| <= 1 and bounded Q. Build through
/// `validate_model`; the cached statistics are never recomputed.
struct PerpetuityModel {
  DistSpec m;
  DistSpec q_dist;
  double q_bound = 0.0;
  double mean_abs_m = 0.0;
  double atom_at_one = 0.0;
  ModelFlags flags;

  /// The value of Q when it is a point mass, otherwise NaN.
  double q_constant_value() const;
};

PerpetuityModel validate_model(const DistSpec& m, const DistSpec& q);

/// p_delta = P(1 - delta <= |M| <= 1), closed at both ends.
double p_delta(const PerpetuityModel& model, double delta);

}  // namespace perpetuity
