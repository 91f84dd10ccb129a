#include "perpetuity/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "perpetuity/error.hpp"

namespace perpetuity {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kProbSumTol = 1e-12;
constexpr double kThresholdSlack = 1e-15;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidSpec, msg); }

// Linear interpolation of the CDF; 0 left of the first knot, 1 right of the last.
double cdf_at(const PiecewiseLinearCdf& d, double x) {
  const auto& k = d.knots;
  if (x <= k.front().value) return 0.0;
  if (x >= k.back().value) return 1.0;
  auto it = std::upper_bound(k.begin(), k.end(), x,
                             [](double v, const CdfKnot& kn) { return v < kn.value; });
  const CdfKnot& hi = *it;
  const CdfKnot& lo = *(it - 1);
  const double w = (x - lo.value) / (hi.value - lo.value);
  return lo.cdf + w * (hi.cdf - lo.cdf);
}

// E|X| for X uniform on [a, b].
double uniform_mean_abs(double a, double b) {
  if (a >= 0.0) return 0.5 * (a + b);
  if (b <= 0.0) return -0.5 * (a + b);
  return (a * a + b * b) / (2.0 * (b - a));
}

// Length of [a, b] intersected with [1 - delta, 1], written so that the full
// overlap evaluates to delta exactly.
double overlap_near_one(double a, double b, double delta) {
  const double lo_edge = 1.0 - delta;
  if (b < lo_edge || a > 1.0) return 0.0;
  const double from_top = b >= 1.0 ? 0.0 : 1.0 - b;
  const double to_bottom = a <= lo_edge ? delta : 1.0 - a;
  return std::max(0.0, to_bottom - from_top);
}

}  // namespace

void validate_spec(const DistSpec& spec) {
  std::visit(
      Overloaded{
          [](const DiscreteFinite& d) {
            if (d.atoms.empty()) invalid("discrete law has no atoms");
            double total = 0.0;
            for (const Atom& a : d.atoms) {
              if (!std::isfinite(a.value)) invalid("discrete atom value is not finite");
              if (!std::isfinite(a.prob) || a.prob < 0.0) invalid("discrete atom probability is negative or not finite");
              total += a.prob;
            }
            if (std::abs(total - 1.0) > kProbSumTol) {
              std::ostringstream os;
              os.precision(17);
              os << "discrete probabilities sum to " << total << ", expected 1";
              invalid(os.str());
            }
          },
          [](const UniformInterval& u) {
            if (!std::isfinite(u.a) || !std::isfinite(u.b)) invalid("uniform endpoints must be finite");
            if (!(u.a < u.b)) invalid("uniform interval requires a < b");
          },
          [](const PiecewiseLinearCdf& p) {
            const auto& k = p.knots;
            if (k.size() < 2) invalid("cdf law needs at least two knots");
            for (std::size_t i = 0; i < k.size(); ++i) {
              if (!std::isfinite(k[i].value) || !std::isfinite(k[i].cdf)) invalid("cdf knot is not finite");
              if (k[i].cdf < 0.0 || k[i].cdf > 1.0) invalid("cdf knot outside [0, 1]");
              if (i > 0) {
                if (!(k[i].value > k[i - 1].value)) invalid("cdf knot values must be strictly increasing");
                if (k[i].cdf < k[i - 1].cdf) invalid("cdf knot probabilities must be nondecreasing");
              }
            }
            if (k.front().cdf != 0.0) invalid("first cdf knot must have cdf 0");
            if (k.back().cdf != 1.0) invalid("last cdf knot must have cdf 1");
          },
      },
      spec);
}

std::pair<double, double> support_range(const DistSpec& spec) {
  return std::visit(
      Overloaded{
          [](const DiscreteFinite& d) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const Atom& a : d.atoms) {
              if (a.prob <= 0.0) continue;
              lo = std::min(lo, a.value);
              hi = std::max(hi, a.value);
            }
            return std::pair{lo, hi};
          },
          [](const UniformInterval& u) { return std::pair{u.a, u.b}; },
          [](const PiecewiseLinearCdf& p) {
            const auto& k = p.knots;
            std::size_t first = 0;
            while (first + 1 < k.size() && k[first + 1].cdf == 0.0) ++first;
            std::size_t last = first + 1;
            while (last < k.size() - 1 && k[last].cdf < 1.0) ++last;
            return std::pair{k[first].value, k[last].value};
          },
      },
      spec);
}

double mean_abs(const DistSpec& spec) {
  return std::visit(
      Overloaded{
          [](const DiscreteFinite& d) {
            double m = 0.0;
            for (const Atom& a : d.atoms) m += a.prob * std::abs(a.value);
            return m;
          },
          [](const UniformInterval& u) { return uniform_mean_abs(u.a, u.b); },
          [](const PiecewiseLinearCdf& p) {
            double m = 0.0;
            for (std::size_t i = 1; i < p.knots.size(); ++i) {
              const double w = p.knots[i].cdf - p.knots[i - 1].cdf;
              if (w > 0.0) m += w * uniform_mean_abs(p.knots[i - 1].value, p.knots[i].value);
            }
            return m;
          },
      },
      spec);
}

double abs_mass_near_one(const DistSpec& spec, double delta) {
  const double mass = std::visit(
      Overloaded{
          [delta](const DiscreteFinite& d) {
            const double lo = 1.0 - delta - kThresholdSlack;
            double m = 0.0;
            for (const Atom& a : d.atoms) {
              const double v = std::abs(a.value);
              if (v >= lo && v <= 1.0) m += a.prob;
            }
            return m;
          },
          [delta](const UniformInterval& u) {
            const double len = overlap_near_one(u.a, u.b, delta) + overlap_near_one(-u.b, -u.a, delta);
            return len / (u.b - u.a);
          },
          [delta](const PiecewiseLinearCdf& p) {
            const double edge = 1.0 - delta;
            return (cdf_at(p, 1.0) - cdf_at(p, edge)) + (cdf_at(p, -edge) - cdf_at(p, -1.0));
          },
      },
      spec);
  return std::clamp(mass, 0.0, 1.0);
}

bool is_point_mass(const DistSpec& spec) {
  const auto* d = std::get_if<DiscreteFinite>(&spec);
  if (d == nullptr) return false;
  const auto [lo, hi] = support_range(spec);
  return lo == hi;
}

double sample(const DistSpec& spec, CounterRng& rng) {
  return std::visit(
      Overloaded{
          [&rng](const DiscreteFinite& d) {
            const Atom* last = nullptr;
            std::size_t positive = 0;
            for (const Atom& a : d.atoms) {
              if (a.prob > 0.0) {
                last = &a;
                ++positive;
              }
            }
            if (positive == 1) return last->value;
            const double u = rng.uniform();
            double acc = 0.0;
            for (const Atom& a : d.atoms) {
              acc += a.prob;
              if (a.prob > 0.0 && u < acc) return a.value;
            }
            return last->value;
          },
          [&rng](const UniformInterval& u) { return u.a + (u.b - u.a) * rng.uniform(); },
          [&rng](const PiecewiseLinearCdf& p) {
            const double u = rng.uniform();
            const auto& k = p.knots;
            auto it = std::lower_bound(k.begin(), k.end(), u,
                                       [](const CdfKnot& kn, double x) { return kn.cdf < x; });
            if (it == k.begin()) return k.front().value;
            if (it == k.end()) return k.back().value;
            const CdfKnot& hi = *it;
            const CdfKnot& lo = *(it - 1);
            const double w = (u - lo.cdf) / (hi.cdf - lo.cdf);
            return lo.value + w * (hi.value - lo.value);
          },
      },
      spec);
}

double PerpetuityModel::q_constant_value() const {
  if (!flags.q_constant) return std::numeric_limits<double>::quiet_NaN();
  return support_range(q_dist).first;
}

PerpetuityModel validate_model(const DistSpec& m, const DistSpec& q) {
  validate_spec(m);
  validate_spec(q);

  const auto [m_lo, m_hi] = support_range(m);
  if (m_lo < -1.0 || m_hi > 1.0) {
    std::ostringstream os;
    os.precision(17);
    os << "support of M is [" << m_lo << ", " << m_hi
       << "], which leaves [-1, 1]; the heavy-tailed regime is not handled";
    throw Error(ErrorKind::UnsupportedRegime, os.str());
  }

  PerpetuityModel model;
  model.m = m;
  model.q_dist = q;
  model.q_bound = std::visit(
      Overloaded{
          [](const DiscreteFinite& d) {
            double b = 0.0;
            for (const Atom& a : d.atoms)
              if (a.prob > 0.0) b = std::max(b, std::abs(a.value));
            return b;
          },
          [](const UniformInterval& u) { return std::max(std::abs(u.a), std::abs(u.b)); },
          [](const PiecewiseLinearCdf& p) {
            double b = 0.0;
            for (const CdfKnot& k : p.knots) b = std::max(b, std::abs(k.value));
            return b;
          },
      },
      q);
  if (!(model.q_bound > 0.0)) invalid("Q is identically zero; the perpetuity is trivial");

  if (const auto* d = std::get_if<DiscreteFinite>(&m)) {
    for (const Atom& a : d->atoms)
      if (std::abs(a.value) == 1.0) model.atom_at_one += a.prob;
  }
  model.atom_at_one = std::clamp(model.atom_at_one, 0.0, 1.0);
  if (model.atom_at_one >= 1.0 - kProbSumTol) {
    throw Error(ErrorKind::DegenerateModel, "P(|M| = 1) = 1; the series does not converge");
  }

  model.mean_abs_m = std::clamp(mean_abs(m), 0.0, 1.0);
  model.flags.m_nonneg = m_lo >= 0.0;
  model.flags.q_constant = is_point_mass(q);
  model.flags.contractive = model.atom_at_one < 1.0;
  return model;
}

double p_delta(const PerpetuityModel& model, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
  }
  return abs_mass_near_one(model.m, delta);
}

}  // namespace perpetuity
