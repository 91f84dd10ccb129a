#include "perpetuity/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "perpetuity/error.hpp"

namespace perpetuity {
namespace {

using Rational = boost::multiprecision::cpp_rational;

// Prefers the shortest fraction that round-trips to the same double (so 0.1
// becomes 1/10); otherwise the exact binary value.
Rational to_rational(double v) {
  if (v == std::trunc(v) && std::abs(v) < 0x1.0p62) return Rational(static_cast<long long>(v));
  // continued-fraction convergents of |v|
  const double a = std::abs(v);
  long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double rest = a;
  for (int i = 0; i < 40; ++i) {
    const double whole = std::floor(rest);
    if (whole > 1e15) break;
    const auto w = static_cast<long long>(whole);
    const long long h2 = w * h1 + h0;
    const long long k2 = w * k1 + k0;
    if (k2 > 1'000'000'000LL || h2 > 1'000'000'000'000'000LL) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (static_cast<double>(h1) / static_cast<double>(k1) == a) {
      Rational r(h1, k1);
      return v < 0 ? Rational(-r) : r;
    }
    const double frac = rest - whole;
    if (frac == 0.0) break;
    rest = 1.0 / frac;
  }
  return Rational(v);
}

struct RationalAtom {
  Rational value;
  double prob;
};

std::vector<RationalAtom> rational_atoms(const DistSpec& spec, const char* name) {
  const auto* d = std::get_if<DiscreteFinite>(&spec);
  if (d == nullptr) throw Error(ErrorKind::InvalidSpec, std::string(name) + " must be finite-discrete for the exact oracle");
  std::map<Rational, double> merged;
  for (const Atom& a : d->atoms)
    if (a.prob > 0.0) merged[to_rational(a.value)] += a.prob;
  std::vector<RationalAtom> out;
  for (auto& [v, p] : merged) out.push_back({v, p});
  return out;
}

ExactPmf to_pmf(const std::map<Rational, double>& law, std::uint64_t n) {
  ExactPmf pmf;
  pmf.n_steps = n;
  pmf.atoms.reserve(law.size());
  for (const auto& [v, p] : law) pmf.atoms.push_back({v.convert_to<double>(), v.str(), p});
  return pmf;
}

std::map<Rational, double> step(const std::map<Rational, double>& law, const std::vector<RationalAtom>& m,
                                const std::vector<RationalAtom>& q) {
  std::map<Rational, double> next;
  for (const auto& [r, pr] : law)
    for (const RationalAtom& ma : m) {
      const Rational scaled = ma.value * r;
      for (const RationalAtom& qa : q) next[scaled + qa.value] += pr * ma.prob * qa.prob;
    }
  return next;
}

// Dickman rho on a uniform grid, with the tail integral accumulated from the right.
class DickmanTable {
 public:
  static constexpr int kPerUnit = 10'000;  // grid step 1e-4
  static constexpr int kUnits = 32;

  DickmanTable() : rho_(kPerUnit * kUnits + 1), tail_(rho_.size()) {
    const double h = 1.0 / kPerUnit;
    for (int i = 0; i <= kPerUnit; ++i) rho_[i] = 1.0;
    for (std::size_t i = kPerUnit + 1; i < rho_.size(); ++i) {
      const double u0 = static_cast<double>(i - 1) * h;
      const double u1 = static_cast<double>(i) * h;
      // trapezoid on rho'(s) = -rho(s - 1) / s over [u0, u1]
      rho_[i] = rho_[i - 1] - 0.5 * h * (rho_[i - 1 - kPerUnit] / u0 + rho_[i - kPerUnit] / u1);
    }
    tail_.back() = 0.0;
    for (std::size_t i = rho_.size() - 1; i-- > 0;) tail_[i] = tail_[i + 1] + 0.5 * h * (rho_[i] + rho_[i + 1]);
  }

  double rho(double u) const {
    if (u <= 1.0) return u < 0.0 ? 0.0 : 1.0;
    const double pos = u * kPerUnit;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= rho_.size()) return 0.0;
    const double w = pos - static_cast<double>(i);
    return rho_[i] + w * (rho_[i + 1] - rho_[i]);
  }

  double integral_from(double from) const {
    if (from < 0.0) return -from + integral_from(0.0);
    const double pos = from * kPerUnit;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= rho_.size()) return 0.0;
    const double w = pos - static_cast<double>(i);
    const double h = 1.0 / kPerUnit;
    const double mid = rho_[i] + w * (rho_[i + 1] - rho_[i]);
    return tail_[i] - 0.5 * w * h * (rho_[i] + mid);
  }

 private:
  std::vector<double> rho_;
  std::vector<double> tail_;
};

const DickmanTable& dickman_table() {
  static const DickmanTable table;
  return table;
}

}  // namespace

ExactPmf exact_distribution(const PerpetuityModel& model, std::uint64_t n) {
  const auto m = rational_atoms(model.m, "M");
  const auto q = rational_atoms(model.q_dist, "Q");
  const double branching = static_cast<double>(m.size() * q.size());
  double paths = 1.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    paths *= branching;
    if (paths > kEnumerationBudget)
      throw Error(ErrorKind::BudgetExceeded, "(|supp M| |supp Q|)^n exceeds the 10^7 enumeration budget");
  }
  std::map<Rational, double> law{{Rational(0), 1.0}};
  for (std::uint64_t i = 0; i < n; ++i) law = step(law, m, q);
  return to_pmf(law, n);
}

ExactPmf advance_exact(const ExactPmf& pmf, const PerpetuityModel& model) {
  const auto m = rational_atoms(model.m, "M");
  const auto q = rational_atoms(model.q_dist, "Q");
  std::map<Rational, double> law;
  for (const PmfAtom& a : pmf.atoms) law[Rational(a.exact)] += a.prob;
  return to_pmf(step(law, m, q), pmf.n_steps + 1);
}

double dickman_rho(double u) { return dickman_table().rho(u); }

double dickman_rho_integral(double from) { return dickman_table().integral_from(from); }

double dickman_tail(double x) {
  if (!(x >= 1.0)) throw Error(ErrorKind::OutOfDomain, "dickman_tail needs x >= 1");
  // normalized by the numerical total (which approximates e^gamma) so the
  // tail is exactly 1 at x = 1
  const double tail = dickman_rho_integral(x - 1.0) / dickman_rho_integral(0.0);
  return std::clamp(tail, 0.0, 1.0);
}

}  // namespace perpetuity
