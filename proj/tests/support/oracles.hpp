#pragma once

// Test-only reference computations. Nothing here calls into the library's
// implementation paths it is used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace perpetuity::testing {

// E exp(lambda T), T geometric on {1,2,...} with P(T=j) = p^{j-1}(1-p), by
// summing the series until terms drop below 1e-20 of the running total.
inline double geometric_mgf_series(double p, double lambda) {
  long double sum = 0.0L;
  long double term = std::exp(static_cast<long double>(lambda)) * (1.0L - p);
  const long double ratio = std::exp(static_cast<long double>(lambda)) * p;
  for (int j = 1; j < 100000; ++j) {
    sum += term;
    if (term < 1e-20L * sum) break;
    term *= ratio;
  }
  return static_cast<double>(sum);
}

// Law of R_n = sum_{k<=n} Q_k prod_{j<k} M_j by enumerating every sequence of
// (M, Q) atoms. Values are merged on exact double equality, which is safe for
// the dyadic supports the tests use.
inline std::map<double, double> enumerate_law(const std::vector<std::pair<double, double>>& m,
                                              const std::vector<std::pair<double, double>>& q, int n) {
  std::map<double, double> law;
  std::vector<std::size_t> mi(n, 0), qi(n, 0);
  std::function<void(int, double, double, double)> rec = [&](int k, double sum, double prod, double prob) {
    if (k == n) {
      law[sum] += prob;
      return;
    }
    for (const auto& [qv, qp] : q)
      for (const auto& [mv, mp] : m) rec(k + 1, sum + qv * prod, prod * mv, prob * qp * mp);
  };
  rec(0, 0.0, 1.0, 1.0);
  return law;
}

// Wilson score interval written out directly from its definition.
inline std::pair<double, double> wilson_reference(double k, double n, double z) {
  const double phat = k / n;
  const double a = phat + z * z / (2 * n);
  const double b = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n));
  const double d = 1 + z * z / n;
  return {(a - b) / d, (a + b) / d};
}

// Dickman tail for x in [1, 3]: P(R > x) = 1 - e^{-gamma} * int_0^{x-1} rho,
// with rho = 1 on [0,1] and rho = 1 - ln u on [1,2].
inline double dickman_tail_closed_form(double x) {
  const double egamma = 0.57721566490153286061;
  const double u = x - 1.0;
  const double head = u <= 1.0 ? u : 1.0 + (2.0 * u - u * std::log(u) - 2.0);
  return 1.0 - std::exp(-egamma) * head;
}

}  // namespace perpetuity::testing
