#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perpetuity/error.hpp"
#include "perpetuity/oracle.hpp"
#include "support/oracles.hpp"

using namespace perpetuity;

namespace {

DistSpec point(double v) { return DiscreteFinite{{{v, 1.0}}}; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected perpetuity::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("exact_distribution examples") {
  const auto model = validate_model(DiscreteFinite{{{0.0, 0.5}, {0.5, 0.5}}}, point(1.0));
  const ExactPmf pmf = exact_distribution(model, 3);
  REQUIRE(pmf.atoms.size() == 3);
  CHECK(pmf.atoms[0].value == 1.0);
  CHECK(pmf.atoms[0].prob == 0.5);
  CHECK(pmf.atoms[1].value == 1.5);
  CHECK(pmf.atoms[1].exact == "3/2");
  CHECK(pmf.atoms[1].prob == 0.25);
  CHECK(pmf.atoms[2].value == 1.75);
  CHECK(pmf.atoms[2].prob == 0.25);

  const auto noisy = validate_model(DiscreteFinite{{{0.3, 0.5}, {-0.6, 0.5}}},
                                    DiscreteFinite{{{1.0, 0.2}, {-2.0, 0.3}, {0.5, 0.5}}});
  const ExactPmf one = exact_distribution(noisy, 1);
  REQUIRE(one.atoms.size() == 3);
  CHECK(one.atoms[0].value == -2.0);
  CHECK(one.atoms[0].prob == doctest::Approx(0.3));
  CHECK(one.atoms[1].value == 0.5);
  CHECK(one.atoms[2].value == 1.0);

  const auto det = validate_model(point(0.5), point(1.0));
  const ExactPmf five = exact_distribution(det, 5);
  REQUIRE(five.atoms.size() == 1);
  CHECK(five.atoms[0].value == 1.9375);
  CHECK(five.atoms[0].exact == "31/16");
}

TEST_CASE("exact_distribution agrees with path enumeration") {
  const std::vector<std::pair<double, double>> m = {{0.0, 0.25}, {0.5, 0.5}, {-0.75, 0.25}};
  const std::vector<std::pair<double, double>> q = {{1.0, 0.5}, {0.25, 0.5}};
  DiscreteFinite md, qd;
  for (auto [v, p] : m) md.atoms.push_back({v, p});
  for (auto [v, p] : q) qd.atoms.push_back({v, p});
  const auto model = validate_model(md, qd);
  for (int n = 1; n <= 6; ++n) {
    const auto brute = testing::enumerate_law(m, q, n);
    const ExactPmf pmf = exact_distribution(model, n);
    REQUIRE(pmf.atoms.size() == brute.size());
    std::size_t i = 0;
    for (const auto& [v, p] : brute) {
      CHECK(pmf.atoms[i].value == v);
      CHECK(pmf.atoms[i].prob == doctest::Approx(p).epsilon(1e-13));
      ++i;
    }
  }
}

TEST_CASE("exact_distribution: decimal supports merge exactly") {
  // 0.1 and 0.2 are not dyadic; rational merging still collapses equal sums
  const auto model = validate_model(DiscreteFinite{{{0.1, 0.5}, {0.2, 0.5}}},
                                    DiscreteFinite{{{0.3, 0.5}, {0.6, 0.5}}});
  const ExactPmf pmf = exact_distribution(model, 4);
  double total = 0.0;
  for (const PmfAtom& a : pmf.atoms) total += a.prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < pmf.atoms.size(); ++i) CHECK(pmf.atoms[i].exact != pmf.atoms[i - 1].exact);
  CHECK(exact_distribution(model, 1).atoms[0].exact == "3/10");
}

TEST_CASE("exact_distribution: one more step equals the n+1 DP") {
  const auto model = validate_model(DiscreteFinite{{{0.25, 0.3}, {-0.5, 0.7}}},
                                    DiscreteFinite{{{1.0, 0.6}, {3.0, 0.4}}});
  const ExactPmf stepped = advance_exact(exact_distribution(model, 5), model);
  const ExactPmf direct = exact_distribution(model, 6);
  REQUIRE(stepped.atoms.size() == direct.atoms.size());
  CHECK(stepped.n_steps == 6);
  for (std::size_t i = 0; i < direct.atoms.size(); ++i) {
    CHECK(stepped.atoms[i].exact == direct.atoms[i].exact);
    CHECK(stepped.atoms[i].prob == direct.atoms[i].prob);
  }
}

TEST_CASE("exact_distribution mean matches the moment series") {
  const auto model = validate_model(DiscreteFinite{{{0.25, 0.3}, {-0.5, 0.7}}},
                                    DiscreteFinite{{{1.0, 0.6}, {3.0, 0.4}}});
  const double em = 0.25 * 0.3 - 0.5 * 0.7;
  const double eq = 1.0 * 0.6 + 3.0 * 0.4;
  for (int n : {1, 4, 8}) {
    const ExactPmf pmf = exact_distribution(model, n);
    double mean = 0.0;
    for (const PmfAtom& a : pmf.atoms) mean += a.value * a.prob;
    double expected = 0.0;
    for (int k = 1; k <= n; ++k) expected += eq * std::pow(em, k - 1);
    CHECK(mean == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("exact_distribution refuses oversized or continuous models") {
  const auto model = validate_model(DiscreteFinite{{{0.0, 0.5}, {0.5, 0.5}}}, point(1.0));
  CHECK_NOTHROW(exact_distribution(model, 23));
  CHECK(kind_of([&] { exact_distribution(model, 24); }) == ErrorKind::BudgetExceeded);
  const auto uni = validate_model(UniformInterval{0.0, 1.0}, point(1.0));
  CHECK(kind_of([&] { exact_distribution(uni, 2); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("dickman_tail examples") {
  CHECK(dickman_tail(1.0) == 1.0);
  CHECK(dickman_tail(2.0) == doctest::Approx(0.43854051643311483).epsilon(1e-8));
  CHECK(std::abs(dickman_tail(2.0) - 0.43854051643311483) < 1e-8);
  CHECK(std::abs(dickman_tail(3.0) - 0.093969665365403293) < 1e-8);
  for (double x = 1.0; x <= 3.0; x += 0.0625)
    CHECK(std::abs(dickman_tail(x) - testing::dickman_tail_closed_form(x)) < 1e-8);
  CHECK(kind_of([] { dickman_tail(0.5); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("dickman rho identities") {
  CHECK(std::abs(dickman_rho_integral(0.0) - std::exp(std::numbers::egamma)) < 1e-6);
  CHECK(std::abs(dickman_rho_integral(0.0) - dickman_rho_integral(1.0) - 1.0) < 1e-9);
  for (double u = 1.0; u <= 2.0; u += 0.1) CHECK(std::abs(dickman_rho(u) - (1.0 - std::log(u))) < 1e-9);
  // tabulated values of rho
  CHECK(std::abs(dickman_rho(3.0) - 0.0486083882911316) < 1e-9);
  CHECK(std::abs(dickman_rho(4.0) - 0.00491092564776083) < 1e-9);
  CHECK(std::abs(dickman_rho(5.0) - 0.000354724700456040) < 1e-9);
}

TEST_CASE("dickman_tail is nonincreasing and continuous") {
  double prev = 1.0;
  for (double x = 1.0; x <= 12.0; x += 0.0013) {
    const double v = dickman_tail(x);
    CHECK(v <= prev);
    CHECK(prev - v < 1e-3);
    prev = v;
  }
}
