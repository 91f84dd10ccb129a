#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "perpetuity/dist.hpp"
#include "perpetuity/error.hpp"

using namespace perpetuity;

namespace {

DiscreteFinite atoms(std::initializer_list<Atom> a) { return DiscreteFinite{a}; }
DistSpec point(double v) { return atoms({{v, 1.0}}); }

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

TEST_CASE("validate_model: uniform M and unit Q") {
  const PerpetuityModel m = validate_model(UniformInterval{0.0, 1.0}, point(1.0));
  CHECK(m.q_bound == 1.0);
  CHECK(m.mean_abs_m == 0.5);
  CHECK(m.atom_at_one == 0.0);
  CHECK(m.flags.m_nonneg);
  CHECK(m.flags.q_constant);
  CHECK(m.flags.contractive);
  CHECK(m.q_constant_value() == 1.0);
}

TEST_CASE("validate_model: rejected regimes") {
  CHECK(kind_of([] { validate_model(point(1.0), point(1.0)); }) == ErrorKind::DegenerateModel);
  CHECK(kind_of([] { validate_model(atoms({{-1.0, 0.5}, {1.0, 0.5}}), point(1.0)); }) == ErrorKind::DegenerateModel);
  CHECK(kind_of([] { validate_model(atoms({{-1.5, 0.1}, {0.5, 0.9}}), point(1.0)); }) == ErrorKind::UnsupportedRegime);
  CHECK(kind_of([] { validate_model(UniformInterval{0.0, 1.2}, point(1.0)); }) == ErrorKind::UnsupportedRegime);
  CHECK(kind_of([] { validate_model(UniformInterval{0.0, 1.0}, point(0.0)); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_model(UniformInterval{0.0, 1.0}, DiscreteFinite{}); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_model(UniformInterval{0.0, 1.0}, UniformInterval{0.0, INFINITY}); }) ==
        ErrorKind::InvalidSpec);
}

TEST_CASE("validate_spec structural invariants") {
  CHECK(kind_of([] { validate_spec(atoms({{0.1, 0.5}, {0.2, 0.4}})); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_spec(atoms({{0.1, -0.5}, {0.2, 1.5}})); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_spec(UniformInterval{1.0, 1.0}); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_spec(PiecewiseLinearCdf{{{0.0, 0.0}, {0.0, 1.0}}}); }) == ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_spec(PiecewiseLinearCdf{{{0.0, 0.0}, {0.5, 0.6}, {1.0, 0.5}}}); }) ==
        ErrorKind::InvalidSpec);
  CHECK(kind_of([] { validate_spec(PiecewiseLinearCdf{{{0.0, 0.1}, {1.0, 1.0}}}); }) == ErrorKind::InvalidSpec);
  CHECK_NOTHROW(validate_spec(atoms({{0.1, 0.5}, {0.2, 0.5 + 5e-13}})));
}

TEST_CASE("p_delta examples") {
  const auto uni = validate_model(UniformInterval{0.0, 1.0}, point(1.0));
  CHECK(p_delta(uni, 0.2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(p_delta(uni, 0.01) == 0.01);

  const auto two = validate_model(atoms({{0.5, 0.7}, {0.95, 0.3}}), point(1.0));
  CHECK(p_delta(two, 0.1) == doctest::Approx(0.3).epsilon(1e-15));

  const auto signed_m = validate_model(atoms({{-0.9, 0.5}, {0.2, 0.5}}), point(1.0));
  CHECK(p_delta(signed_m, 0.15) == 0.5);

  // an atom exactly on 1 - delta counts in full
  const auto edge = validate_model(atoms({{0.8, 0.25}, {0.1, 0.75}}), point(1.0));
  CHECK(p_delta(edge, 0.2) == 0.25);

  CHECK(kind_of([&] { p_delta(uni, 0.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { p_delta(uni, 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { p_delta(uni, NAN); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("p_delta for a piecewise-linear CDF folds the law at zero") {
  // M uniform on [-1, 1] written as a CDF: |M| is Uniform(0, 1)
  const auto sym = validate_model(PiecewiseLinearCdf{{{-1.0, 0.0}, {1.0, 1.0}}}, point(1.0));
  CHECK(p_delta(sym, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(sym.mean_abs_m == doctest::Approx(0.5));
  CHECK_FALSE(sym.flags.m_nonneg);

  // triangular density on [0, 1] peaked at 1: F(x) = x^2 approximated by knots
  PiecewiseLinearCdf tri;
  for (int i = 0; i <= 100; ++i) tri.knots.push_back({i / 100.0, (i / 100.0) * (i / 100.0)});
  tri.knots.front().cdf = 0.0;
  tri.knots.back().cdf = 1.0;
  const auto model = validate_model(tri, point(2.0));
  CHECK(p_delta(model, 0.5) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(model.q_bound == 2.0);
}

TEST_CASE("p_delta invariants on mixed models") {
  std::vector<PerpetuityModel> models = {
      validate_model(UniformInterval{-0.7, 1.0}, point(1.0)),
      validate_model(atoms({{-1.0, 0.05}, {0.3, 0.45}, {0.97, 0.5}}), UniformInterval{-2.0, 1.0}),
      validate_model(PiecewiseLinearCdf{{{-1.0, 0.0}, {-0.5, 0.2}, {0.5, 0.3}, {1.0, 1.0}}}, point(-1.0)),
  };
  for (const auto& m : models) {
    double prev = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double p = p_delta(m, i / 1000.0);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(p >= prev);
      prev = p;
    }
    CHECK(p_delta(m, 1e-9) == doctest::Approx(m.atom_at_one).epsilon(1e-6));
    CHECK(p_delta(m, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(models[1].atom_at_one == doctest::Approx(0.05));
  CHECK(models[1].q_bound == 2.0);
  CHECK_FALSE(models[1].flags.q_constant);
}

TEST_CASE("validate_model is idempotent") {
  const auto a = validate_model(atoms({{-0.4, 0.5}, {0.9, 0.5}}), UniformInterval{-1.0, 3.0});
  const auto b = validate_model(a.m, a.q_dist);
  CHECK(a.q_bound == b.q_bound);
  CHECK(a.mean_abs_m == b.mean_abs_m);
  CHECK(a.atom_at_one == b.atom_at_one);
  CHECK(a.flags.m_nonneg == b.flags.m_nonneg);
  CHECK(a.flags.q_constant == b.flags.q_constant);
  CHECK(a.q_bound == 3.0);
  CHECK(a.mean_abs_m == doctest::Approx(0.65));
}

TEST_CASE("sample: point masses and determinism") {
  CounterRng rng(1, StreamId::Perpetuity, 0);
  CHECK(sample(point(0.5), rng) == 0.5);
  CHECK(rng.blocks_consumed() == 0);

  CounterRng r1(7, StreamId::Perpetuity, 0);
  CounterRng r2(7, StreamId::Perpetuity, 0);
  const DistSpec u = UniformInterval{0.0, 1.0};
  CHECK(sample(u, r1) == sample(u, r2));
}

TEST_CASE("sample: discrete frequencies within 4 binomial standard errors") {
  const DistSpec d = atoms({{-0.5, 0.1}, {0.0, 0.25}, {0.3, 0.4}, {0.9, 0.25}});
  std::map<double, std::uint64_t> freq;
  constexpr std::uint64_t kN = 1'000'000;
  for (std::uint64_t i = 0; i < kN; ++i) {
    CounterRng rng(99, StreamId::Perpetuity, i);
    ++freq[sample(d, rng)];
  }
  for (const Atom& a : std::get<DiscreteFinite>(d).atoms) {
    const double se = std::sqrt(a.prob * (1.0 - a.prob) / kN);
    CHECK(std::abs(static_cast<double>(freq[a.value]) / kN - a.prob) < 4.0 * se);
  }
}

TEST_CASE("sample: piecewise CDF inverse matches the CDF") {
  const DistSpec p = PiecewiseLinearCdf{{{-1.0, 0.0}, {0.0, 0.8}, {1.0, 1.0}}};
  constexpr std::uint64_t kN = 200'000;
  std::uint64_t below = 0;
  for (std::uint64_t i = 0; i < kN; ++i) {
    CounterRng rng(5, StreamId::Perpetuity, i);
    const double v = sample(p, rng);
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
    if (v <= -0.5) ++below;
  }
  // F(-0.5) = 0.4
  CHECK(std::abs(static_cast<double>(below) / kN - 0.4) < 4.0 * std::sqrt(0.24 / kN));
}
