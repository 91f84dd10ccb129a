#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perpetuity/dist.hpp"

namespace perpetuity {

struct PmfAtom {
  double value;
  std::string exact;  // rational "num/den" (or integer) the value was merged on
  double prob;
};

/// Exact law of R_n for finite-discrete M and Q. Atoms are sorted by value
/// and pairwise distinct as rationals.
struct ExactPmf {
  std::vector<PmfAtom> atoms;
  std::uint64_t n_steps = 0;
};

inline constexpr double kEnumerationBudget = 1e7;

/// Forward dynamic programming over R_k = M_k R_{k-1} + Q_k from R_0 = 0, with
/// values held as exact rationals. Throws BudgetExceeded when
/// (|supp M| |supp Q|)^n exceeds 10^7 and InvalidSpec for continuous laws.
ExactPmf exact_distribution(const PerpetuityModel& model, std::uint64_t n);

/// One more step of the recursion applied to an existing pmf.
ExactPmf advance_exact(const ExactPmf& pmf, const PerpetuityModel& model);

/// Dickman function rho on [0, inf); rho = 1 on [0, 1] and u rho'(u) = -rho(u-1).
double dickman_rho(double u);

/// Integral of rho over [from, inf).
double dickman_rho_integral(double from);

/// P(R > x) for M ~ Uniform(0,1), Q = 1, where R - 1 is standard Dickman:
/// e^{-gamma} times the integral of rho over [x - 1, inf). Requires x >= 1.
/// Absolute error is below 1e-8 for x <= 10.
double dickman_tail(double x);

}  // namespace perpetuity
