#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hml/poly.hpp"

namespace hml {

// Norm of a family over independent coordinates:
//   || (f_k) ||_ind = integral of sqrt(sum_k |f_k(w_k)|^2) d(w_1,...,w_n),
// each coordinate uniform on [0,1).

struct IndBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact product-measure enumeration. The integrand sees each member only
// through the distribution of |f_k|, so equal moduli are collapsed to
// (value, weight) pairs first; the budget applies to the collapsed product.
// Throws IndBudgetExceeded (use the Monte Carlo route) when it does not fit.
double ind_norm_exact(const std::vector<StepFunction>& fam, std::uint64_t budget = 1u << 24);

struct McResult {
  double estimate = 0.0;
  double stderr_est = 0.0;
  long long samples = 0;
};

// Monte Carlo estimate with counter-based per-sample seeding and pairwise
// aggregation; identical output for any evaluation order.
McResult ind_norm_mc(const std::vector<StepFunction>& fam, long long samples, std::uint64_t seed);

// Average of ||sum_k eps_k f_k||_{L1} over all 2^n sign patterns (n <= 20),
// members refined to a common partition.
double rademacher_average_exact(const std::vector<StepFunction>& fam);

}  // namespace hml
