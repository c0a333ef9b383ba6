#include "hml/indnorm.hpp"

#include <algorithm>
#include <cmath>

#include "hml/rng.hpp"

namespace hml {

namespace {

struct WeightedValues {
  std::vector<double> val2;    // squared modulus
  std::vector<double> weight;  // cell mass, sums to 1
};

WeightedValues collapse(const StepFunction& f) {
  std::vector<double> mods(f.values.size());
  for (std::size_t i = 0; i < mods.size(); ++i) mods[i] = std::abs(f.values[i]);
  std::sort(mods.begin(), mods.end());
  WeightedValues w;
  double cell = 1.0 / double(f.pieces());
  std::size_t i = 0;
  while (i < mods.size()) {
    std::size_t j = i;
    while (j < mods.size() && mods[j] == mods[i]) ++j;
    w.val2.push_back(mods[i] * mods[i]);
    w.weight.push_back(double(j - i) * cell);
    i = j;
  }
  return w;
}

void enumerate(const std::vector<WeightedValues>& ws, std::size_t k, double sum2, double weight,
               double& acc) {
  if (k == ws.size()) {
    acc += weight * std::sqrt(sum2);
    return;
  }
  const WeightedValues& w = ws[k];
  for (std::size_t i = 0; i < w.val2.size(); ++i)
    enumerate(ws, k + 1, sum2 + w.val2[i], weight * w.weight[i], acc);
}

// Deterministic pairwise reduction over an index range.
template <typename F>
double pairwise_sum(long long lo, long long hi, const F& term) {
  if (hi - lo <= 16) {
    double s = 0.0;
    for (long long i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  long long mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

}  // namespace

double ind_norm_exact(const std::vector<StepFunction>& fam, std::uint64_t budget) {
  if (fam.empty()) throw std::invalid_argument("ind_norm_exact: empty family");
  std::vector<WeightedValues> ws;
  ws.reserve(fam.size());
  double product = 1.0;
  for (const StepFunction& f : fam) {
    ws.push_back(collapse(f));
    product *= double(ws.back().val2.size());
    if (product > double(budget))
      throw IndBudgetExceeded("ind_norm_exact: collapsed product exceeds budget");
  }
  double acc = 0.0;
  enumerate(ws, 0, 0.0, 1.0, acc);
  return acc;
}

McResult ind_norm_mc(const std::vector<StepFunction>& fam, long long samples, std::uint64_t seed) {
  if (fam.empty()) throw std::invalid_argument("ind_norm_mc: empty family");
  if (samples < 2) throw std::invalid_argument("ind_norm_mc: need at least 2 samples");
  auto value_at = [&](long long s) {
    Rng r(derive_seed(seed, 0x1d, std::uint64_t(s)));
    double sum2 = 0.0;
    for (const StepFunction& f : fam) {
      int P = f.pieces();
      long long cell = (long long)(r.uniform01() * double(P));
      if (cell >= P) cell = P - 1;
      sum2 += std::norm(f.values[std::size_t(cell)]);
    }
    return std::sqrt(sum2);
  };
  double total = pairwise_sum(0, samples, value_at);
  double total2 = pairwise_sum(0, samples, [&](long long s) {
    double v = value_at(s);
    return v * v;
  });
  McResult res;
  res.samples = samples;
  res.estimate = total / double(samples);
  double var = (total2 - total * total / double(samples)) / double(samples - 1);
  if (var < 0.0) var = 0.0;
  res.stderr_est = std::sqrt(var / double(samples));
  return res;
}

double rademacher_average_exact(const std::vector<StepFunction>& fam) {
  if (fam.empty()) throw std::invalid_argument("rademacher_average_exact: empty family");
  if (fam.size() > 20) throw std::invalid_argument("rademacher_average_exact: family too large");
  int P = common_partition(fam);
  std::size_t n = fam.size();
  std::vector<std::vector<cplx>> vals(n);
  for (std::size_t k = 0; k < n; ++k) vals[k] = refine_to(fam[k], P).values;

  // Gray-code walk over the sign patterns; cur holds the running signed sum.
  // Rebuilt periodically to keep update rounding from accumulating.
  std::vector<cplx> cur(std::size_t(P), cplx(0.0, 0.0));
  std::vector<int> sgn(n, 1);
  for (std::size_t k = 0; k < n; ++k)
    for (int i = 0; i < P; ++i) cur[std::size_t(i)] += vals[k][std::size_t(i)];
  std::uint64_t patterns = 1ULL << n;
  double acc = 0.0;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    if (p != 0) {
      std::uint64_t g = p ^ (p >> 1), gprev = (p - 1) ^ ((p - 1) >> 1);
      std::uint64_t flip = g ^ gprev;
      std::size_t k = std::size_t(__builtin_ctzll(flip));
      sgn[k] = -sgn[k];
      double f2 = 2.0 * double(sgn[k]);
      for (int i = 0; i < P; ++i) cur[std::size_t(i)] += f2 * vals[k][std::size_t(i)];
      if ((p & 1023) == 0) {
        std::fill(cur.begin(), cur.end(), cplx(0.0, 0.0));
        for (std::size_t kk = 0; kk < n; ++kk)
          for (int i = 0; i < P; ++i) cur[std::size_t(i)] += double(sgn[kk]) * vals[kk][std::size_t(i)];
      }
    }
    double l1 = 0.0;
    for (int i = 0; i < P; ++i) l1 += std::abs(cur[std::size_t(i)]);
    acc += l1 / double(P);
  }
  return acc / double(patterns);
}

}  // namespace hml
