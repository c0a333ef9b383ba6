#pragma once
#include <string>
#include <vector>

#include "hml/poly.hpp"

namespace hml {

// Function on [0,1) constant on the 2^depth dyadic cells of the finest level;
// the filtration F_n is the algebra of the 2^n cells at level n.
struct DyadicFunction {
  int depth = 0;
  std::vector<cplx> values;

  DyadicFunction() : values(1, cplx(0.0, 0.0)) {}
  DyadicFunction(int dep, std::vector<cplx> v) : depth(dep), values(std::move(v)) {
    if (dep < 0 || dep > 24) throw std::invalid_argument("DyadicFunction: depth out of range");
    if ((long long)values.size() != (1LL << dep))
      throw std::invalid_argument("DyadicFunction: value count must be 2^depth");
  }

  long long cells() const { return 1LL << depth; }
};

cplx mean(const DyadicFunction& f);

// E_n f: block averages over level-n cells, returned at the original depth.
DyadicFunction dyadic_expectation(const DyadicFunction& f, int n);

// Delta_k f = E_k f - E_{k-1} f, 1 <= k <= depth.
DyadicFunction martingale_difference(const DyadicFunction& f, int k);

// Pointwise sqrt(sum_{k=1}^{depth} |Delta_k f|^2), real values.
std::vector<double> square_function(const DyadicFunction& f);

// Mean of the square function; the mean of f itself is excluded and carried
// separately by callers.
double h1_delta_norm(const DyadicFunction& f);

// r_j: +1 on the left half of each level-(j-1) cell, -1 on the right half.
DyadicFunction rademacher(int j, int depth);

// f = sum_k r_{m_k+1} f_k with f_k measurable at level m_k (validated);
// the only nonzero differences of the result are Delta_{m_k+1} f = r_{m_k+1} f_k.
DyadicFunction rademacher_embed(const std::vector<DyadicFunction>& fk,
                                const std::vector<int>& m, int depth);

struct DyadicInterval {
  int level = 0;
  long long index = 0;
  double measure() const { return std::ldexp(1.0, -level); }
};

// (1,2)-atom: mean zero, supported on I, ||a||_2 <= |I|^{-1/2}. The
// decomposition below normalizes to equality.
struct Atom {
  DyadicInterval interval;
  DyadicFunction values;
};

bool is_atom(const Atom& a, double tol = 1e-12);

struct AtomicDecomposition {
  std::vector<cplx> coeffs;
  std::vector<Atom> atoms;
  cplx residual_mean;
};

// Stopping-time construction on the running square function: for each
// threshold in {0} union {2^j} meeting the range of S, stop at the first
// level where S exceeds it, and emit the increments between consecutive
// stopped martingales on each maximal dyadic cell of {S > threshold} as one
// normalized atom. Reconstruction sum c_k a_k + residual_mean is exact up to
// rounding.
AtomicDecomposition atomic_decompose(const DyadicFunction& f);

// Observed coefficient-sum control: sum |c_k| <= kAtomicCoeffBound * h1_delta_norm(f)
// on the harness's random corpora (asserted in the acceptance suite).
constexpr double kAtomicCoeffBound = 12.0;

StepFunction to_step(const DyadicFunction& f);

std::string dyadic_to_json(const DyadicFunction& f);
DyadicFunction dyadic_from_json(const std::string& text);
std::string decomposition_to_json(const AtomicDecomposition& dec);
AtomicDecomposition decomposition_from_json(const std::string& text);

}  // namespace hml
