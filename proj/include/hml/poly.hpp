#pragma once
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hml {

using cplx = std::complex<double>;

// Analytic trigonometric polynomial on the circle [0,1):
//   f(t) = sum_{j=0}^{d} coeffs[j] e^{2 pi i j t}.
// Only nonnegative frequencies; degree = coeffs.size() - 1.
struct AnalyticPoly {
  std::vector<cplx> coeffs;

  AnalyticPoly() : coeffs(1, cplx(0.0, 0.0)) {}
  explicit AnalyticPoly(std::vector<cplx> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) throw std::invalid_argument("AnalyticPoly: empty coefficient list");
  }

  int degree() const { return int(coeffs.size()) - 1; }

  static AnalyticPoly character(int n) {
    if (n < 0) throw std::invalid_argument("AnalyticPoly::character: negative frequency");
    std::vector<cplx> c(std::size_t(n) + 1, cplx(0.0, 0.0));
    c[std::size_t(n)] = cplx(1.0, 0.0);
    return AnalyticPoly(std::move(c));
  }

  static AnalyticPoly constant(cplx v) { return AnalyticPoly({v}); }
};

// Piecewise-constant function on the uniform partition of [0,1) into P cells;
// values[i] is taken on [i/P, (i+1)/P).
struct StepFunction {
  std::vector<cplx> values;

  StepFunction() : values(1, cplx(0.0, 0.0)) {}
  explicit StepFunction(std::vector<cplx> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("StepFunction: empty value list");
  }

  int pieces() const { return int(values.size()); }

  cplx at(double t) const {
    double frac = t - std::floor(t);
    int P = pieces();
    int i = int(frac * P);
    if (i >= P) i = P - 1;
    return values[std::size_t(i)];
  }
};

// Real coefficient sequence supported on frequencies
// offset .. offset + values.size() - 1 (either sign of frequency allowed).
// This is how the Fejer-type kernels travel; convolution against an
// AnalyticPoly reads the kernel coefficient at each retained frequency.
struct KernelCoeffs {
  long long offset = 0;
  std::vector<double> values;

  long long freq_lo() const { return offset; }
  long long freq_hi() const { return offset + (long long)values.size() - 1; }

  double at(long long freq) const {
    if (freq < freq_lo() || freq > freq_hi()) return 0.0;
    return values[std::size_t(freq - offset)];
  }
};

// Uniform sampling grid t_i = i/M with M a power of two. Norm quadrature is
// a left-endpoint Riemann sum on this grid; the a-priori error bounds below
// assume M >= 4*(degree+1).
struct QuadratureGrid {
  int size = 0;
};

QuadratureGrid make_grid(int max_degree, int oversample = 8);

// Value plus a one-sided a-priori quadrature error bound. Exact computations
// (step functions) report bound 0.
struct L1Result {
  double value = 0.0;
  double error_bound = 0.0;
};

cplx eval(const AnalyticPoly& f, double t);
cplx eval(const KernelCoeffs& g, double t);

// Exact samples f(i/M) via zero-padded inverse FFT; requires M >= degree+1.
StepFunction sample(const AnalyticPoly& f, const QuadratureGrid& grid);
// Direct evaluation on an arbitrary partition size (P >= 1), O(P * degree).
StepFunction sample_step(const AnalyticPoly& f, int P);
StepFunction sample(const KernelCoeffs& g, const QuadratureGrid& grid);

// L2 norms are exact: Parseval for polynomials, cell sums for steps.
double l2_norm(const AnalyticPoly& f);
double l2_norm(const StepFunction& f);

// Sup-norm estimate used inside error bounds: 2 * max over grid nodes.
double sup_norm_estimate(const AnalyticPoly& f, const QuadratureGrid& grid);

L1Result l1_norm(const AnalyticPoly& f, const QuadratureGrid& grid);
L1Result l1_norm(const StepFunction& f);
L1Result l1_norm(const KernelCoeffs& g, const QuadratureGrid& grid);

// L1(l2) norm of a finite family: integral of the pointwise l2 of the member
// values. The step overload refines all members to the lcm partition and is
// exact; the polynomial overload samples on a shared grid and reports the
// summed per-member Riemann bounds.
L1Result mixed_l1l2_norm(const std::vector<StepFunction>& fam);
L1Result mixed_l1l2_norm(const std::vector<AnalyticPoly>& fam, const QuadratureGrid& grid);

// Common-partition refinement; throws if the lcm of the partition sizes
// exceeds the cap.
StepFunction refine_to(const StepFunction& f, int P);
int common_partition(const std::vector<StepFunction>& fam, int cap = 1 << 20);

// Fejer kernel K_n(t) = sum_{|j|<=n} (1-|j|/n) e^{2 pi i j t}, n >= 1.
KernelCoeffs fejer_kernel(int n);
// K_n modulated to be centered at the given frequency.
KernelCoeffs modulated_fejer_kernel(int n, long long center);

// Coefficient j of f' is 2 pi i j * coeffs[j].
AnalyticPoly derivative(const AnalyticPoly& f);

// (f * g)^(j) = fhat(j) ghat(j) for j in f's frequency range.
AnalyticPoly convolve(const AnalyticPoly& f, const KernelCoeffs& g);

// Dense bivariate analytic polynomial,
//   F(t1,t2) = sum_{n1<=deg1, n2<=deg2} c(n1,n2) e^{2 pi i (n1 t1 + n2 t2)}.
struct BivariatePoly {
  int deg1 = 0, deg2 = 0;
  std::vector<cplx> coeffs;  // row-major, index n1*(deg2+1)+n2

  BivariatePoly() : coeffs(1, cplx(0.0, 0.0)) {}
  BivariatePoly(int d1, int d2)
      : deg1(d1), deg2(d2), coeffs(std::size_t(d1 + 1) * std::size_t(d2 + 1), cplx(0.0, 0.0)) {
    if (d1 < 0 || d2 < 0) throw std::invalid_argument("BivariatePoly: negative degree");
  }

  cplx& at(int n1, int n2) { return coeffs[std::size_t(n1) * std::size_t(deg2 + 1) + std::size_t(n2)]; }
  const cplx& at(int n1, int n2) const {
    return coeffs[std::size_t(n1) * std::size_t(deg2 + 1) + std::size_t(n2)];
  }
};

cplx eval(const BivariatePoly& F, double t1, double t2);
// Samples F on the M1 x M2 grid (row-major, rows indexed by t1); both sizes
// powers of two with Mi >= degi+1.
std::vector<cplx> sample_2d(const BivariatePoly& F, int M1, int M2);
L1Result l1_norm_2d(const BivariatePoly& F, int oversample = 4);

}  // namespace hml
