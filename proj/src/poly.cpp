#include "hml/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hml/fft.hpp"

namespace hml {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool is_pow2(long long v) { return v > 0 && (v & (v - 1)) == 0; }

int next_pow2_at_least(long long v) {
  int m = 1;
  while (m < v) {
    if (m > (1 << 28)) throw std::invalid_argument("grid size overflow");
    m <<= 1;
  }
  return m;
}

}  // namespace

QuadratureGrid make_grid(int max_degree, int oversample) {
  if (max_degree < 0) throw std::invalid_argument("make_grid: negative degree");
  if (oversample < 4) throw std::invalid_argument("make_grid: oversample must be >= 4");
  QuadratureGrid g;
  g.size = next_pow2_at_least((long long)oversample * (max_degree + 1));
  return g;
}

cplx eval(const AnalyticPoly& f, double t) {
  // Horner in e^{2 pi i t}.
  cplx w = std::polar(1.0, kTwoPi * t);
  cplx acc(0.0, 0.0);
  for (std::size_t j = f.coeffs.size(); j-- > 0;) acc = acc * w + f.coeffs[j];
  return acc;
}

cplx eval(const KernelCoeffs& g, double t) {
  cplx acc(0.0, 0.0);
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    long long freq = g.offset + (long long)k;
    acc += g.values[k] * std::polar(1.0, kTwoPi * double(freq) * t);
  }
  return acc;
}

StepFunction sample(const AnalyticPoly& f, const QuadratureGrid& grid) {
  int M = grid.size;
  if (!is_pow2(M)) throw std::invalid_argument("sample: grid size must be a power of two");
  if (M < f.degree() + 1) throw std::invalid_argument("sample: grid too small for degree");
  std::vector<cplx> a(std::size_t(M), cplx(0.0, 0.0));
  std::copy(f.coeffs.begin(), f.coeffs.end(), a.begin());
  fft_radix2(a, /*inverse=*/true);  // X[i] = sum_j c_j e^{+2 pi i ij/M} = f(i/M)
  return StepFunction(std::move(a));
}

StepFunction sample_step(const AnalyticPoly& f, int P) {
  if (P < 1) throw std::invalid_argument("sample_step: P must be positive");
  std::vector<cplx> v(std::size_t(P), cplx(0.0, 0.0));
  for (int i = 0; i < P; ++i) v[std::size_t(i)] = eval(f, double(i) / double(P));
  return StepFunction(std::move(v));
}

StepFunction sample(const KernelCoeffs& g, const QuadratureGrid& grid) {
  int M = grid.size;
  if (!is_pow2(M)) throw std::invalid_argument("sample: grid size must be a power of two");
  long long span = g.freq_hi() - g.freq_lo() + 1;
  if (span > M) throw std::invalid_argument("sample: grid too small for kernel span");
  // Fold frequencies mod M; exact because the span fits.
  std::vector<cplx> a(std::size_t(M), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    long long freq = g.offset + (long long)k;
    long long r = freq % M;
    if (r < 0) r += M;
    a[std::size_t(r)] += g.values[k];
  }
  fft_radix2(a, /*inverse=*/true);
  return StepFunction(std::move(a));
}

double l2_norm(const AnalyticPoly& f) {
  double s = 0.0;
  for (const cplx& c : f.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

double l2_norm(const StepFunction& f) {
  double s = 0.0;
  for (const cplx& v : f.values) s += std::norm(v);
  return std::sqrt(s / double(f.pieces()));
}

double sup_norm_estimate(const AnalyticPoly& f, const QuadratureGrid& grid) {
  StepFunction s = sample(f, grid);
  double mx = 0.0;
  for (const cplx& v : s.values) mx = std::max(mx, std::abs(v));
  return 2.0 * mx;
}

L1Result l1_norm(const AnalyticPoly& f, const QuadratureGrid& grid) {
  StepFunction s = sample(f, grid);
  double mx = 0.0;
  double acc = 0.0;
  for (const cplx& v : s.values) {
    double a = std::abs(v);
    acc += a;
    mx = std::max(mx, a);
  }
  L1Result r;
  r.value = acc / double(grid.size);
  // Left Riemann vs integral: error <= Lip(|f|)/(2M) <= ||f'||_inf/(2M)
  // <= pi * deg * ||f||_inf / M (Bernstein), with ||f||_inf taken as twice
  // the grid max.
  r.error_bound = kTwoPi / 2.0 * double(f.degree()) * (2.0 * mx) / double(grid.size);
  return r;
}

L1Result l1_norm(const StepFunction& f) {
  double acc = 0.0;
  for (const cplx& v : f.values) acc += std::abs(v);
  return L1Result{acc / double(f.pieces()), 0.0};
}

L1Result l1_norm(const KernelCoeffs& g, const QuadratureGrid& grid) {
  StepFunction s = sample(g, grid);
  double mx = 0.0;
  double acc = 0.0;
  for (const cplx& v : s.values) {
    double a = std::abs(v);
    acc += a;
    mx = std::max(mx, a);
  }
  long long degmax = std::max(std::llabs(g.freq_lo()), std::llabs(g.freq_hi()));
  L1Result r;
  r.value = acc / double(grid.size);
  r.error_bound = kTwoPi / 2.0 * double(degmax) * (2.0 * mx) / double(grid.size);
  return r;
}

StepFunction refine_to(const StepFunction& f, int P) {
  int p = f.pieces();
  if (P % p != 0) throw std::invalid_argument("refine_to: target partition not a multiple");
  int rep = P / p;
  std::vector<cplx> v(std::size_t(P), cplx(0.0, 0.0));
  for (int i = 0; i < p; ++i)
    for (int r = 0; r < rep; ++r) v[std::size_t(i * rep + r)] = f.values[std::size_t(i)];
  return StepFunction(std::move(v));
}

int common_partition(const std::vector<StepFunction>& fam, int cap) {
  long long L = 1;
  for (const StepFunction& f : fam) {
    L = std::lcm(L, (long long)f.pieces());
    if (L > cap) throw std::invalid_argument("common_partition: lcm of partitions exceeds cap");
  }
  return int(L);
}

L1Result mixed_l1l2_norm(const std::vector<StepFunction>& fam) {
  if (fam.empty()) throw std::invalid_argument("mixed_l1l2_norm: empty family");
  int P = common_partition(fam);
  std::vector<double> sq(std::size_t(P), 0.0);
  for (const StepFunction& f : fam) {
    int rep = P / f.pieces();
    for (int i = 0; i < f.pieces(); ++i) {
      double n2 = std::norm(f.values[std::size_t(i)]);
      for (int r = 0; r < rep; ++r) sq[std::size_t(i * rep + r)] += n2;
    }
  }
  double acc = 0.0;
  for (double v : sq) acc += std::sqrt(v);
  return L1Result{acc / double(P), 0.0};
}

L1Result mixed_l1l2_norm(const std::vector<AnalyticPoly>& fam, const QuadratureGrid& grid) {
  if (fam.empty()) throw std::invalid_argument("mixed_l1l2_norm: empty family");
  int M = grid.size;
  std::vector<double> sq(std::size_t(M), 0.0);
  double bound = 0.0;
  for (const AnalyticPoly& f : fam) {
    StepFunction s = sample(f, grid);
    double mx = 0.0;
    for (int i = 0; i < M; ++i) {
      double a2 = std::norm(s.values[std::size_t(i)]);
      sq[std::size_t(i)] += a2;
      mx = std::max(mx, std::sqrt(a2));
    }
    // The pointwise l2 of the family is 1-Lipschitz in each member, so the
    // member-wise L1 Riemann bounds add up.
    bound += kTwoPi / 2.0 * double(f.degree()) * (2.0 * mx) / double(M);
  }
  double acc = 0.0;
  for (double v : sq) acc += std::sqrt(v);
  return L1Result{acc / double(M), bound};
}

KernelCoeffs fejer_kernel(int n) {
  if (n < 1) throw std::invalid_argument("fejer_kernel: n must be >= 1");
  KernelCoeffs g;
  g.offset = -(long long)n;
  g.values.resize(std::size_t(2 * n + 1));
  for (int j = -n; j <= n; ++j)
    g.values[std::size_t(j + n)] = 1.0 - double(std::abs(j)) / double(n);
  return g;
}

KernelCoeffs modulated_fejer_kernel(int n, long long center) {
  KernelCoeffs g = fejer_kernel(n);
  g.offset += center;
  return g;
}

AnalyticPoly derivative(const AnalyticPoly& f) {
  std::vector<cplx> c(f.coeffs.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    c[j] = f.coeffs[j] * cplx(0.0, kTwoPi * double(j));
  return AnalyticPoly(std::move(c));
}

AnalyticPoly convolve(const AnalyticPoly& f, const KernelCoeffs& g) {
  std::vector<cplx> c(f.coeffs.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = f.coeffs[j] * g.at((long long)j);
  return AnalyticPoly(std::move(c));
}

cplx eval(const BivariatePoly& F, double t1, double t2) {
  cplx w2 = std::polar(1.0, kTwoPi * t2);
  cplx acc(0.0, 0.0);
  cplx w1 = std::polar(1.0, kTwoPi * t1);
  // Horner over n1, inner Horner over n2.
  for (int n1 = F.deg1; n1 >= 0; --n1) {
    cplx row(0.0, 0.0);
    for (int n2 = F.deg2; n2 >= 0; --n2) row = row * w2 + F.at(n1, n2);
    acc = acc * w1 + row;
  }
  return acc;
}

std::vector<cplx> sample_2d(const BivariatePoly& F, int M1, int M2) {
  if (!is_pow2(M1) || !is_pow2(M2))
    throw std::invalid_argument("sample_2d: grid sizes must be powers of two");
  if (M1 < F.deg1 + 1 || M2 < F.deg2 + 1)
    throw std::invalid_argument("sample_2d: grid too small for degrees");
  std::vector<cplx> out(std::size_t(M1) * std::size_t(M2), cplx(0.0, 0.0));
  // Transform rows (t2 direction) for each retained n1, then columns.
  std::vector<cplx> row(std::size_t(M2), cplx(0.0, 0.0));
  for (int n1 = 0; n1 <= F.deg1; ++n1) {
    std::fill(row.begin(), row.end(), cplx(0.0, 0.0));
    for (int n2 = 0; n2 <= F.deg2; ++n2) row[std::size_t(n2)] = F.at(n1, n2);
    fft_radix2(row, true);
    for (int i2 = 0; i2 < M2; ++i2) out[std::size_t(n1) * std::size_t(M2) + std::size_t(i2)] = row[std::size_t(i2)];
  }
  std::vector<cplx> col(std::size_t(M1), cplx(0.0, 0.0));
  for (int i2 = 0; i2 < M2; ++i2) {
    std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
    for (int n1 = 0; n1 <= F.deg1; ++n1) col[std::size_t(n1)] = out[std::size_t(n1) * std::size_t(M2) + std::size_t(i2)];
    fft_radix2(col, true);
    for (int i1 = 0; i1 < M1; ++i1) out[std::size_t(i1) * std::size_t(M2) + std::size_t(i2)] = col[std::size_t(i1)];
  }
  return out;
}

L1Result l1_norm_2d(const BivariatePoly& F, int oversample) {
  if (oversample < 2) throw std::invalid_argument("l1_norm_2d: oversample must be >= 2");
  int M1 = next_pow2_at_least((long long)oversample * (F.deg1 + 1));
  int M2 = next_pow2_at_least((long long)oversample * (F.deg2 + 1));
  std::vector<cplx> s = sample_2d(F, M1, M2);
  double acc = 0.0, mx = 0.0;
  for (const cplx& v : s) {
    double a = std::abs(v);
    acc += a;
    mx = std::max(mx, a);
  }
  L1Result r;
  r.value = acc / (double(M1) * double(M2));
  // Directional Lipschitz bounds add: pi*(deg1/M1 + deg2/M2)*||F||_inf.
  r.error_bound =
      kTwoPi / 2.0 * (double(F.deg1) / double(M1) + double(F.deg2) / double(M2)) * (2.0 * mx);
  return r;
}

}  // namespace hml
