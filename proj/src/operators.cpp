#include "hml/operators.hpp"

#include <cmath>

namespace hml {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

AnalyticPoly translate(const AnalyticPoly& f, double x0) {
  std::vector<cplx> c(f.coeffs.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    c[j] = f.coeffs[j] * std::polar(1.0, -kTwoPi * double(j) * x0);
  return AnalyticPoly(std::move(c));
}

StepFunction translate(const StepFunction& f, double x0) {
  int P = f.pieces();
  double slots_d = x0 * double(P);
  long long slots = (long long)std::llround(slots_d);
  if (std::abs(slots_d - double(slots)) > 1e-9)
    throw std::invalid_argument("translate: shift not aligned to the partition");
  long long s = slots % P;
  if (s < 0) s += P;
  std::vector<cplx> v(std::size_t(P), cplx(0.0, 0.0));
  for (int i = 0; i < P; ++i) v[std::size_t(i)] = f.values[std::size_t((i - s + P) % P)];
  return StepFunction(std::move(v));
}

AnalyticPoly shift_average(const AnalyticPoly& f, int N) {
  if (N < 1) throw std::invalid_argument("shift_average: N must be positive");
  std::vector<cplx> c(f.coeffs.size(), cplx(0.0, 0.0));
  for (std::size_t j = 0; j < c.size(); ++j)
    if (j % std::size_t(N) == 0) c[j] = f.coeffs[j];
  return AnalyticPoly(std::move(c));
}

StepFunction shift_average(const StepFunction& f, int N) {
  if (N < 1) throw std::invalid_argument("shift_average: N must be positive");
  int P = f.pieces();
  if (P % N != 0) throw std::invalid_argument("shift_average: N must divide the partition");
  int s = P / N;
  // The result is 1/N-periodic; computing one period and tiling keeps the N
  // copies bitwise equal (one fixed summation order per residue class).
  std::vector<cplx> v(std::size_t(P), cplx(0.0, 0.0));
  for (int i = 0; i < s; ++i) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < N; ++j) acc += f.values[std::size_t(i + j * s)];
    cplx m = acc / double(N);
    for (int j = 0; j < N; ++j) v[std::size_t(i + j * s)] = m;
  }
  return StepFunction(std::move(v));
}

StepFunction periodize(const StepFunction& f, int N) {
  if (N < 1) throw std::invalid_argument("periodize: N must be positive");
  int P = f.pieces();
  if (P % N != 0) throw std::invalid_argument("periodize: N must divide the partition");
  int s = P / N;
  for (int i = s; i < P; ++i)
    if (f.values[std::size_t(i)] != f.values[std::size_t(i % s)])
      throw std::invalid_argument("periodize: function is not 1/N-periodic");
  std::vector<cplx> v(f.values.begin(), f.values.begin() + s);
  return StepFunction(std::move(v));
}

StepFunction grid_expectation(const AnalyticPoly& f, int N) {
  if (N < 1) throw std::invalid_argument("grid_expectation: N must be positive");
  // Cell mean of e^{2 pi i j t} over [k/N,(k+1)/N):
  //   N sin(pi j/N)/(pi j) * e^{2 pi i j (k+1/2)/N},  zero when N | j, j > 0.
  std::vector<cplx> v(std::size_t(N), cplx(0.0, 0.0));
  for (int k = 0; k < N; ++k) v[std::size_t(k)] = f.coeffs[0];
  for (std::size_t j = 1; j < f.coeffs.size(); ++j) {
    if (j % std::size_t(N) == 0) continue;
    if (f.coeffs[j] == cplx(0.0, 0.0)) continue;
    // sin(pi j/N) reduced mod N for an exact zero at multiples; the parity of
    // j/N carries the sign.
    double s = std::sin(kPi * double(j % std::size_t(N)) / double(N));
    if ((j / std::size_t(N)) % 2 == 1) s = -s;
    double amp = double(N) * s / (kPi * double(j));
    for (int k = 0; k < N; ++k) {
      double ang = kTwoPi * double(j) * (double(k) + 0.5) / double(N);
      v[std::size_t(k)] += f.coeffs[j] * amp * std::polar(1.0, ang);
    }
  }
  return StepFunction(std::move(v));
}

StepFunction grid_expectation(const StepFunction& f, int N) {
  if (N < 1) throw std::invalid_argument("grid_expectation: N must be positive");
  int P = f.pieces();
  if (P % N != 0) throw std::invalid_argument("grid_expectation: N must divide the partition");
  int blk = P / N;
  std::vector<cplx> v(std::size_t(N), cplx(0.0, 0.0));
  for (int k = 0; k < N; ++k) {
    cplx acc(0.0, 0.0);
    for (int r = 0; r < blk; ++r) acc += f.values[std::size_t(k * blk + r)];
    v[std::size_t(k)] = acc / double(blk);
  }
  return StepFunction(std::move(v));
}

AnalyticPoly apply_symbol(const AnalyticPoly& f, const Symbol& mu) {
  if ((long long)f.degree() > mu.nmax())
    throw std::invalid_argument("apply_symbol: symbol shorter than the spectrum");
  std::vector<cplx> c(f.coeffs.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = f.coeffs[j] * mu.at((long long)j);
  return AnalyticPoly(std::move(c));
}

BivariatePoly apply_symbol_2d(const BivariatePoly& F, const IdemSet2D& A) {
  BivariatePoly out(F.deg1, F.deg2);
  for (int n1 = 0; n1 <= F.deg1; ++n1)
    for (int n2 = 0; n2 <= F.deg2; ++n2)
      out.at(n1, n2) = idem_contains(A, n1, n2) ? F.at(n1, n2) : cplx(0.0, 0.0);
  return out;
}

StepFunction abs_pointwise(const StepFunction& f) {
  std::vector<cplx> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(std::abs(f.values[i]), 0.0);
  return StepFunction(std::move(v));
}

StepFunction abs_pointwise(const AnalyticPoly& f, const QuadratureGrid& grid) {
  return abs_pointwise(sample(f, grid));
}

}  // namespace hml
