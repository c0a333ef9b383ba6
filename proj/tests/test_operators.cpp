#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "hml/operators.hpp"
#include "hml/poly.hpp"
#include "hml/rng.hpp"

using namespace hml;

namespace {
constexpr double kPi = 3.14159265358979323846;

AnalyticPoly random_poly_local(Rng& g, int degree) {
  std::vector<cplx> c((std::size_t)degree + 1);
  for (cplx& v : c) v = cplx(g.gaussian(), g.gaussian());
  return AnalyticPoly(std::move(c));
}
}  // namespace

TEST_CASE("translate of a polynomial rotates each coefficient") {
  AnalyticPoly f = translate(AnalyticPoly::character(2), 0.25);
  // e^{2 pi i 2 (t - 1/4)} = e^{-i pi} e^{2 pi i 2 t} = -e^{2 pi i 2 t}.
  CHECK(std::abs(f.coeffs[2] - cplx(-1.0, 0.0)) <= 1e-15);
}

TEST_CASE("translate of a step rotates cells when aligned") {
  StepFunction s(std::vector<cplx>{cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0)});
  StepFunction t = translate(s, 0.25);
  // (T_{x0} f)(t) = f(t - x0): cell 1 now shows the old cell 0.
  REQUIRE(t.pieces() == 4);
  CHECK(t.values[0] == cplx(4, 0));
  CHECK(t.values[1] == cplx(1, 0));
  CHECK(t.values[2] == cplx(2, 0));
  CHECK(t.values[3] == cplx(3, 0));
  CHECK_THROWS_AS(translate(s, 0.1), std::invalid_argument);
}

TEST_CASE("shift average keeps exactly the divisible frequencies") {
  Rng g(7);
  AnalyticPoly f = random_poly_local(g, 13);
  AnalyticPoly a = shift_average(f, 4);
  for (int j = 0; j <= 13; ++j) {
    if (j % 4 == 0)
      CHECK(a.coeffs[(std::size_t)j] == f.coeffs[(std::size_t)j]);
    else
      CHECK(a.coeffs[(std::size_t)j] == cplx(0.0, 0.0));
  }
}

TEST_CASE("shift average: coefficient route equals explicit translate average") {
  // Two independent routes to the same operator; they must agree at every
  // sample point.
  Rng g(8);
  const int N = 4, P = 64;
  AnalyticPoly f = random_poly_local(g, 31);
  StepFunction masked = sample_step(shift_average(f, N), P);
  StepFunction fs = sample_step(f, P);

  // Route 2: average the N translates of the sampled function directly.
  std::vector<cplx> acc((std::size_t)P, cplx(0.0, 0.0));
  for (int r = 0; r < N; ++r) {
    StepFunction tr = translate(fs, double(r) / double(N));
    for (int i = 0; i < P; ++i) acc[(std::size_t)i] += tr.values[(std::size_t)i];
  }
  for (int i = 0; i < P; ++i) {
    acc[(std::size_t)i] /= double(N);
    CHECK(std::abs(acc[(std::size_t)i] - masked.values[(std::size_t)i]) <= 1e-12);
  }

  // Route 3: the step overload, which averages cells in one pass.
  StepFunction viaStep = shift_average(fs, N);
  for (int i = 0; i < P; ++i)
    CHECK(std::abs(viaStep.values[(std::size_t)i] - masked.values[(std::size_t)i]) <= 1e-12);
}

TEST_CASE("shift average of steps is tile exact") {
  Rng g(9);
  const int N = 4, P = 32;
  std::vector<cplx> v((std::size_t)P);
  for (cplx& x : v) x = cplx(g.gaussian(), g.gaussian());
  StepFunction s(std::move(v));
  StepFunction a = shift_average(s, N);
  for (int i = 0; i + P / N < P; ++i)
    CHECK(a.values[(std::size_t)i] == a.values[(std::size_t)(i + P / N)]);
  CHECK_THROWS_AS(shift_average(s, 5), std::invalid_argument);  // 5 does not divide 32
}

TEST_CASE("periodize compresses an exactly periodic step") {
  StepFunction s(std::vector<cplx>{cplx(1, 0), cplx(2, 0), cplx(1, 0), cplx(2, 0)});
  StepFunction p = periodize(s, 2);
  REQUIRE(p.pieces() == 2);
  CHECK(p.values[0] == cplx(1, 0));
  CHECK(p.values[1] == cplx(2, 0));
  CHECK_THROWS_AS(periodize(StepFunction(std::vector<cplx>{cplx(1, 0), cplx(2, 0), cplx(3, 0),
                                                           cplx(4, 0)}),
                            2),
                  std::invalid_argument);
  CHECK_THROWS_AS(periodize(s, 3), std::invalid_argument);
}

TEST_CASE("grid expectation of characters: frozen values") {
  // E_2 applied to e^{2 pi i t}: cell k takes the average of e^{2 pi i t} over
  // [k/2, (k+1)/2), which is (+-) 2i/pi up to orientation. Computed by hand:
  //   (1/(1/2)) * [e^{2 pi i t}/(2 pi i)] over [0,1/2) = 2i/pi on cell 0.
  StepFunction e1 = grid_expectation(AnalyticPoly::character(1), 2);
  REQUIRE(e1.pieces() == 2);
  CHECK(std::abs(e1.values[0] - cplx(0.0, 2.0 / kPi)) <= 1e-14);
  CHECK(std::abs(e1.values[1] - cplx(0.0, -2.0 / kPi)) <= 1e-14);

  // Frequencies divisible by N average to zero exactly on every cell.
  StepFunction e2 = grid_expectation(AnalyticPoly::character(2), 2);
  CHECK(e2.values[0] == cplx(0.0, 0.0));
  CHECK(e2.values[1] == cplx(0.0, 0.0));

  StepFunction ec = grid_expectation(AnalyticPoly::constant(cplx(3.0, -1.0)), 4);
  for (const cplx& v : ec.values) CHECK(v == cplx(3.0, -1.0));
}

TEST_CASE("grid expectation matches fine-quadrature cell means") {
  Rng g(10);
  const int N = 4, F = 1 << 14;
  AnalyticPoly f = random_poly_local(g, 9);
  StepFunction e = grid_expectation(f, N);
  REQUIRE(e.pieces() == N);
  QuadratureGrid grid;
  grid.size = F;
  StepFunction fs = sample(f, grid);
  const int per = F / N;
  for (int k = 0; k < N; ++k) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < per; ++i) acc += fs.values[(std::size_t)(k * per + i)];
    acc /= double(per);
    // Midpoint-free Riemann mean of a smooth function: O(sup|f'|/F) error.
    CHECK(std::abs(acc - e.values[(std::size_t)k]) <= 1e-2);
  }
}

TEST_CASE("grid expectation of steps takes block means") {
  StepFunction s(std::vector<cplx>{cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0)});
  StepFunction e = grid_expectation(s, 2);
  REQUIRE(e.pieces() == 2);
  CHECK(e.values[0] == cplx(1.5, 0.0));
  CHECK(e.values[1] == cplx(3.5, 0.0));
  CHECK_THROWS_AS(grid_expectation(s, 3), std::invalid_argument);
}

TEST_CASE("grid expectation is idempotent on its own partition") {
  Rng g(11);
  std::vector<cplx> v(8);
  for (cplx& x : v) x = cplx(g.gaussian(), g.gaussian());
  StepFunction s(std::move(v));
  StepFunction e = grid_expectation(s, 4);
  StepFunction ee = grid_expectation(refine_to(e, 8), 4);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(ee.values[(std::size_t)i] - e.values[(std::size_t)i]) <= 1e-15);
}

TEST_CASE("apply_symbol masks coefficients and respects the horizon") {
  Symbol sym;
  sym.values = {1.0, 0.0, 0.5};
  AnalyticPoly f(std::vector<cplx>{cplx(1, 0), cplx(2, 0), cplx(4, 0)});
  AnalyticPoly g = apply_symbol(f, sym);
  CHECK(g.coeffs[0] == cplx(1, 0));
  CHECK(g.coeffs[1] == cplx(0, 0));
  CHECK(g.coeffs[2] == cplx(2, 0));
  AnalyticPoly big(std::vector<cplx>(5, cplx(1, 0)));
  CHECK_THROWS_AS(apply_symbol(big, sym), std::invalid_argument);
}

TEST_CASE("pointwise modulus") {
  StepFunction s(std::vector<cplx>{cplx(3, 4), cplx(0, -2)});
  StepFunction a = abs_pointwise(s);
  CHECK(a.values[0] == cplx(5.0, 0.0));
  CHECK(a.values[1] == cplx(2.0, 0.0));

  QuadratureGrid grid = make_grid(1);
  StepFunction ap = abs_pointwise(AnalyticPoly::character(1), grid);
  for (const cplx& v : ap.values) CHECK(std::abs(v - cplx(1.0, 0.0)) <= 1e-12);
}
