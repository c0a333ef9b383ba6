#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "hml/rng.hpp"
#include "hml/symbols.hpp"

using namespace hml;

TEST_CASE("lacunary check: gaps, partial sums, dyadic envelopes") {
  LacunarySystem sys = lacunary_check({2, 4, 8}, 24.0);
  REQUIRE(sys.size() == 3);
  CHECK(sys.alpha_defined);
  CHECK(sys.alpha == Rational(1, 1));
  REQUIRE(sys.D.size() == 3);
  CHECK(sys.D[0] == 2);
  CHECK(sys.D[1] == 6);
  CHECK(sys.D[2] == 14);
  CHECK(sys.c_alpha_est == 24.0);
  // Least m with 2^m >= 3*24*d: d=2 -> 144 -> m=8; d=4 -> 288 -> m=9;
  // d=8 -> 576 -> m=10.
  REQUIRE(sys.m.size() == 3);
  CHECK(sys.m[0] == 8);
  CHECK(sys.m[1] == 9);
  CHECK(sys.m[2] == 10);
  CHECK(sys.M[0] == 256);
  CHECK(sys.M[1] == 512);
  CHECK(sys.M[2] == 1024);

  LacunarySystem one = lacunary_check({5});
  CHECK_FALSE(one.alpha_defined);

  CHECK_THROWS_AS(lacunary_check({2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(lacunary_check({4, 2}), std::invalid_argument);
  CHECK_THROWS_AS(lacunary_check({0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(lacunary_check({}), std::invalid_argument);
}

TEST_CASE("tent symbol: frozen block values") {
  LacunarySystem sys = lacunary_check({1, 2, 4});
  Symbol mu = build_mu_eps(sys, {1, 1, 1});
  // Blocks [0,3], [3,9], [9,21] with nodes (0, s, s, 0) spaced d_k apart.
  CHECK(mu.nmax() == 21);
  CHECK(mu.at(0) == 0.0);
  CHECK(mu.at(1) == 1.0);
  CHECK(mu.at(2) == 1.0);
  CHECK(mu.at(3) == 0.0);
  CHECK(mu.at(4) == 0.5);
  CHECK(mu.at(5) == 1.0);
  CHECK(mu.at(6) == 1.0);
  CHECK(mu.at(7) == 1.0);
  CHECK(mu.at(8) == 0.5);
  CHECK(mu.at(9) == 0.0);
  CHECK(mu.at(10) == 0.25);
  CHECK(mu.at(11) == 0.5);
  CHECK(mu.at(12) == 0.75);
  CHECK(mu.at(13) == 1.0);
  CHECK(mu.at(14) == 1.0);
  CHECK(mu.at(17) == 1.0);
  CHECK(mu.at(18) == 0.75);
  CHECK(mu.at(20) == 0.25);
  CHECK(mu.at(21) == 0.0);

  Symbol flipped = build_mu_eps(sys, {1, -1, 1});
  CHECK(flipped.at(4) == -0.5);
  CHECK(flipped.at(5) == -1.0);
  CHECK(flipped.at(8) == -0.5);
  CHECK(flipped.at(13) == 1.0);

  CHECK_THROWS_AS(build_mu_eps(sys, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_mu_eps(sys, {1, 2, 1}), std::invalid_argument);
}

TEST_CASE("peak symbol: frozen block values and the Fejer window match") {
  LacunarySystem sys = lacunary_check({2, 4, 8});
  Symbol kh = build_k_hat(sys);
  // Block [0,6], nodes at 0,2,4,6 with values (0,0,1,0).
  CHECK(kh.at(0) == 0.0);
  CHECK(kh.at(1) == 0.0);
  CHECK(kh.at(2) == 0.0);
  CHECK(kh.at(3) == 0.5);
  CHECK(kh.at(4) == 1.0);
  CHECK(kh.at(5) == 0.5);
  CHECK(kh.at(6) == 0.0);
  CHECK(kh.nmax() == 42);  // 3 * D_3

  // Within its own block the peak symbol IS the modulated Fejer kernel.
  KernelCoeffs window = modulated_fejer(sys, 1);
  CHECK(window.at(4) == 1.0);
  for (long long j = 0; j <= 6; ++j) CHECK(kh.at(j) == window.at(j));
  // Second block [6,18], d=4, peak at 6 + 8 = 14.
  KernelCoeffs w2 = modulated_fejer(sys, 2);
  CHECK(w2.at(14) == 1.0);
  CHECK(kh.at(14) == 1.0);
  CHECK(kh.at(10) == 0.0);
  CHECK(kh.at(12) == 0.5);
}

TEST_CASE("symbol-variation constant: frozen scan") {
  Symbol s(std::vector<double>{0.0, 1.0, 1.0, 0.0});
  // sup = 1; weighted steps: 1*1, 2*0, 3*1 -> 3.
  CHECK(stein_constant(s) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("symbol-variation constant: exact rational route vs float scan") {
  LacunarySystem sys = lacunary_check({2, 4, 8});
  Rational exact = stein_constant_exact(sys, BlockSymbolKind::KHat);
  CHECK(exact == Rational(21, 4));  // max over k of 3 D_k / d_k
  Symbol kh = build_k_hat(sys);
  CHECK(std::abs(stein_constant(kh) - exact.to_double()) <= 1e-9 * exact.to_double());

  Rational exactTent = stein_constant_exact(sys, BlockSymbolKind::MuEps);
  Symbol mu = build_mu_eps(sys, {1, -1, 1});
  CHECK(std::abs(stein_constant(mu) - exactTent.to_double()) <= 1e-9 * exactTent.to_double());

  Rational bound = stein_bound(sys);
  CHECK(bound == Rational(6, 1));  // alpha = 1 -> 3 * (1 + 1/1)
  CHECK(exact <= bound);
  CHECK(exactTent <= bound);
}

TEST_CASE("symbol-variation constant stays under the gap bound across systems") {
  Rng g(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<long long> d;
    long long cur = 1 + g.uniform_int(0, 3);
    int len = 2 + (int)g.uniform_int(0, 4);
    for (int k = 0; k < len; ++k) {
      d.push_back(cur);
      cur = cur * 2 + g.uniform_int(0, 2);
    }
    LacunarySystem sys = lacunary_check(d);
    Rational bound = stein_bound(sys);
    for (BlockSymbolKind kind : {BlockSymbolKind::MuEps, BlockSymbolKind::KHat}) {
      Rational exact = stein_constant_exact(sys, kind);
      CHECK(exact <= bound);
    }
    Symbol kh = build_k_hat(sys);
    CHECK(stein_constant(kh) <=
          stein_constant_exact(sys, BlockSymbolKind::KHat).to_double() * (1.0 + 1e-9));
  }
}

TEST_CASE("diagonal idempotent set membership") {
  IdemSet2D A({10}, {2});
  CHECK(idem_contains(A, 4, 6));
  CHECK_FALSE(idem_contains(A, 3, 7));
  CHECK(idem_contains(A, 10, 0));
  CHECK(idem_contains(A, 0, 10));
  CHECK_FALSE(idem_contains(A, 5, 5));
  CHECK_FALSE(idem_contains(A, 4, 7));   // off the diagonal
  CHECK_FALSE(idem_contains(A, -2, 12));  // negative coordinate

  IdemSet2D B({4, 9}, {2, 3});
  CHECK(idem_contains(B, 2, 2));
  CHECK(idem_contains(B, 6, 3));
  CHECK_FALSE(idem_contains(B, 4, 5));

  CHECK_THROWS_AS(IdemSet2D({4, 9}, {2}), std::invalid_argument);
}

TEST_CASE("strided subsequences inherit a larger gap ratio") {
  LacunarySystem sys = lacunary_check({1, 2, 3, 4, 6, 9});
  CHECK(sys.alpha == Rational(1, 3));
  std::vector<LacunarySystem> subs = split_subsequences(sys, 2);
  REQUIRE(subs.size() == 2);
  REQUIRE(subs[0].size() == 3);
  CHECK(subs[0].d[0] == 1);
  CHECK(subs[0].d[1] == 3);
  CHECK(subs[0].d[2] == 6);
  CHECK(subs[1].d[0] == 2);
  CHECK(subs[1].d[1] == 4);
  CHECK(subs[1].d[2] == 9);
  // Sub-gaps: (1,3,6) -> min(2, 1) = 1; (2,4,9) -> min(1, 5/4) = 1.
  CHECK(subs[0].alpha == Rational(1, 1));
  CHECK(subs[1].alpha == Rational(1, 1));
  // Guaranteed floor (1 + 1/3)^2 - 1 = 7/9 holds for both.
  CHECK(Rational(7, 9) <= subs[0].alpha);
  CHECK(Rational(7, 9) <= subs[1].alpha);
}

TEST_CASE("system and symbol JSON round trip") {
  LacunarySystem sys = lacunary_check({2, 4, 8}, 24.0);
  Symbol mu = build_mu_eps(sys, {1, -1, 1});
  std::string text = system_symbol_to_json(sys, mu);
  LacunarySystem back;
  Symbol muBack;
  system_symbol_from_json(text, back, muBack);
  CHECK(back.d == sys.d);
  CHECK(back.D == sys.D);
  CHECK(back.alpha == sys.alpha);
  CHECK(back.m == sys.m);
  CHECK(back.c_alpha_est == sys.c_alpha_est);
  REQUIRE(muBack.values.size() == mu.values.size());
  for (std::size_t i = 0; i < mu.values.size(); ++i) CHECK(muBack.values[i] == mu.values[i]);
  // Serialization is deterministic.
  CHECK(system_symbol_to_json(back, muBack) == text);
}
