#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "hml/poly.hpp"
#include "hml/rational.hpp"

namespace hml {

// One-sided Fourier multiplier symbol stored densely on 0..nmax. Beyond the
// horizon the symbol is 0 by convention, but applying it to a polynomial of
// larger degree is an error rather than a silent truncation.
struct Symbol {
  std::vector<double> values;

  Symbol() : values(1, 0.0) {}
  explicit Symbol(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("Symbol: empty value list");
  }

  long long nmax() const { return (long long)values.size() - 1; }
  double at(long long n) const { return values[std::size_t(n)]; }
};

// Strictly increasing positive integers d_1 < d_2 < ... with
// d_{k+1} >= (1+alpha) d_k; alpha is the exact min ratio minus one.
// D_k = d_1 + ... + d_k. When a multiplier-norm estimate c_alpha_est > 0 is
// supplied, m_k is the least integer with 2^{m_k} >= 3 * c_alpha_est * d_k
// and M_k = 2^{m_k}.
struct LacunarySystem {
  std::vector<long long> d;
  std::vector<long long> D;
  Rational alpha;
  bool alpha_defined = false;  // false for lengths < 2
  double c_alpha_est = 0.0;
  std::vector<int> m;
  std::vector<long long> M;

  int size() const { return int(d.size()); }
};

LacunarySystem lacunary_check(const std::vector<long long>& d, double c_alpha_est = 0.0);

// Piecewise-affine symbol on blocks [3 D_{k-1}, 3 D_k] with nodes at
// 3 D_{k-1} + j d_k, j = 0..3, node values (0, s_k, s_k, 0); affine between
// nodes, horizon 3 D_n. signs entries are +1 or -1.
Symbol build_mu_eps(const LacunarySystem& sys, const std::vector<int>& signs);

// Same block geometry with node values (0, 0, 1, 0).
Symbol build_k_hat(const LacunarySystem& sys);

// Fejer kernel of width d_k recentered at 3 D_{k-1} + 2 d_k (k is 1-based).
KernelCoeffs modulated_fejer(const LacunarySystem& sys, int k);

// Float scan of max(sup |mu|, sup (n+1)|mu(n+1)-mu(n)|).
double stein_constant(const Symbol& mu);

enum class BlockSymbolKind { MuEps, KHat };

// Exact Stein constant for the two block symbols: within block k the slope
// magnitude is 1/d_k and the largest weighted step sits at the block end, so
// the constant is max(1, max_k 3 D_k / d_k) as a rational.
Rational stein_constant_exact(const LacunarySystem& sys, BlockSymbolKind kind);

// Exact bound max(1, 3(1+1/alpha)); requires alpha_defined.
Rational stein_bound(const LacunarySystem& sys);

// Union over k of the diagonal pieces
//   { (n1, n2) : n1 + n2 = d_k, n1 >= 0, n2 >= 0, N_k | n1 }.
struct IdemSet2D {
  std::vector<long long> d;
  std::vector<long long> N;

  IdemSet2D() = default;
  IdemSet2D(std::vector<long long> dv, std::vector<long long> Nv);
  int size() const { return int(d.size()); }
};

bool idem_contains(const IdemSet2D& A, long long n1, long long n2);

// Splits d into the q strided subsequences (d_r, d_{r+q}, d_{r+2q}, ...),
// r = 0..q-1, and validates that each inherits alpha >= (1+alpha)^q - 1.
std::vector<LacunarySystem> split_subsequences(const LacunarySystem& sys, int q);

// JSON document {d, alpha, D, m, C_alpha_est, symbol_values}; integers and
// the rational alpha round-trip bit-exactly, doubles at 17 significant digits.
std::string system_symbol_to_json(const LacunarySystem& sys, const Symbol& mu);
void system_symbol_from_json(const std::string& text, LacunarySystem& sys, Symbol& mu);

}  // namespace hml
