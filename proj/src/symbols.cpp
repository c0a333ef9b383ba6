#include "hml/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "hml/jsonout.hpp"

namespace hml {

namespace {

int ceil_log2(double x) {
  // Least m with 2^m >= x, settled by exact ldexp comparison after a float
  // first guess so boundary cases (x an exact power of two) land right.
  if (!(x > 0.0)) throw std::invalid_argument("ceil_log2: nonpositive argument");
  int m = int(std::ceil(std::log2(x))) - 2;
  while (std::ldexp(1.0, m) < x) ++m;
  return m;
}

}  // namespace

LacunarySystem lacunary_check(const std::vector<long long>& d, double c_alpha_est) {
  if (d.empty()) throw std::invalid_argument("lacunary_check: empty sequence");
  LacunarySystem sys;
  sys.d = d;
  sys.D.resize(d.size());
  long long run = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] <= 0) throw std::invalid_argument("lacunary_check: entries must be positive");
    if (k > 0 && d[k] <= d[k - 1])
      throw std::invalid_argument("lacunary_check: sequence must be strictly increasing");
    run += d[k];
    sys.D[k] = run;
  }
  if (d.size() >= 2) {
    sys.alpha_defined = true;
    sys.alpha = Rational(d[1] - d[0], d[0]);
    for (std::size_t k = 2; k < d.size(); ++k)
      sys.alpha = rational_min(sys.alpha, Rational(d[k] - d[k - 1], d[k - 1]));
    if (sys.alpha.num <= 0) throw std::invalid_argument("lacunary_check: alpha must be positive");
    // Geometric tail bound D_k <= (1 + 1/alpha) d_k, exact.
    Rational cap = Rational(sys.alpha.num + sys.alpha.den, sys.alpha.num);
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (!(Rational(sys.D[k]) <= cap * Rational(d[k])))
        throw std::logic_error("lacunary_check: partial-sum bound violated");
    }
  }
  if (c_alpha_est > 0.0) {
    sys.c_alpha_est = c_alpha_est;
    sys.m.resize(d.size());
    sys.M.resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      double target = 3.0 * c_alpha_est * double(d[k]);
      int mk = ceil_log2(target);
      if (mk > 60) throw std::invalid_argument("lacunary_check: M_k overflows");
      if (mk < 0) mk = 0;
      sys.m[k] = mk;
      sys.M[k] = 1LL << mk;
      double Mk = double(sys.M[k]);
      if (!(target <= Mk && Mk < 2.0 * target))
        throw std::logic_error("lacunary_check: M_k sandwich violated");
    }
    if (sys.alpha_defined && Rational(1) < sys.alpha) {
      for (std::size_t k = 1; k < d.size(); ++k)
        if (!(sys.m[k] > sys.m[k - 1]))
          throw std::logic_error("lacunary_check: m must increase when alpha > 1");
    }
  }
  return sys;
}

Symbol build_mu_eps(const LacunarySystem& sys, const std::vector<int>& signs) {
  int n = sys.size();
  if ((int)signs.size() != n) throw std::invalid_argument("build_mu_eps: signs length mismatch");
  for (int s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("build_mu_eps: signs must be +-1");
  long long H = 3 * sys.D[std::size_t(n - 1)];
  std::vector<double> v(std::size_t(H + 1), 0.0);
  for (int k = 0; k < n; ++k) {
    long long b = (k == 0) ? 0 : 3 * sys.D[std::size_t(k - 1)];
    long long dk = sys.d[std::size_t(k)];
    double eps = double(signs[std::size_t(k)]);
    for (long long j = 0; j <= dk; ++j) {
      v[std::size_t(b + j)] = eps * double(j) / double(dk);          // 0 -> eps
      v[std::size_t(b + dk + j)] = eps;                              // plateau
      v[std::size_t(b + 2 * dk + j)] = eps * double(dk - j) / double(dk);  // eps -> 0
    }
    v[std::size_t(b)] = 0.0;
    v[std::size_t(b + 3 * dk)] = 0.0;
  }
  return Symbol(std::move(v));
}

Symbol build_k_hat(const LacunarySystem& sys) {
  int n = sys.size();
  long long H = 3 * sys.D[std::size_t(n - 1)];
  std::vector<double> v(std::size_t(H + 1), 0.0);
  for (int k = 0; k < n; ++k) {
    long long b = (k == 0) ? 0 : 3 * sys.D[std::size_t(k - 1)];
    long long dk = sys.d[std::size_t(k)];
    for (long long j = 0; j <= dk; ++j) {
      v[std::size_t(b + dk + j)] = double(j) / double(dk);           // 0 -> 1
      v[std::size_t(b + 2 * dk + j)] = double(dk - j) / double(dk);  // 1 -> 0
    }
    v[std::size_t(b + 3 * dk)] = 0.0;
  }
  return Symbol(std::move(v));
}

KernelCoeffs modulated_fejer(const LacunarySystem& sys, int k) {
  if (k < 1 || k > sys.size()) throw std::invalid_argument("modulated_fejer: index out of range");
  long long b = (k == 1) ? 0 : 3 * sys.D[std::size_t(k - 2)];
  long long dk = sys.d[std::size_t(k - 1)];
  if (dk > (1 << 26)) throw std::invalid_argument("modulated_fejer: width too large");
  return modulated_fejer_kernel(int(dk), b + 2 * dk);
}

double stein_constant(const Symbol& mu) {
  double best = 0.0;
  for (double v : mu.values) best = std::max(best, std::abs(v));
  for (std::size_t n = 0; n + 1 < mu.values.size(); ++n) {
    double step = double(n + 1) * std::abs(mu.values[n + 1] - mu.values[n]);
    best = std::max(best, step);
  }
  return best;
}

Rational stein_constant_exact(const LacunarySystem& sys, BlockSymbolKind kind) {
  (void)kind;  // both block symbols share slope geometry and sup 1
  Rational best(1);
  for (int k = 0; k < sys.size(); ++k)
    best = rational_max(best, Rational(3 * sys.D[std::size_t(k)], sys.d[std::size_t(k)]));
  return best;
}

Rational stein_bound(const LacunarySystem& sys) {
  if (!sys.alpha_defined) throw std::invalid_argument("stein_bound: alpha undefined");
  Rational b(3 * (sys.alpha.num + sys.alpha.den), sys.alpha.num);
  return rational_max(Rational(1), b);
}

IdemSet2D::IdemSet2D(std::vector<long long> dv, std::vector<long long> Nv)
    : d(std::move(dv)), N(std::move(Nv)) {
  if (d.size() != N.size()) throw std::invalid_argument("IdemSet2D: length mismatch");
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] <= 0 || N[k] <= 0) throw std::invalid_argument("IdemSet2D: entries must be positive");
    if (k > 0 && d[k] <= d[k - 1])
      throw std::invalid_argument("IdemSet2D: diagonals must be strictly increasing");
  }
}

bool idem_contains(const IdemSet2D& A, long long n1, long long n2) {
  if (n1 < 0 || n2 < 0) return false;
  for (int k = 0; k < A.size(); ++k)
    if (n1 + n2 == A.d[std::size_t(k)] && n1 % A.N[std::size_t(k)] == 0) return true;
  return false;
}

std::vector<LacunarySystem> split_subsequences(const LacunarySystem& sys, int q) {
  if (q < 1) throw std::invalid_argument("split_subsequences: q must be >= 1");
  if (!sys.alpha_defined) throw std::invalid_argument("split_subsequences: alpha undefined");
  std::vector<LacunarySystem> out;
  for (int r = 0; r < q; ++r) {
    std::vector<long long> sub;
    for (std::size_t k = std::size_t(r); k < sys.d.size(); k += std::size_t(q)) sub.push_back(sys.d[k]);
    if (sub.empty()) {
      out.emplace_back();
      continue;
    }
    LacunarySystem s = lacunary_check(sub);
    if (s.alpha_defined) {
      // Each stride-q ratio is a product of q consecutive ratios, so the
      // subsequence alpha is at least (1+alpha)^q - 1. Verified with exact
      // integer cross products: d_next * den^q >= d_cur * (num+den)^q.
      __int128 denq = 1, numq = 1;
      bool overflow = false;
      for (int t = 0; t < q; ++t) {
        denq *= sys.alpha.den;
        numq *= (sys.alpha.num + sys.alpha.den);
        if (denq > (__int128)4e36 || numq > (__int128)4e36) { overflow = true; break; }
      }
      for (std::size_t k = 0; k + 1 < sub.size() && !overflow; ++k) {
        __int128 lhs = (__int128)sub[k + 1] * denq;
        __int128 rhs = (__int128)sub[k] * numq;
        if (lhs < rhs) throw std::logic_error("split_subsequences: alpha lower bound violated");
      }
      if (overflow) {
        double pw = std::pow(1.0 + sys.alpha.to_double(), double(q)) - 1.0;
        if (s.alpha.to_double() < pw * (1.0 - 1e-12))
          throw std::logic_error("split_subsequences: alpha lower bound violated");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string system_symbol_to_json(const LacunarySystem& sys, const Symbol& mu) {
  JsonValue doc = JsonValue::object();
  JsonValue dv = JsonValue::array();
  for (long long x : sys.d) dv.push(JsonValue::of(x));
  doc.set("d", std::move(dv));
  doc.set("alpha", sys.alpha_defined ? JsonValue::of(sys.alpha.str()) : JsonValue::null());
  JsonValue Dv = JsonValue::array();
  for (long long x : sys.D) Dv.push(JsonValue::of(x));
  doc.set("D", std::move(Dv));
  JsonValue mv = JsonValue::array();
  for (int x : sys.m) mv.push(JsonValue::of(x));
  doc.set("m", std::move(mv));
  doc.set("C_alpha_est", JsonValue::of(sys.c_alpha_est));
  JsonValue sv = JsonValue::array();
  for (double x : mu.values) sv.push(JsonValue::of(x));
  doc.set("symbol_values", std::move(sv));
  return doc.str();
}

void system_symbol_from_json(const std::string& text, LacunarySystem& sys, Symbol& mu) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<long long> d = j.at("d").get<std::vector<long long>>();
  double c = j.at("C_alpha_est").get<double>();
  sys = lacunary_check(d, c > 0.0 ? c : 0.0);
  if (!j.at("alpha").is_null()) {
    Rational a = Rational::parse(j.at("alpha").get<std::string>());
    if (!(a == sys.alpha)) throw std::invalid_argument("system_symbol_from_json: alpha mismatch");
  }
  std::vector<long long> D = j.at("D").get<std::vector<long long>>();
  if (D != sys.D) throw std::invalid_argument("system_symbol_from_json: D mismatch");
  std::vector<int> m = j.at("m").get<std::vector<int>>();
  if (!m.empty() && m != sys.m) throw std::invalid_argument("system_symbol_from_json: m mismatch");
  std::vector<double> sv = j.at("symbol_values").get<std::vector<double>>();
  mu = Symbol(std::move(sv));
}

}  // namespace hml
