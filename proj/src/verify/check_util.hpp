#pragma once
#include <chrono>
#include <cmath>
#include <string>

#include "hml/verify.hpp"

namespace hml {
namespace detail {

inline constexpr double kTwoPi = 6.28318530717958647692;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
  }
};

inline int pow2_at_least(long long x) {
  int m = 1;
  while ((long long)m < x) m <<= 1;
  return m;
}

inline int log2_exact(long long x, const char* what) {
  if (x < 1 || (x & (x - 1)) != 0) throw ConfigError(std::string(what) + " must be a power of two");
  int e = 0;
  while ((1LL << e) < x) ++e;
  return e;
}

inline JsonValue row_json(const CheckRow& r) {
  JsonValue j = JsonValue::object();
  j.set("instance", JsonValue::of(r.instance));
  j.set("lhs", JsonValue::of(r.lhs));
  j.set("rhs", JsonValue::of(r.rhs));
  j.set("ratio", JsonValue::of(r.ratio));
  return j;
}

// Fills violations / worst_ratio / default witness from the rows. Scans in
// index order with strict comparisons, so the outcome is independent of how
// the rows were produced. The witness is the worst violated row when there is
// one, otherwise the worst-ratio row.
inline void aggregate(CheckReport& rep) {
  rep.violations = 0;
  rep.worst_ratio = 0.0;
  long long worst_i = -1, worst_viol_i = -1;
  double worst_viol = -1.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const CheckRow& r = rep.rows[i];
    if (r.skipped) continue;
    if (r.violated) {
      ++rep.violations;
      if (r.ratio > worst_viol) {
        worst_viol = r.ratio;
        worst_viol_i = (long long)i;
      }
    }
    if (worst_i < 0 || r.ratio > rep.worst_ratio) {
      rep.worst_ratio = r.ratio;
      worst_i = (long long)i;
    }
  }
  long long w = worst_viol_i >= 0 ? worst_viol_i : worst_i;
  if (w >= 0) rep.witness = row_json(rep.rows[std::size_t(w)]);
  if (rep.instances == 0) rep.instances = (long long)rep.rows.size();
}

inline AnalyticPoly scale_poly(const AnalyticPoly& f, cplx c) {
  std::vector<cplx> v = f.coeffs;
  for (cplx& x : v) x *= c;
  return AnalyticPoly(std::move(v));
}

inline std::string fmt_g(double v) { return JsonValue::fmt_double(v); }

}  // namespace detail
}  // namespace hml
