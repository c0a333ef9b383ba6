#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "check_util.hpp"
#include "hml/verify.hpp"

namespace hml {

using detail::kTwoPi;

// ---------------------------------------------------------------------------
// enl2: L2 bound for the shift-average of a function supported in an interval
// I, ||E*_N f||_2 <= sqrt(|I| + 2/N) ||f||_2, plus the exact equality
// ||E*_N f||_2^2 = ||f||_2^2 / N when I is a single cell of the 1/N grid.
// ---------------------------------------------------------------------------
CheckReport check_enl2(const CheckConfig& cfg) {
  detail::Stopwatch sw;
  CheckReport rep;
  rep.lemma = "enl2";

  const long long instances = cfg.geti("instances", 10000);
  const long long pmax = cfg.geti("pmax", 1024);
  const long long nmax = cfg.geti("nmax", 256);
  const std::uint64_t seed = cfg.seed();
  const int jobs = cfg.jobs();
  cfg.reject_unknown();

  if (instances < 1) throw ConfigError("enl2: instances must be >= 1");
  const int lpmax = detail::log2_exact(pmax, "enl2: pmax");
  const int lnmax = detail::log2_exact(nmax, "enl2: nmax");
  if (lpmax < 4) throw ConfigError("enl2: pmax must be >= 16");

  std::vector<CheckRow> rows((std::size_t)instances);
  parallel_for(jobs, instances, [&](long long i) {
    Rng g(derive_seed(seed, 0xe12, (std::uint64_t)i));
    const int lp = (int)g.uniform_int(4, lpmax);
    const int P = 1 << lp;
    const int le = (int)g.uniform_int(0, std::min(lp, lnmax));
    const int N = 1 << le;
    CheckRow row;

    if (i % 10 == 9) {
      // Equality case: f supported in one cell of the 1/N grid.
      const int blk = P / N;
      const long long k0 = g.uniform_int(0, N - 1);
      StepFunction f = random_step(g, P);
      for (int c = 0; c < P; ++c)
        if (c < k0 * blk || c >= (k0 + 1) * blk) f.values[(std::size_t)c] = cplx(0.0, 0.0);
      const double nf = l2_norm(f);
      const double lhs = l2_norm(shift_average(f, N));
      const double lhs2 = lhs * lhs;
      const double target = nf * nf / double(N);
      row.instance = "P=" + std::to_string(P) + " N=" + std::to_string(N) + " cell=" +
                     std::to_string(k0) + " equality";
      row.lhs = lhs2;
      row.rhs = target;
      if (nf == 0.0) {
        row.skipped = true;
      } else {
        row.ratio = lhs2 / target;
        row.violated = std::abs(lhs2 - target) > 1e-12 * target;
      }
    } else {
      const long long a = g.uniform_int(0, P - 1);
      const long long len = g.uniform_int(1, P - a);
      StepFunction f = random_step(g, P);
      for (int c = 0; c < P; ++c)
        if (c < a || c >= a + len) f.values[(std::size_t)c] = cplx(0.0, 0.0);
      const double nf = l2_norm(f);
      const double lhs = l2_norm(shift_average(f, N));
      const double rhs = std::sqrt(double(len) / double(P) + 2.0 / double(N)) * nf;
      row.instance = "P=" + std::to_string(P) + " N=" + std::to_string(N) + " I=[" +
                     std::to_string(a) + "/" + std::to_string(P) + "," + std::to_string(a + len) +
                     "/" + std::to_string(P) + ")";
      row.lhs = lhs;
      row.rhs = rhs;
      if (nf == 0.0) {
        row.skipped = true;
      } else {
        row.ratio = lhs / rhs;
        row.violated = lhs > rhs * (1.0 + 1e-12);
      }
    }
    rows[(std::size_t)i] = row;
  });

  rep.rows = std::move(rows);
  rep.instances = instances;
  detail::aggregate(rep);
  rep.runtime_ms = sw.ms();
  rep.config_echo = cfg.echo();
  return rep;
}

// ---------------------------------------------------------------------------
// schodkapr: pointwise staircase bound |f - E_N f| <= (1/N) E_N |f'|. The
// right side is integrated per cell by midpoint quadrature with an explicit
// Lipschitz slack, so a reported violation is a real one.
// ---------------------------------------------------------------------------
CheckReport check_schodkapr(const CheckConfig& cfg) {
  detail::Stopwatch sw;
  CheckReport rep;
  rep.lemma = "schodkapr";

  const long long instances = cfg.geti("instances", 300);
  const long long degmax = cfg.geti("degmax", 32);
  const long long nmin = cfg.geti("nmin", 4);
  const long long nmax = cfg.geti("nmax", 256);
  const long long nodes = cfg.geti("nodes", 16384);
  const long long cellq = cfg.geti("cellq", 64);
  const std::uint64_t seed = cfg.seed();
  const int jobs = cfg.jobs();
  cfg.reject_unknown();

  if (instances < 1) throw ConfigError("schodkapr: instances must be >= 1");
  if (degmax < 0 || degmax > 4096) throw ConfigError("schodkapr: degmax out of range");
  if (nmin < 1 || nmin > nmax) throw ConfigError("schodkapr: need 1 <= nmin <= nmax");
  if (cellq < 4) throw ConfigError("schodkapr: cellq must be >= 4");
  detail::log2_exact(nodes, "schodkapr: nodes");
  const int G = (int)nodes;
  if (G < 4 * (degmax + 1))
    throw ConfigError("schodkapr: nodes must be >= 4*(degmax+1)");

  QuadratureGrid grid;
  grid.size = G;

  std::vector<CheckRow> rows((std::size_t)instances);
  parallel_for(jobs, instances, [&](long long i) {
    Rng g(derive_seed(seed, 0x5c0d, (std::uint64_t)i));
    const int deg = (int)g.uniform_int(0, degmax);
    const int N = (int)g.uniform_int(nmin, nmax);
    AnalyticPoly f = random_poly(g, deg);
    AnalyticPoly fp = derivative(f);

    StepFunction fs = sample(f, grid);
    StepFunction Ef = grid_expectation(f, N);

    // Midpoint means of |f'| per 1/N cell; track the sampled sup of |f'|.
    const int Q = (int)cellq;
    std::vector<double> cell((std::size_t)N, 0.0);
    double fpmax = 0.0;
    for (int k = 0; k < N; ++k) {
      double acc = 0.0;
      for (int q = 0; q < Q; ++q) {
        const double t = (double(k) + (double(q) + 0.5) / double(Q)) / double(N);
        const double v = std::abs(eval(fp, t));
        acc += v;
        if (v > fpmax) fpmax = v;
      }
      cell[(std::size_t)k] = acc / double(Q);
    }
    // Lip(|f'|) <= sup|f''| <= 2 pi deg sup|f'|; midpoint means of an
    // L-Lipschitz function are within L/(2NQ) of the true cell means.
    const double lip = kTwoPi * double(deg) * (2.0 * fpmax);
    const double slack = (1.0 / double(N)) * lip / (2.0 * double(N) * double(Q));

    double fmax = 0.0;
    for (const cplx& v : fs.values) fmax = std::max(fmax, std::abs(v));
    const double fptol = slack + 1e-11 * (1.0 + fpmax) / double(N) + 1e-12 * (1.0 + fmax);

    double worst_margin = -1e300;
    double worst_lhs = 0.0, worst_rhs = 0.0;
    for (int t = 0; t < G; ++t) {
      const double tt = double(t) / double(G);
      const int k = std::min(N - 1, (int)(tt * N));
      const double lhs = std::abs(fs.values[(std::size_t)t] - Ef.values[(std::size_t)k]);
      const double rhs = cell[(std::size_t)k] / double(N) + fptol;
      if (lhs - rhs > worst_margin) {
        worst_margin = lhs - rhs;
        worst_lhs = lhs;
        worst_rhs = rhs;
      }
    }

    CheckRow row;
    row.instance = "deg=" + std::to_string(deg) + " N=" + std::to_string(N);
    row.lhs = worst_lhs;
    row.rhs = worst_rhs;
    row.ratio = worst_rhs > 0.0 ? worst_lhs / worst_rhs : 0.0;
    row.violated = worst_margin > 0.0;
    rows[(std::size_t)i] = row;
  });

  rep.rows = std::move(rows);
  rep.instances = instances;
  detail::aggregate(rep);
  rep.runtime_ms = sw.ms();
  rep.config_echo = cfg.echo();
  return rep;
}

// ---------------------------------------------------------------------------
// fejer-identity: (1/d) f' equals 2 pi i (f * K_d) for the width-d kernel
// centered at d, checked coefficientwise against the direct formula
// 2 pi i (j/d) f_j and through the L1 norms of both routes.
// ---------------------------------------------------------------------------
CheckReport check_fejer_identity(const CheckConfig& cfg) {
  detail::Stopwatch sw;
  CheckReport rep;
  rep.lemma = "fejer-identity";

  const long long instances = cfg.geti("instances", 1000);
  const long long degmax = cfg.geti("degmax", 128);
  const std::uint64_t seed = cfg.seed();
  const int jobs = cfg.jobs();
  cfg.reject_unknown();

  if (instances < 1) throw ConfigError("fejer-identity: instances must be >= 1");
  if (degmax < 1 || degmax > 1 << 14) throw ConfigError("fejer-identity: degmax out of range");

  std::vector<CheckRow> rows((std::size_t)(2 * instances));
  parallel_for(jobs, instances, [&](long long i) {
    Rng g(derive_seed(seed, 0xfe3e, (std::uint64_t)i));
    const int d = (int)g.uniform_int(1, degmax);
    AnalyticPoly f = random_poly(g, d);

    AnalyticPoly r1 = detail::scale_poly(derivative(f), cplx(1.0 / double(d), 0.0));
    KernelCoeffs ker = modulated_fejer_kernel(d, d);
    AnalyticPoly r2 = detail::scale_poly(convolve(f, ker), cplx(0.0, kTwoPi));

    double worst = 0.0;  // max over j of deviation / tolerance
    double worst_dev = 0.0, worst_tol = 0.0;
    for (int j = 0; j <= d; ++j) {
      const cplx fj = f.coeffs[(std::size_t)j];
      const cplx direct = fj * cplx(0.0, kTwoPi * double(j) / double(d));
      const double tol = 1e-12 * (1.0 + kTwoPi * std::abs(fj));
      const double dev = std::max(std::abs(r1.coeffs[(std::size_t)j] - r2.coeffs[(std::size_t)j]),
                                  std::max(std::abs(r1.coeffs[(std::size_t)j] - direct),
                                           std::abs(r2.coeffs[(std::size_t)j] - direct)));
      if (dev / tol > worst) {
        worst = dev / tol;
        worst_dev = dev;
        worst_tol = tol;
      }
    }
    CheckRow row;
    row.instance = "d=" + std::to_string(d) + " coeffs";
    row.lhs = worst_dev;
    row.rhs = worst_tol;
    row.ratio = worst;
    row.violated = worst > 1.0;
    rows[(std::size_t)(2 * i)] = row;

    QuadratureGrid grid = make_grid(d);
    L1Result a = l1_norm(r1, grid);
    L1Result b = l1_norm(r2, grid);
    CheckRow nrow;
    nrow.instance = "d=" + std::to_string(d) + " l1";
    nrow.lhs = std::abs(a.value - b.value);
    nrow.rhs = 1e-10 * (1.0 + a.value);
    nrow.ratio = nrow.lhs / nrow.rhs;
    nrow.violated = nrow.lhs > nrow.rhs;
    rows[(std::size_t)(2 * i + 1)] = nrow;
  });

  rep.rows = std::move(rows);
  rep.instances = instances;
  detail::aggregate(rep);
  rep.runtime_ms = sw.ms();
  rep.config_echo = cfg.echo();
  return rep;
}

}  // namespace hml
