#include "hml/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "hml/jsonout.hpp"

namespace hml {

cplx mean(const DyadicFunction& f) {
  cplx acc(0.0, 0.0);
  for (const cplx& v : f.values) acc += v;
  return acc / double(f.cells());
}

DyadicFunction dyadic_expectation(const DyadicFunction& f, int n) {
  if (n < 0 || n > f.depth) throw std::invalid_argument("dyadic_expectation: level out of range");
  long long cells = f.cells();
  long long blk = 1LL << (f.depth - n);
  std::vector<cplx> v(std::size_t(cells), cplx(0.0, 0.0));
  for (long long b = 0; b < cells; b += blk) {
    cplx acc(0.0, 0.0);
    for (long long i = 0; i < blk; ++i) acc += f.values[std::size_t(b + i)];
    acc /= double(blk);
    for (long long i = 0; i < blk; ++i) v[std::size_t(b + i)] = acc;
  }
  return DyadicFunction(f.depth, std::move(v));
}

DyadicFunction martingale_difference(const DyadicFunction& f, int k) {
  if (k < 1 || k > f.depth)
    throw std::invalid_argument("martingale_difference: level out of range");
  DyadicFunction hi = dyadic_expectation(f, k);
  DyadicFunction lo = dyadic_expectation(f, k - 1);
  std::vector<cplx> v(hi.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = hi.values[i] - lo.values[i];
  return DyadicFunction(f.depth, std::move(v));
}

std::vector<double> square_function(const DyadicFunction& f) {
  std::vector<double> sq(std::size_t(f.cells()), 0.0);
  for (int k = 1; k <= f.depth; ++k) {
    DyadicFunction d = martingale_difference(f, k);
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += std::norm(d.values[i]);
  }
  for (double& v : sq) v = std::sqrt(v);
  return sq;
}

double h1_delta_norm(const DyadicFunction& f) {
  std::vector<double> sq = square_function(f);
  double acc = 0.0;
  for (double v : sq) acc += v;
  return acc / double(f.cells());
}

DyadicFunction rademacher(int j, int depth) {
  if (j < 1 || j > depth) throw std::invalid_argument("rademacher: level out of range");
  long long cells = 1LL << depth;
  std::vector<cplx> v(std::size_t(cells), cplx(0.0, 0.0));
  for (long long i = 0; i < cells; ++i) {
    long long anc = i >> (depth - j);  // level-j cell containing i
    v[std::size_t(i)] = (anc % 2 == 0) ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
  }
  return DyadicFunction(depth, std::move(v));
}

namespace {

bool measurable_at(const DyadicFunction& f, int level) {
  long long blk = 1LL << (f.depth - level);
  for (long long b = 0; b < f.cells(); b += blk) {
    cplx v0 = f.values[std::size_t(b)];
    for (long long i = 1; i < blk; ++i) {
      cplx d = f.values[std::size_t(b + i)] - v0;
      if (std::abs(d) > 1e-12 * (1.0 + std::abs(v0))) return false;
    }
  }
  return true;
}

}  // namespace

DyadicFunction rademacher_embed(const std::vector<DyadicFunction>& fk,
                                const std::vector<int>& m, int depth) {
  if (fk.size() != m.size()) throw std::invalid_argument("rademacher_embed: length mismatch");
  std::vector<cplx> v(std::size_t(1LL << depth), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < fk.size(); ++k) {
    if (k > 0 && m[k] <= m[k - 1])
      throw std::invalid_argument("rademacher_embed: levels must be strictly increasing");
    if (m[k] < 0 || m[k] + 1 > depth)
      throw std::invalid_argument("rademacher_embed: level out of range for depth");
    if (fk[k].depth != depth) throw std::invalid_argument("rademacher_embed: depth mismatch");
    if (!measurable_at(fk[k], m[k]))
      throw std::invalid_argument("rademacher_embed: member not measurable at its level");
    DyadicFunction r = rademacher(m[k] + 1, depth);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += r.values[i] * fk[k].values[i];
  }
  return DyadicFunction(depth, std::move(v));
}

bool is_atom(const Atom& a, double tol) {
  const DyadicFunction& f = a.values;
  if (a.interval.level < 0 || a.interval.level > f.depth) return false;
  long long nI = 1LL << a.interval.level;
  if (a.interval.index < 0 || a.interval.index >= nI) return false;
  long long blk = 1LL << (f.depth - a.interval.level);
  long long lo = a.interval.index * blk, hi = lo + blk;
  cplx m(0.0, 0.0);
  double sum2 = 0.0;
  for (long long i = 0; i < f.cells(); ++i) {
    cplx v = f.values[std::size_t(i)];
    if (i < lo || i >= hi) {
      if (std::abs(v) > tol) return false;  // support
    }
    m += v;
    sum2 += std::norm(v);
  }
  m /= double(f.cells());
  if (std::abs(m) > tol) return false;
  double l2 = std::sqrt(sum2 / double(f.cells()));
  double cap = 1.0 / std::sqrt(a.interval.measure());
  return l2 <= cap * (1.0 + tol);
}

namespace {

// Emits the maximal dyadic cells of {mask true}: cells entirely inside whose
// parent is not entirely inside.
void maximal_cells(const std::vector<char>& mask, int depth, int level, long long index,
                   std::vector<DyadicInterval>& out) {
  long long blk = 1LL << (depth - level);
  long long lo = index * blk;
  bool all = true, any = false;
  for (long long i = lo; i < lo + blk; ++i) {
    if (mask[std::size_t(i)]) any = true; else all = false;
  }
  if (all) {
    out.push_back(DyadicInterval{level, index});
    return;
  }
  if (!any || level == depth) return;
  maximal_cells(mask, depth, level + 1, 2 * index, out);
  maximal_cells(mask, depth, level + 1, 2 * index + 1, out);
}

}  // namespace

AtomicDecomposition atomic_decompose(const DyadicFunction& f) {
  AtomicDecomposition dec;
  dec.residual_mean = mean(f);
  const int L = f.depth;
  const long long cells = f.cells();

  // Difference sequence and running square function per cell and level.
  std::vector<std::vector<cplx>> diff(std::size_t(L) + 1);
  for (int k = 1; k <= L; ++k) diff[std::size_t(k)] = martingale_difference(f, k).values;
  // cum[n][i] = S_n(i)^2.
  std::vector<std::vector<double>> cum(std::size_t(L) + 1,
                                       std::vector<double>(std::size_t(cells), 0.0));
  for (int n = 1; n <= L; ++n)
    for (long long i = 0; i < cells; ++i)
      cum[std::size_t(n)][std::size_t(i)] =
          cum[std::size_t(n - 1)][std::size_t(i)] + std::norm(diff[std::size_t(n)][std::size_t(i)]);

  double smax = 0.0, smin_pos = 0.0;
  for (long long i = 0; i < cells; ++i) {
    double s = std::sqrt(cum[std::size_t(L)][std::size_t(i)]);
    if (s > 0.0) {
      smax = std::max(smax, s);
      smin_pos = (smin_pos == 0.0) ? s : std::min(smin_pos, s);
    }
  }
  if (smax == 0.0) return dec;  // constant input

  // Threshold ladder {0, 2^jlo, ..., 2^jhi} with 2^jlo <= smin_pos and
  // 2^jhi >= smax.
  int jlo = int(std::floor(std::log2(smin_pos)));
  while (std::ldexp(1.0, jlo) > smin_pos) --jlo;
  int jhi = int(std::ceil(std::log2(smax)));
  while (std::ldexp(1.0, jhi) < smax) ++jhi;
  std::vector<double> ladder;
  ladder.push_back(0.0);
  for (int j = jlo; j <= jhi; ++j) ladder.push_back(std::ldexp(1.0, j));

  // Stopping time per threshold: first n with S_n > lambda (L+1 = never).
  auto stop_time = [&](double lam, std::vector<int>& tau) {
    tau.assign(std::size_t(cells), L + 1);
    for (long long i = 0; i < cells; ++i)
      for (int n = 1; n <= L; ++n)
        if (cum[std::size_t(n)][std::size_t(i)] > lam * lam) { tau[std::size_t(i)] = n; break; }
  };

  // tau_prev starts as the constant time 0, so the first piece collects the
  // increments up to the first positivity of S. The top ladder entry is at
  // least smax, so its stopping time never fires and the pieces telescope to
  // f - Ef exactly.
  std::vector<int> tau_prev(std::size_t(cells), 0), tau_next;
  const double skip_cut = 1e-15 * smax;

  for (std::size_t t = 0; t < ladder.size(); ++t) {
    stop_time(ladder[t], tau_next);
    std::vector<cplx> piece(std::size_t(cells), cplx(0.0, 0.0));
    bool nonzero = false;
    for (long long i = 0; i < cells; ++i) {
      int a = tau_prev[std::size_t(i)], b = tau_next[std::size_t(i)];
      cplx acc(0.0, 0.0);
      for (int n = a + 1; n <= std::min(b, L); ++n) acc += diff[std::size_t(n)][std::size_t(i)];
      piece[std::size_t(i)] = acc;
      if (std::abs(acc) > 0.0) nonzero = true;
    }
    if (nonzero) {
      // The piece lives where its left stopping time fires: {S_L > 0} for the
      // two bottom windows, {S_L > ladder[t-1]} above; it splits into
      // mean-zero chunks over the maximal dyadic cells of that region.
      double lam = (t == 0) ? 0.0 : ladder[t - 1];
      std::vector<char> mask(std::size_t(cells), 0);
      for (long long i = 0; i < cells; ++i)
        mask[std::size_t(i)] = cum[std::size_t(L)][std::size_t(i)] > lam * lam;
      std::vector<DyadicInterval> cellsI;
      maximal_cells(mask, L, 0, 0, cellsI);
      for (const DyadicInterval& I : cellsI) {
        long long blk = 1LL << (L - I.level);
        long long lo = I.index * blk;
        double sum2 = 0.0;
        cplx psum(0.0, 0.0);
        for (long long i = lo; i < lo + blk; ++i) {
          sum2 += std::norm(piece[std::size_t(i)]);
          psum += piece[std::size_t(i)];
        }
        double l2 = std::sqrt(sum2 / double(cells));
        double c = l2 * std::sqrt(I.measure());
        if (c <= skip_cut) continue;
        // Mean zero holds exactly in the construction; remove summation dust
        // before normalizing so tiny pieces stay valid atoms.
        cplx dust = psum / double(blk);
        std::vector<cplx> av(std::size_t(cells), cplx(0.0, 0.0));
        double sum2c = 0.0;
        for (long long i = lo; i < lo + blk; ++i) {
          cplx v = piece[std::size_t(i)] - dust;
          av[std::size_t(i)] = v;
          sum2c += std::norm(v);
        }
        double l2c = std::sqrt(sum2c / double(cells));
        if (l2c == 0.0) continue;
        double cc = l2c * std::sqrt(I.measure());
        for (cplx& v : av) v /= cc;
        dec.coeffs.push_back(cplx(cc, 0.0));
        dec.atoms.push_back(Atom{I, DyadicFunction(L, std::move(av))});
      }
    }
    std::swap(tau_prev, tau_next);
  }
  return dec;
}

StepFunction to_step(const DyadicFunction& f) { return StepFunction(f.values); }

std::string dyadic_to_json(const DyadicFunction& f) {
  JsonValue doc = JsonValue::object();
  doc.set("depth", JsonValue::of(f.depth));
  JsonValue vals = JsonValue::array();
  for (const cplx& v : f.values) {
    JsonValue pair = JsonValue::array();
    pair.push(JsonValue::of(v.real()));
    pair.push(JsonValue::of(v.imag()));
    vals.push(std::move(pair));
  }
  doc.set("values", std::move(vals));
  return doc.str();
}

DyadicFunction dyadic_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  int depth = j.at("depth").get<int>();
  std::vector<cplx> v;
  for (const auto& p : j.at("values")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  return DyadicFunction(depth, std::move(v));
}

std::string decomposition_to_json(const AtomicDecomposition& dec) {
  JsonValue doc = JsonValue::object();
  JsonValue cv = JsonValue::array();
  for (const cplx& c : dec.coeffs) {
    JsonValue pair = JsonValue::array();
    pair.push(JsonValue::of(c.real()));
    pair.push(JsonValue::of(c.imag()));
    cv.push(std::move(pair));
  }
  doc.set("coeffs", std::move(cv));
  JsonValue av = JsonValue::array();
  for (const Atom& a : dec.atoms) {
    JsonValue obj = JsonValue::object();
    JsonValue iv = JsonValue::object();
    iv.set("m", JsonValue::of(a.interval.level));
    iv.set("i", JsonValue::of(a.interval.index));
    obj.set("interval", std::move(iv));
    obj.set("depth", JsonValue::of(a.values.depth));
    JsonValue vals = JsonValue::array();
    for (const cplx& v : a.values.values) {
      JsonValue pair = JsonValue::array();
      pair.push(JsonValue::of(v.real()));
      pair.push(JsonValue::of(v.imag()));
      vals.push(std::move(pair));
    }
    obj.set("values", std::move(vals));
    av.push(std::move(obj));
  }
  doc.set("atoms", std::move(av));
  JsonValue rm = JsonValue::array();
  rm.push(JsonValue::of(dec.residual_mean.real()));
  rm.push(JsonValue::of(dec.residual_mean.imag()));
  doc.set("residual_mean", std::move(rm));
  return doc.str();
}

AtomicDecomposition decomposition_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  AtomicDecomposition dec;
  for (const auto& p : j.at("coeffs")) dec.coeffs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  for (const auto& a : j.at("atoms")) {
    Atom atom;
    atom.interval.level = a.at("interval").at("m").get<int>();
    atom.interval.index = a.at("interval").at("i").get<long long>();
    int depth = a.at("depth").get<int>();
    std::vector<cplx> v;
    for (const auto& p : a.at("values")) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    atom.values = DyadicFunction(depth, std::move(v));
    dec.atoms.push_back(std::move(atom));
  }
  dec.residual_mean = cplx(j.at("residual_mean").at(0).get<double>(),
                           j.at("residual_mean").at(1).get<double>());
  return dec;
}

}  // namespace hml
