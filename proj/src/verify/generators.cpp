#include "hml/verify.hpp"

#include <cmath>

namespace hml {

AnalyticPoly random_poly(Rng& g, int degree) {
  std::vector<cplx> c(std::size_t(degree) + 1, cplx(0.0, 0.0));
  for (cplx& v : c) {
    double re = g.gaussian();
    double im = g.gaussian();
    v = cplx(re, im);
  }
  return AnalyticPoly(std::move(c));
}

StepFunction random_step(Rng& g, int pieces) {
  std::vector<cplx> v(std::size_t(pieces), cplx(0.0, 0.0));
  for (cplx& x : v) {
    double re = g.gaussian();
    double im = g.gaussian();
    x = cplx(re, im);
  }
  return StepFunction(std::move(v));
}

StepFunction random_step_lattice(Rng& g, int pieces) {
  std::vector<cplx> v(std::size_t(pieces), cplx(0.0, 0.0));
  for (cplx& x : v) {
    double re = double(g.uniform_int(-(1 << 20), 1 << 20)) * 0x1.0p-20;
    double im = double(g.uniform_int(-(1 << 20), 1 << 20)) * 0x1.0p-20;
    x = cplx(re, im);
  }
  return StepFunction(std::move(v));
}

DyadicFunction random_dyadic(Rng& g, int depth) {
  std::vector<cplx> v(std::size_t(1) << depth, cplx(0.0, 0.0));
  for (cplx& x : v) {
    double re = g.gaussian();
    double im = g.gaussian();
    x = cplx(re, im);
  }
  return DyadicFunction(depth, std::move(v));
}

Atom random_atom(Rng& g, int depth, int level, long long index) {
  if (level < 0 || level > depth) throw std::invalid_argument("random_atom: bad level");
  long long cells = 1LL << depth;
  long long span = 1LL << (depth - level);
  long long start = index * span;
  if (start < 0 || start + span > cells) throw std::invalid_argument("random_atom: bad index");
  // Integer profile with an exactly zero sum: z_i -> z_i * span - sum(z).
  std::vector<long long> z(std::size_t(span), 0);
  long long zsum = 0;
  for (long long& zi : z) {
    zi = g.uniform_int(-(1 << 16), 1 << 16);
    zsum += zi;
  }
  for (long long& zi : z) zi = zi * span - zsum;
  bool all_zero = true;
  for (long long zi : z)
    if (zi != 0) all_zero = false;
  if (all_zero && span >= 2) {
    z[0] = 1;
    z[1] = -1;
    for (std::size_t i = 2; i < z.size(); ++i) z[i] = 0;
    all_zero = false;
  }
  // Power-of-two scale c with ||a||_2 <= |I|^{-1/2}. Scaling by 2^e keeps
  // every value exact, so all conditional means over the support still cancel
  // to exactly zero.
  double cap = std::sqrt(double(1LL << level));
  double norm2 = 0.0;
  for (long long zi : z) norm2 += double(zi) * double(zi);
  double znorm = std::sqrt(norm2 / double(cells));  // L2 over [0,1] of the raw profile
  double c = 0.0;
  if (!all_zero) {
    int e = 0;
    std::frexp(cap / znorm, &e);
    c = std::ldexp(1.0, e - 1);  // largest power of two <= cap/znorm
  }
  std::vector<cplx> vals(std::size_t(cells), cplx(0.0, 0.0));
  for (long long i = 0; i < span; ++i)
    vals[std::size_t(start + i)] = cplx(c * double(z[std::size_t(i)]), 0.0);
  Atom a;
  a.interval = DyadicInterval{level, index};
  a.values = DyadicFunction(depth, std::move(vals));
  return a;
}

}  // namespace hml
