#include "hml/verify.hpp"

#include <cmath>

namespace hml {

SearchOutcome maximize_ratio(const SearchProblem& prob, const SearchOptions& opt) {
  SearchOutcome out;
  for (int s0 = 0; s0 < opt.starts; ++s0) {
    Rng g(derive_seed(opt.seed, 0x5ea0, std::uint64_t(s0)));
    std::vector<double> x = prob.init(g);
    if (x.empty()) throw std::runtime_error("ratio search: empty parameter vector");
    double cur = prob.ratio(x);
    ++out.evals;
    if (cur > out.best) {
      out.best = cur;
      out.arg = x;
    }
    double step = opt.step;
    int rejected = 0;
    for (int it = 0; it < opt.iters; ++it) {
      std::size_t i = std::size_t(g.uniform_int(0, (long long)x.size() - 1));
      double delta = step * (1.0 + std::abs(x[i])) * double(g.sign());
      double keep = x[i];
      bool accepted = false;
      for (int dir = 0; dir < 2 && !accepted; ++dir, delta = -delta) {
        x[i] = keep + delta;
        double v = prob.ratio(x);
        ++out.evals;
        if (v > cur) {
          cur = v;
          accepted = true;
          if (cur > out.best) {
            out.best = cur;
            out.arg = x;
          }
        }
      }
      if (!accepted) {
        x[i] = keep;
        if (++rejected >= 8) {
          step *= 0.6;
          rejected = 0;
        }
      } else {
        rejected = 0;
      }
    }
  }
  if (!(out.best >= 0.0)) throw std::runtime_error("ratio search: all starts degenerate");
  return out;
}

}  // namespace hml
