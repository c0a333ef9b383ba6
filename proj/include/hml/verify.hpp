#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hml/indnorm.hpp"
#include "hml/jsonout.hpp"
#include "hml/martingale.hpp"
#include "hml/operators.hpp"
#include "hml/rng.hpp"
#include "hml/symbols.hpp"

namespace hml {

// Usage / configuration problems. Maps to exit code 2 in the CLI, as opposed
// to exit code 1 for a mathematical violation found by a check.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// String key/value configuration with typed accessors. Every accessor call
// records the key; reject_unknown() then flags keys no check ever read, so a
// typo in --set fails loudly instead of silently running defaults. The
// accessors also record the effective (post-default) value, which becomes the
// config_echo of the report.
class CheckConfig {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  void set_seed(std::uint64_t s) {
    seed_ = s;
    have_seed_ = true;
  }
  bool have_seed() const { return have_seed_; }
  std::uint64_t seed() const;  // throws ConfigError when unset

  void set_jobs(int j) { jobs_ = j < 1 ? 1 : j; }
  int jobs() const { return jobs_; }

  long long geti(const std::string& key, long long def) const;
  double getd(const std::string& key, double def) const;
  std::string gets(const std::string& key, const std::string& def) const;
  std::vector<long long> getil(const std::string& key, const std::vector<long long>& def) const;
  std::vector<double> getdl(const std::string& key, const std::vector<double>& def) const;

  void reject_unknown() const;  // call after all reads

  // Effective configuration (defaults filled in) for the report echo; the
  // seed is included, the jobs count deliberately is not, because it must not
  // influence any reported byte.
  std::vector<std::pair<std::string, std::string>> echo() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> read_;
  mutable std::map<std::string, std::string> effective_;
  std::uint64_t seed_ = 0;
  bool have_seed_ = false;
  int jobs_ = 1;
};

struct CheckRow {
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool skipped = false;
  bool violated = false;  // tracked for aggregation; not a CSV column
};

struct CheckReport {
  std::string lemma;
  long long instances = 0;
  long long violations = 0;
  double worst_ratio = 0.0;
  bool has_estimate = false;
  double estimated_constant = 0.0;
  JsonValue witness;  // Null when no witness applies
  std::int64_t runtime_ms = 0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<CheckRow> rows;

  bool passed() const { return violations == 0; }
  std::string to_json() const;
  std::string to_csv() const;
};

// Runs body(0..count-1) on up to `jobs` threads. Each index owns its output
// slot, and any aggregation happens after the join, so the result is
// identical for every jobs value.
void parallel_for(int jobs, long long count, const std::function<void(long long)>& body);

// Norm-ratio maximization: multi-start random initialization followed by
// random-coordinate perturbation ascent (try +delta, then -delta, shrink the
// step after repeated rejections). ratio() returning a negative value marks a
// degenerate point (zero denominator) and is never accepted.
struct SearchProblem {
  std::function<std::vector<double>(Rng&)> init;
  std::function<double(const std::vector<double>&)> ratio;
};
struct SearchOptions {
  int starts = 4;
  int iters = 120;
  double step = 0.5;
  std::uint64_t seed = 0;
};
struct SearchOutcome {
  double best = -1.0;
  std::vector<double> arg;
  long long evals = 0;
};
SearchOutcome maximize_ratio(const SearchProblem& prob, const SearchOptions& opt);

// Generators for randomized instances.
AnalyticPoly random_poly(Rng& g, int degree);
StepFunction random_step(Rng& g, int pieces);
// Values on the lattice Z/2^20: block sums over <= 2^10 cells stay exact,
// which the idempotence and equality-case assertions rely on.
StepFunction random_step_lattice(Rng& g, int pieces);
DyadicFunction random_dyadic(Rng& g, int depth);
// Dyadic-exact atom on the level/index cell: integer values recentred to an
// exactly zero sum, scaled by a power of two so every conditional mean below
// the support level vanishes identically. ||a||_2 lands in (cap/2, cap].
Atom random_atom(Rng& g, int depth, int level, long long index);

CheckReport check_enl2(const CheckConfig& cfg);
CheckReport check_schodkapr(const CheckConfig& cfg);
CheckReport check_fejer_identity(const CheckConfig& cfg);
CheckReport check_stein(const CheckConfig& cfg);
CheckReport check_khintchine(const CheckConfig& cfg);
CheckReport check_discretization(const CheckConfig& cfg);
CheckReport check_dyadicrbdd(const CheckConfig& cfg);
CheckReport check_oldrev(const CheckConfig& cfg);
CheckReport check_2d_multiplier(const CheckConfig& cfg);

CheckReport estimate_c_alpha(const CheckConfig& cfg);
CheckReport estimate_stein(const CheckConfig& cfg);
CheckReport estimate_oldrev(const CheckConfig& cfg);
CheckReport estimate_2d(const CheckConfig& cfg);

// id in {enl2, schodkapr, fejer-identity, stein, khintchine, discretization,
// dyadicrbdd, oldrev, 2d}; unknown ids raise ConfigError.
CheckReport run_check(const std::string& id, const CheckConfig& cfg);
// target in {c-alpha, stein, oldrev, 2d}.
CheckReport run_estimate(const std::string& target, const CheckConfig& cfg);

}  // namespace hml
