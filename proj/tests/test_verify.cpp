#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "hml/verify.hpp"
#include "json.hpp"

using namespace hml;

namespace {

// The runtime field is wall-clock and may differ between identical runs; zero
// it before comparing whole reports.
std::string zero_runtime(std::string text) {
  const std::string key = "\"runtime_ms\":";
  std::size_t pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  std::size_t beg = pos + key.size();
  std::size_t end = beg;
  while (end < text.size() && (std::isdigit((unsigned char)text[end]) || text[end] == '-')) ++end;
  return text.substr(0, beg) + "0" + text.substr(end);
}

}  // namespace

TEST_CASE("config accessors parse and record") {
  CheckConfig cfg;
  cfg.set("count", "42");
  cfg.set("scale", "2.5");
  cfg.set("name", "abc");
  cfg.set("list", "2,4,8");
  cfg.set("dlist", "0.1,0.25");
  CHECK(cfg.geti("count", 0) == 42);
  CHECK(cfg.getd("scale", 0.0) == 2.5);
  CHECK(cfg.gets("name", "") == "abc");
  CHECK(cfg.getil("list", {}) == std::vector<long long>{2, 4, 8});
  CHECK(cfg.getdl("dlist", {}) == std::vector<double>{0.1, 0.25});
  CHECK(cfg.geti("missing", 7) == 7);
  CHECK_NOTHROW(cfg.reject_unknown());
}

TEST_CASE("config failure modes") {
  CheckConfig bad;
  bad.set("count", "4x");
  CHECK_THROWS_AS(bad.geti("count", 0), ConfigError);

  CheckConfig badd;
  badd.set("scale", "q");
  CHECK_THROWS_AS(badd.getd("scale", 0.0), ConfigError);

  CheckConfig unread;
  unread.set("tyop", "1");
  CHECK_THROWS_AS(unread.reject_unknown(), ConfigError);

  CheckConfig noseed;
  CHECK_THROWS_AS(noseed.seed(), ConfigError);
  CHECK_FALSE(noseed.have_seed());
}

TEST_CASE("config echo reports effective values, seed in, jobs out") {
  CheckConfig cfg;
  cfg.set_seed(123);
  cfg.set_jobs(8);
  cfg.set("instances", "50");
  (void)cfg.geti("instances", 10);
  (void)cfg.geti("depth", 6);  // default should be echoed too
  auto echo = cfg.echo();
  bool sawInstances = false, sawDepth = false, sawSeed = false, sawJobs = false;
  for (const auto& [k, v] : echo) {
    if (k == "instances") {
      sawInstances = true;
      CHECK(v == "50");
    }
    if (k == "depth") {
      sawDepth = true;
      CHECK(v == "6");
    }
    if (k == "seed") {
      sawSeed = true;
      CHECK(v == "123");
    }
    if (k == "jobs") sawJobs = true;
  }
  CHECK(sawInstances);
  CHECK(sawDepth);
  CHECK(sawSeed);
  CHECK_FALSE(sawJobs);
}

TEST_CASE("parallel_for output does not depend on the thread count") {
  const long long n = 1000;
  std::vector<double> a((std::size_t)n), b((std::size_t)n);
  auto fill = [](std::vector<double>& dst) {
    return [&dst](long long i) {
      Rng g(derive_seed(7, 1, (std::uint64_t)i));
      dst[(std::size_t)i] = g.gaussian();
    };
  };
  parallel_for(1, n, fill(a));
  parallel_for(4, n, fill(b));
  CHECK(a == b);

  std::atomic<long long> hits{0};
  parallel_for(3, 257, [&](long long) { hits.fetch_add(1); });
  CHECK(hits.load() == 257);
}

TEST_CASE("ratio search finds a planted maximum deterministically") {
  SearchProblem prob;
  prob.init = [](Rng& g) { return std::vector<double>{g.uniform(-10.0, 10.0)}; };
  prob.ratio = [](const std::vector<double>& x) {
    return 10.0 / (1.0 + (x[0] - 2.0) * (x[0] - 2.0));
  };
  SearchOptions opt;
  opt.starts = 4;
  opt.iters = 200;
  opt.seed = 99;
  SearchOutcome o1 = maximize_ratio(prob, opt);
  SearchOutcome o2 = maximize_ratio(prob, opt);
  CHECK(o1.best == o2.best);
  CHECK(o1.arg == o2.arg);
  CHECK(o1.evals == o2.evals);
  CHECK(o1.best >= 9.9);
  CHECK(std::abs(o1.arg[0] - 2.0) <= 0.2);

  SearchProblem degenerate;
  degenerate.init = [](Rng&) { return std::vector<double>{0.0}; };
  degenerate.ratio = [](const std::vector<double>&) { return -1.0; };
  CHECK_THROWS_AS(maximize_ratio(degenerate, opt), std::runtime_error);
}

TEST_CASE("random instance generators have the advertised shapes") {
  Rng g(77);
  AnalyticPoly p = random_poly(g, 9);
  CHECK(p.degree() == 9);
  StepFunction s = random_step(g, 12);
  CHECK(s.pieces() == 12);

  StepFunction lat = random_step_lattice(g, 16);
  for (const cplx& v : lat.values) {
    double re = v.real() * 1048576.0, im = v.imag() * 1048576.0;
    CHECK(re == std::round(re));
    CHECK(im == std::round(im));
  }

  DyadicFunction f = random_dyadic(g, 5);
  CHECK(f.depth == 5);

  for (int trial = 0; trial < 20; ++trial) {
    int depth = 3 + (int)g.uniform_int(0, 3);
    int level = (int)g.uniform_int(0, depth);
    long long index = g.uniform_int(0, (1LL << level) - 1);
    Atom a = random_atom(g, depth, level, index);
    CHECK(is_atom(a));
    double cap = 1.0 / std::sqrt(a.interval.measure());
    double nrm = l2_norm(to_step(a.values));
    CHECK(nrm <= cap * (1.0 + 1e-12));
    if (nrm > 0.0) CHECK(nrm > cap / 2.0);
  }
}

TEST_CASE("report serialization") {
  CheckReport rep;
  rep.lemma = "demo";
  rep.instances = 1;
  rep.violations = 0;
  rep.worst_ratio = 0.5;
  rep.runtime_ms = 12;
  rep.config_echo.push_back({"seed", "1"});
  CheckRow row;
  row.instance = "say \"hi\"";
  row.lhs = 0.5;
  row.rhs = 1.0;
  row.ratio = 0.5;
  rep.rows.push_back(row);

  std::string csv = rep.to_csv();
  CHECK(csv ==
        "instance,lhs,rhs,ratio,skipped\n"
        "\"say \"\"hi\"\"\",0.5,1,0.5,0\n");

  std::string js = rep.to_json();
  CHECK(js.substr(0, 16) == "{\"lemma\":\"demo\",");
  CHECK(js.find("\"estimated_constant\":null") != std::string::npos);
  CHECK(js.find("\"witness\":null") != std::string::npos);
  CHECK(js.back() == '\n');
  CHECK(js.find('\n') == js.size() - 1);  // single line

  rep.has_estimate = true;
  rep.estimated_constant = 2.25;
  CHECK(rep.to_json().find("\"estimated_constant\":2.25") != std::string::npos);
}

TEST_CASE("check dispatch: unknown names fail as usage errors") {
  CheckConfig cfg;
  cfg.set_seed(1);
  CHECK_THROWS_AS(run_check("bogus", cfg), ConfigError);
  CHECK_THROWS_AS(run_estimate("bogus", cfg), ConfigError);
}

TEST_CASE("small end-to-end check run") {
  CheckConfig cfg;
  cfg.set_seed(2024);
  cfg.set("instances", "50");
  cfg.set("pmax", "64");
  cfg.set("nmax", "16");
  CheckReport rep = run_check("enl2", cfg);
  CHECK(rep.passed());
  CHECK(rep.lemma == "enl2");
  CHECK(rep.instances == 50);
  CHECK(rep.rows.size() == 50);
  CHECK(rep.violations == 0);
  CHECK(rep.worst_ratio > 0.0);
  CHECK(rep.worst_ratio <= 1.0 + 1e-9);

  // The JSON document parses and echoes the effective configuration.
  nlohmann::json doc = nlohmann::json::parse(rep.to_json());
  CHECK(doc["lemma"] == "enl2");
  CHECK(doc["violations"] == 0);
  CHECK(doc["config_echo"]["instances"] == "50");
  CHECK(doc["config_echo"]["seed"] == "2024");
  CHECK(!doc["config_echo"].contains("jobs"));
}

TEST_CASE("reports are identical for any jobs value") {
  auto run = [](int jobs) {
    CheckConfig cfg;
    cfg.set_seed(555);
    cfg.set_jobs(jobs);
    cfg.set("instances", "80");
    cfg.set("pmax", "64");
    cfg.set("nmax", "16");
    return run_check("enl2", cfg);
  };
  CheckReport r1 = run(1);
  CheckReport r4 = run(4);
  CHECK(r1.to_csv() == r4.to_csv());
  CHECK(zero_runtime(r1.to_json()) == zero_runtime(r4.to_json()));
}

TEST_CASE("configuration typos inside a check fail loudly") {
  CheckConfig cfg;
  cfg.set_seed(1);
  cfg.set("instanecs", "50");
  CHECK_THROWS_AS(run_check("enl2", cfg), ConfigError);
}
