#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hml/jsonout.hpp"
#include "hml/verify.hpp"
#include "json.hpp"

namespace {

// Exit codes: 0 success, 1 a check found a mathematical violation,
// 2 usage / configuration error. Never conflated.
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(text, &pos, 10);
    if (pos != text.size()) throw std::invalid_argument(text);
    return (std::uint64_t)v;
  } catch (const std::exception&) {
    throw hml::ConfigError(what + ": expected an unsigned integer, got '" + text + "'");
  }
}

long long parse_i64(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(text, &pos, 10);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw hml::ConfigError(what + ": expected an integer, got '" + text + "'");
  }
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<long long> parse_int_list(const std::string& text, const std::string& what) {
  if (text.empty()) throw hml::ConfigError(what + ": expected a comma-separated integer list");
  std::vector<long long> out;
  for (const std::string& tok : split_commas(text)) out.push_back(parse_i64(tok, what));
  return out;
}

void apply_kv(hml::CheckConfig& cfg, const std::string& key, const std::string& value) {
  if (key.empty()) throw hml::ConfigError("empty configuration key");
  if (key == "seed") {
    cfg.set_seed(parse_u64(value, "seed"));
  } else {
    cfg.set(key, value);
  }
}

// Config files carry the same keys as --set; scalars and flat arrays map onto
// the same strings the command line would have produced.
std::string json_scalar_to_string(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return hml::JsonValue::fmt_double(v.get<double>());
  throw hml::ConfigError("config key '" + key + "': unsupported value type");
}

void load_config_file(hml::CheckConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hml::ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw hml::ConfigError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw hml::ConfigError("config file " + path + ": expected a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.value().is_array()) {
      std::string joined;
      for (const auto& elem : it.value()) {
        if (!joined.empty()) joined += ",";
        joined += json_scalar_to_string(elem, it.key());
      }
      apply_kv(cfg, it.key(), joined);
    } else {
      apply_kv(cfg, it.key(), json_scalar_to_string(it.value(), it.key()));
    }
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hml::ConfigError("cannot open output file: " + path);
  out << text;
  if (!out) throw hml::ConfigError("failed writing output file: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hml::ConfigError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<int> parse_signs(const std::string& text, std::size_t want) {
  std::vector<int> signs;
  if (text.empty() || text == "alternating") {
    for (std::size_t k = 0; k < want; ++k)
      signs.push_back(text.empty() ? 1 : (k % 2 == 0 ? 1 : -1));
    return signs;
  }
  for (const std::string& tok : split_commas(text)) {
    if (tok == "+" || tok == "+1" || tok == "1") {
      signs.push_back(1);
    } else if (tok == "-" || tok == "-1") {
      signs.push_back(-1);
    } else {
      throw hml::ConfigError("signs: expected '+' or '-' entries, got '" + tok + "'");
    }
  }
  if (signs.size() != want)
    throw hml::ConfigError("signs: got " + std::to_string(signs.size()) + " entries for " +
                           std::to_string(want) + " sequence terms");
  return signs;
}

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool have_seed = false;
  std::vector<std::string> sets;
  std::string out_path;
  std::string format = "json";
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON file with the same keys as --set");
  cmd->add_option("--seed", args.seed, "master seed (required for randomized commands)")
      ->each([&args](const std::string&) { args.have_seed = true; });
  cmd->add_option("--set", args.sets, "key=value override (repeatable)");
  cmd->add_option("--out", args.out_path, "output path (default stdout)");
  cmd->add_option("--format", args.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--jobs", args.jobs, "worker threads (does not affect report bytes)")
      ->check(CLI::PositiveNumber);
}

hml::CheckConfig build_config(const CommonArgs& args) {
  hml::CheckConfig cfg;
  if (!args.config_path.empty()) load_config_file(cfg, args.config_path);
  for (const std::string& kv : args.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw hml::ConfigError("--set expects key=value, got '" + kv + "'");
    apply_kv(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.have_seed) cfg.set_seed(args.seed);
  cfg.set_jobs(args.jobs);
  return cfg;
}

int emit_report(const hml::CheckReport& rep, const CommonArgs& args) {
  write_output(args.out_path, args.format == "csv" ? rep.to_csv() : rep.to_json());
  return rep.passed() ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"norm-inequality verification harness for idempotent multipliers"};
  app.require_subcommand(1);

  CommonArgs check_args;
  std::string check_id;
  CLI::App* check_cmd = app.add_subcommand("check", "run one verification suite");
  check_cmd->add_option("id", check_id, "suite id")->required();
  add_common(check_cmd, check_args);

  CommonArgs est_args;
  std::string est_target, est_d, est_N, est_s, est_beta;
  CLI::App* est_cmd = app.add_subcommand("estimate", "search for an empirical constant");
  est_cmd->add_option("target", est_target, "constant to estimate")->required();
  add_common(est_cmd, est_args);
  est_cmd->add_option("--d", est_d, "frequency sequence (shorthand for --set d=...)");
  est_cmd->add_option("--N", est_N, "divisor sequence (shorthand for --set N=...)");
  est_cmd->add_option("--s", est_s, "index offset (shorthand for --set s=...)");
  est_cmd->add_option("--beta", est_beta, "sup d_k/N_{k+s} bound (shorthand for --set beta=...)");

  std::string build_object, build_d, build_N, build_signs, build_contains, build_out;
  double build_cest = 24.0;
  CLI::App* build_cmd = app.add_subcommand("build", "construct a symbol or frequency set");
  build_cmd->add_option("object", build_object, "mu-eps | k-hat | idem-set")->required();
  build_cmd->add_option("--d", build_d, "comma-separated frequency sequence");
  build_cmd->add_option("--N", build_N, "comma-separated divisor sequence (idem-set)");
  build_cmd->add_option("--signs", build_signs, "'+'/'-' list or 'alternating' (mu-eps)");
  build_cmd->add_option("--c-alpha-est", build_cest, "multiplier-norm estimate for block sizing");
  build_cmd->add_option("--contains", build_contains, "n1,n2 membership query (idem-set)");
  build_cmd->add_option("--out", build_out, "output path (default stdout)");

  std::string dec_input, dec_out;
  CLI::App* dec_cmd = app.add_subcommand("decompose", "atomic decomposition of a dyadic function");
  dec_cmd->add_option("input", dec_input, "serialized dyadic function (JSON)")->required();
  dec_cmd->add_option("--out", dec_out, "decomposition output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check_cmd->parsed()) {
      return emit_report(hml::run_check(check_id, build_config(check_args)), check_args);
    }

    if (est_cmd->parsed()) {
      hml::CheckConfig cfg = build_config(est_args);
      if (!est_d.empty()) cfg.set("d", est_d);
      if (!est_N.empty()) cfg.set("N", est_N);
      if (!est_s.empty()) cfg.set("s", est_s);
      if (!est_beta.empty()) cfg.set("beta", est_beta);
      return emit_report(hml::run_estimate(est_target, cfg), est_args);
    }

    if (build_cmd->parsed()) {
      if (build_object == "mu-eps" || build_object == "k-hat") {
        if (build_d.empty()) throw hml::ConfigError("build " + build_object + ": --d is required");
        hml::LacunarySystem sys;
        try {
          sys = hml::lacunary_check(parse_int_list(build_d, "--d"), build_cest);
        } catch (const std::invalid_argument& e) {
          throw hml::ConfigError(std::string("build: ") + e.what());
        }
        hml::Symbol mu;
        if (build_object == "mu-eps") {
          mu = hml::build_mu_eps(sys, parse_signs(build_signs, sys.d.size()));
        } else {
          if (!build_signs.empty()) throw hml::ConfigError("build k-hat: --signs does not apply");
          mu = hml::build_k_hat(sys);
        }
        write_output(build_out, hml::system_symbol_to_json(sys, mu));
        return 0;
      }
      if (build_object == "idem-set") {
        if (build_d.empty() || build_N.empty())
          throw hml::ConfigError("build idem-set: --d and --N are required");
        hml::IdemSet2D A;
        try {
          A = hml::IdemSet2D(parse_int_list(build_d, "--d"), parse_int_list(build_N, "--N"));
        } catch (const std::invalid_argument& e) {
          throw hml::ConfigError(std::string("build idem-set: ") + e.what());
        }
        if (!build_contains.empty()) {
          std::vector<long long> q = parse_int_list(build_contains, "--contains");
          if (q.size() != 2) throw hml::ConfigError("--contains expects exactly n1,n2");
          write_output(build_out, hml::idem_contains(A, q[0], q[1]) ? "true\n" : "false\n");
          return 0;
        }
        hml::JsonValue doc = hml::JsonValue::object();
        hml::JsonValue darr = hml::JsonValue::array();
        for (long long v : A.d) darr.push(hml::JsonValue::of(v));
        hml::JsonValue narr = hml::JsonValue::array();
        for (long long v : A.N) narr.push(hml::JsonValue::of(v));
        doc.set("d", std::move(darr));
        doc.set("N", std::move(narr));
        write_output(build_out, doc.str() + "\n");
        return 0;
      }
      throw hml::ConfigError("unknown build object: " + build_object);
    }

    if (dec_cmd->parsed()) {
      hml::DyadicFunction f;
      try {
        f = hml::dyadic_from_json(read_file(dec_input));
      } catch (const hml::ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        throw hml::ConfigError("decompose: " + std::string(e.what()));
      }
      hml::AtomicDecomposition dec = hml::atomic_decompose(f);
      write_output(dec_out, hml::decomposition_to_json(dec));
      double coeff_l1 = 0.0;
      for (const hml::cplx& c : dec.coeffs) coeff_l1 += std::abs(c);
      const double h1 = hml::h1_delta_norm(f);
      const double ratio = h1 > 0.0 ? coeff_l1 / h1 : 0.0;
      std::cout << "coeff_l1 = " << hml::JsonValue::fmt_double(coeff_l1) << "\n"
                << "h1_delta = " << hml::JsonValue::fmt_double(h1) << "\n"
                << "ratio = " << hml::JsonValue::fmt_double(ratio) << "\n";
      return 0;
    }
  } catch (const hml::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
