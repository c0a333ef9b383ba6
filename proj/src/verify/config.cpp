#include "hml/verify.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace hml {

namespace {

long long parse_ll(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + text);
  }
  if (pos != text.size()) throw ConfigError("config key '" + key + "': not an integer: " + text);
  return v;
}

double parse_d(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + text);
  }
  if (pos != text.size()) throw ConfigError("config key '" + key + "': not a number: " + text);
  return v;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string join_ll(const std::vector<long long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string join_d(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += JsonValue::fmt_double(v[i]);
  }
  return s;
}

}  // namespace

void CheckConfig::set(const std::string& key, const std::string& value) {
  if (key.empty()) throw ConfigError("empty config key");
  kv_[key] = value;
}

std::uint64_t CheckConfig::seed() const {
  if (!have_seed_) throw ConfigError("--seed is required for randomized commands");
  return seed_;
}

long long CheckConfig::geti(const std::string& key, long long def) const {
  read_.insert(key);
  long long v = def;
  auto it = kv_.find(key);
  if (it != kv_.end()) v = parse_ll(key, it->second);
  effective_[key] = std::to_string(v);
  return v;
}

double CheckConfig::getd(const std::string& key, double def) const {
  read_.insert(key);
  double v = def;
  auto it = kv_.find(key);
  if (it != kv_.end()) v = parse_d(key, it->second);
  effective_[key] = JsonValue::fmt_double(v);
  return v;
}

std::string CheckConfig::gets(const std::string& key, const std::string& def) const {
  read_.insert(key);
  std::string v = def;
  auto it = kv_.find(key);
  if (it != kv_.end()) v = it->second;
  effective_[key] = v;
  return v;
}

std::vector<long long> CheckConfig::getil(const std::string& key,
                                          const std::vector<long long>& def) const {
  read_.insert(key);
  std::vector<long long> v = def;
  auto it = kv_.find(key);
  if (it != kv_.end()) {
    v.clear();
    for (const std::string& part : split_commas(it->second)) v.push_back(parse_ll(key, part));
  }
  effective_[key] = join_ll(v);
  return v;
}

std::vector<double> CheckConfig::getdl(const std::string& key,
                                       const std::vector<double>& def) const {
  read_.insert(key);
  std::vector<double> v = def;
  auto it = kv_.find(key);
  if (it != kv_.end()) {
    v.clear();
    for (const std::string& part : split_commas(it->second)) v.push_back(parse_d(key, part));
  }
  effective_[key] = join_d(v);
  return v;
}

void CheckConfig::reject_unknown() const {
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (read_.count(key) == 0) throw ConfigError("unknown config key: " + key);
  }
}

std::vector<std::pair<std::string, std::string>> CheckConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("seed", have_seed_ ? std::to_string(seed_) : std::string("none"));
  for (const auto& kvp : effective_) out.push_back(kvp);
  return out;
}

void parallel_for(int jobs, long long count, const std::function<void(long long)>& body) {
  if (count <= 0) return;
  if (jobs < 1) jobs = 1;
  if (jobs > count) jobs = int(count);
  if (jobs == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        long long i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace hml
