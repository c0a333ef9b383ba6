#include "hml/verify.hpp"

namespace hml {

std::string CheckReport::to_json() const {
  JsonValue root = JsonValue::object();
  root.set("lemma", JsonValue::of(lemma));
  root.set("instances", JsonValue::of(instances));
  root.set("violations", JsonValue::of(violations));
  root.set("worst_ratio", JsonValue::of(worst_ratio));
  root.set("estimated_constant",
           has_estimate ? JsonValue::of(estimated_constant) : JsonValue::null());
  root.set("witness", witness);
  root.set("runtime_ms", JsonValue::of((long long)runtime_ms));
  JsonValue echo = JsonValue::object();
  for (const auto& [k, v] : config_echo) echo.set(k, JsonValue::of(v));
  root.set("config_echo", echo);
  return root.str() + "\n";
}

std::string CheckReport::to_csv() const {
  std::string out = "instance,lhs,rhs,ratio,skipped\n";
  for (const CheckRow& r : rows) {
    out += '"';
    for (char c : r.instance) {
      out += c;
      if (c == '"') out += '"';
    }
    out += '"';
    out += ',';
    out += JsonValue::fmt_double(r.lhs);
    out += ',';
    out += JsonValue::fmt_double(r.rhs);
    out += ',';
    out += JsonValue::fmt_double(r.ratio);
    out += ',';
    out += r.skipped ? "1" : "0";
    out += '\n';
  }
  return out;
}

}  // namespace hml
