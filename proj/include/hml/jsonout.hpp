#pragma once
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace hml {

// Deterministic JSON emitter. Reports have to replay byte-for-byte across
// runs and --jobs settings, so doubles are always printed with 17 significant
// digits and object keys keep their insertion order.
struct JsonValue {
  enum class Kind { Null, Bool, Int, Double, Str, Array, Object };
  Kind kind = Kind::Null;
  bool b = false;
  long long i = 0;
  double d = 0.0;
  std::string s;
  std::vector<JsonValue> arr;
  std::vector<std::pair<std::string, JsonValue>> obj;

  static JsonValue null() { return JsonValue{}; }
  static JsonValue of(bool v) { JsonValue j; j.kind = Kind::Bool; j.b = v; return j; }
  static JsonValue of(long long v) { JsonValue j; j.kind = Kind::Int; j.i = v; return j; }
  static JsonValue of(int v) { return of((long long)v); }
  static JsonValue of(std::uint64_t v) { return of((long long)v); }
  static JsonValue of(double v) { JsonValue j; j.kind = Kind::Double; j.d = v; return j; }
  static JsonValue of(const std::string& v) { JsonValue j; j.kind = Kind::Str; j.s = v; return j; }
  static JsonValue of(const char* v) { return of(std::string(v)); }
  static JsonValue array() { JsonValue j; j.kind = Kind::Array; return j; }
  static JsonValue object() { JsonValue j; j.kind = Kind::Object; return j; }

  JsonValue& push(JsonValue v) { arr.push_back(std::move(v)); return *this; }
  JsonValue& set(const std::string& k, JsonValue v) {
    obj.emplace_back(k, std::move(v));
    return *this;
  }

  static std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  }

  void emit(std::string& out) const {
    switch (kind) {
      case Kind::Null: out += "null"; break;
      case Kind::Bool: out += b ? "true" : "false"; break;
      case Kind::Int: out += std::to_string(i); break;
      case Kind::Double: out += fmt_double(d); break;
      case Kind::Str: {
        out += '"';
        for (char c : s) {
          switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
              if ((unsigned char)c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
              } else {
                out += c;
              }
          }
        }
        out += '"';
        break;
      }
      case Kind::Array: {
        out += '[';
        for (std::size_t k = 0; k < arr.size(); ++k) {
          if (k) out += ',';
          arr[k].emit(out);
        }
        out += ']';
        break;
      }
      case Kind::Object: {
        out += '{';
        for (std::size_t k = 0; k < obj.size(); ++k) {
          if (k) out += ',';
          JsonValue key;
          key.kind = Kind::Str;
          key.s = obj[k].first;
          key.emit(out);
          out += ':';
          obj[k].second.emit(out);
        }
        out += '}';
        break;
      }
    }
  }

  std::string str() const {
    std::string out;
    emit(out);
    return out;
  }
};

}  // namespace hml
