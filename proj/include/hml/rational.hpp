#pragma once
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hml {

// Exact fraction on 64-bit integers, always normalized with den > 0.
// Cross-multiplied comparisons go through __int128 so desk-scale values
// (numerators up to ~1e9) never lose exactness.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n) : num(n), den(1) {}
  Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  double to_double() const { return double(num) / double(den); }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }

  // Accepts "p/q" or a bare integer "p".
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
};

inline Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
}
inline Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
}
inline Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num * b.num, a.den * b.den);
}
inline bool operator==(const Rational& a, const Rational& b) {
  return a.num == b.num && a.den == b.den;
}
inline bool operator<(const Rational& a, const Rational& b) {
  return (__int128)a.num * b.den < (__int128)b.num * a.den;
}
inline bool operator<=(const Rational& a, const Rational& b) {
  return (__int128)a.num * b.den <= (__int128)b.num * a.den;
}
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
inline bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

inline Rational rational_min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

}  // namespace hml
