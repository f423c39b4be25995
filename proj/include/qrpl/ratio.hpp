#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qrpl {

// Exact rational with 64-bit numerator/denominator and 128-bit intermediates.
// Used wherever the protocol promises exact arithmetic on fractional
// parameters (consensus weights, slashing, fee/attack-cost algebra); doubles
// would silently break the integer identities those computations rely on.
struct Ratio {
  int64_t num{0};
  int64_t den{1};

  Ratio() = default;
  Ratio(int64_t n, int64_t d) : num(n), den(d) { normalize(); }
  static Ratio whole(int64_t n) { return Ratio(n, 1); }

  // Parses decimal literals ("0.0001", "12", "-3.5") exactly.
  static Ratio from_decimal(std::string_view s);

  Ratio operator+(const Ratio& o) const { return make128(i128(num) * o.den + i128(o.num) * den, i128(den) * o.den); }
  Ratio operator-(const Ratio& o) const { return make128(i128(num) * o.den - i128(o.num) * den, i128(den) * o.den); }
  Ratio operator*(const Ratio& o) const { return make128(i128(num) * o.num, i128(den) * o.den); }
  Ratio operator/(const Ratio& o) const {
    if (o.num == 0) throw std::domain_error("Ratio: division by zero");
    return make128(i128(num) * o.den, i128(den) * o.num);
  }

  bool operator==(const Ratio& o) const { return num == o.num && den == o.den; }
  bool operator<(const Ratio& o) const { return i128(num) * o.den < i128(o.num) * den; }
  bool operator>(const Ratio& o) const { return o < *this; }
  bool operator<=(const Ratio& o) const { return !(o < *this); }
  bool operator>=(const Ratio& o) const { return !(*this < o); }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool is_integer() const { return den == 1; }

  int64_t to_int() const {
    if (!is_integer()) throw std::domain_error("Ratio: not an integer: " + str());
    return num;
  }

  // floor(value * this), exact.
  int64_t floor_mul(int64_t value) const {
    using I = __int128;
    I p = I(value) * num;
    I q = den;
    I r = p / q;
    if (p % q != 0 && ((p < 0) != (q < 0))) --r;
    return narrow(r);
  }

  int64_t floor() const { return floor_mul(1); }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

 private:
  using i128 = __int128;

  void normalize() {
    if (den == 0) throw std::domain_error("Ratio: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static int64_t narrow(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("Ratio: 64-bit overflow");
    return static_cast<int64_t>(v);
  }

  static Ratio make128(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("Ratio: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 a = n < 0 ? -n : n;
    i128 b = d;
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    Ratio r;
    r.num = narrow(n);
    r.den = narrow(d);
    if (r.num == 0) r.den = 1;
    return r;
  }
};

inline Ratio Ratio::from_decimal(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("Ratio: empty decimal");
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  int64_t num = 0;
  int64_t den = 1;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("Ratio: malformed decimal");
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("Ratio: malformed decimal");
    seen_digit = true;
    if (num > (INT64_MAX - 9) / 10) throw std::overflow_error("Ratio: decimal too large");
    num = num * 10 + (c - '0');
    if (seen_dot) {
      if (den > INT64_MAX / 10) throw std::overflow_error("Ratio: decimal too precise");
      den *= 10;
    }
  }
  if (!seen_digit) throw std::invalid_argument("Ratio: malformed decimal");
  return Ratio(neg ? -num : num, den);
}

}  // namespace qrpl
