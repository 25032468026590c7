#pragma once

// Exact arithmetic helpers shared by the bounds and Diophantine code:
// rationals, integer powers, and the certified ceiling of pi / epsilon.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "recur/errors.hpp"

namespace recur {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

/// Exact rational value of a finite double (every double is a dyadic rational).
inline Rational to_rational(double x) {
  if (!std::isfinite(x)) throw PreconditionError("non-finite value cannot be made exact");
  return Rational(x);
}

inline Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  BigInt r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

inline BigInt floor(const Rational& x) {
  return floor_div(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x));
}

inline BigInt ceil(const Rational& x) { return -floor(Rational(-x)); }

inline BigInt ipow(const BigInt& base, int exponent) {
  if (exponent < 0) throw PreconditionError("negative exponent in integer power");
  BigInt r = 1;
  for (int i = 0; i < exponent; ++i) r *= base;
  return r;
}

inline std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw PreconditionError("integer value exceeds 64-bit range: " + v.str());
  return v.convert_to<std::int64_t>();
}

inline std::uint64_t to_uint64(const BigInt& v) {
  if (v < 0 || v > std::numeric_limits<std::uint64_t>::max())
    throw PreconditionError("integer value exceeds unsigned 64-bit range: " + v.str());
  return v.convert_to<std::uint64_t>();
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline long double to_long_double(const Rational& x) { return x.convert_to<long double>(); }

namespace detail {

// pi to 40 significant digits; the true value lies strictly between these.
inline Rational pi_lower() {
  return Rational(BigInt("3141592653589793238462643383279502884197"),
                  BigInt("1000000000000000000000000000000000000000"));
}
inline Rational pi_upper() {
  return Rational(BigInt("3141592653589793238462643383279502884198"),
                  BigInt("1000000000000000000000000000000000000000"));
}

}  // namespace detail

/// Recurrence accuracy. Either an exact rational (any double converts exactly)
/// or an exact rational multiple of pi, so that ceil(pi / eps) is always
/// decided exactly rather than by floating point division.
class Epsilon {
 public:
  Epsilon(double value)  // NOLINT(google-explicit-constructor)
      : ratio_(to_rational(value)), pi_multiple_(false) {}

  static Epsilon rational(std::int64_t num, std::int64_t den) {
    Epsilon e(0.0);
    e.ratio_ = make_rational(num, den);
    return e;
  }

  /// eps = pi * num / den
  static Epsilon pi_fraction(std::int64_t num, std::int64_t den) {
    Epsilon e = rational(num, den);
    e.pi_multiple_ = true;
    return e;
  }

  /// Accepts "0.3", "1/8", "pi/4", "pi*3/16", "3*pi/16".
  static Epsilon parse(const std::string& text);

  [[nodiscard]] double value() const {
    if (!pi_multiple_) return to_double(ratio_);
    return static_cast<double>(std::numbers::pi_v<long double> * to_long_double(ratio_));
  }

  [[nodiscard]] const Rational& ratio() const { return ratio_; }
  [[nodiscard]] bool is_pi_multiple() const { return pi_multiple_; }

  /// ceil(pi / eps), decided with a two-sided rational bracket of pi.
  [[nodiscard]] std::uint64_t ceil_pi_over() const {
    if (ratio_ <= 0) throw PreconditionError("epsilon must be positive");
    if (pi_multiple_) return to_uint64(ceil(Rational(1 / ratio_)));
    BigInt lo = ceil(Rational(detail::pi_lower() / ratio_));
    BigInt hi = ceil(Rational(detail::pi_upper() / ratio_));
    // pi is irrational, so pi / eps is never an integer for rational eps; the
    // bracket only fails to separate if eps sits within 1e-39 of pi / n.
    if (lo != hi) throw InternalError("pi bracket too coarse to decide ceil(pi/eps)");
    return to_uint64(lo);
  }

  /// eps <= 1/2, decided exactly.
  [[nodiscard]] bool at_most_half() const {
    if (!pi_multiple_) return ratio_ <= Rational(1, 2);
    // pi * r <= 1/2  <=>  r <= 1/(2 pi); compare against both bracket ends.
    if (ratio_ * 2 * detail::pi_upper() <= 1) return true;
    if (ratio_ * 2 * detail::pi_lower() > 1) return false;
    throw InternalError("pi bracket too coarse to compare epsilon with 1/2");
  }

  /// 0 < eps < 1, decided exactly.
  [[nodiscard]] bool in_open_unit() const {
    if (ratio_ <= 0) return false;
    if (!pi_multiple_) return ratio_ < 1;
    return ratio_ * detail::pi_upper() < 1;
  }

  [[nodiscard]] std::string str() const {
    std::string base = ratio_.str();
    return pi_multiple_ ? "pi*" + base : base;
  }

 private:
  Rational ratio_;
  bool pi_multiple_;
};

namespace detail {

inline Rational parse_plain_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      auto num = std::stoll(text.substr(0, slash));
      auto den = std::stoll(text.substr(slash + 1));
      return make_rational(num, den);
    }
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw PreconditionError("trailing characters in '" + text + "'");
    return to_rational(v);
  } catch (const std::logic_error&) {
    throw PreconditionError("cannot parse epsilon '" + text + "'");
  }
}

}  // namespace detail

inline Epsilon Epsilon::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  auto pos = s.find("pi");
  if (pos == std::string::npos) {
    Epsilon e(0.0);
    e.ratio_ = detail::parse_plain_rational(s);
    return e;
  }
  // Remove the "pi" token together with one adjacent '*'.
  std::string rest = s.substr(0, pos) + s.substr(pos + 2);
  if (pos > 0 && pos - 1 < rest.size() && rest[pos - 1] == '*')
    rest.erase(pos - 1, 1);
  else if (pos < rest.size() && rest[pos] == '*')
    rest.erase(pos, 1);
  Rational r = 1;
  if (!rest.empty()) {
    if (rest.front() == '/') rest = "1" + rest;
    r = detail::parse_plain_rational(rest);
  }
  Epsilon e(0.0);
  e.ratio_ = r;
  e.pi_multiple_ = true;
  return e;
}

}  // namespace recur
