#pragma once

// Closed-form recurrence-time bounds (continuous and discrete time) and the
// pigeonhole q-bounds for difference approximation. Integer factors are
// computed exactly; only the final multiplication by the base period rounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "recur/errors.hpp"
#include "recur/exact.hpp"

namespace recur {

enum class Theorem { T1, T2, T3a, T3b, T4a, T4b };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3a: return "T3a";
    case Theorem::T3b: return "T3b";
    case Theorem::T4a: return "T4a";
    case Theorem::T4b: return "T4b";
  }
  return "?";
}

inline Theorem theorem_from_string(const std::string& s) {
  for (Theorem t : {Theorem::T1, Theorem::T2, Theorem::T3a, Theorem::T3b, Theorem::T4a, Theorem::T4b})
    if (s == to_string(t)) return t;
  throw PreconditionError("unknown theorem id '" + s + "'");
}

struct BoundReport {
  Theorem theorem = Theorem::T1;
  /// Bound in time units (continuous) or steps (discrete).
  double value = 0;
  /// Exact multiplier of the base period: value = base_period * factor.
  Rational factor;
  /// 2pi / span (continuous) or pi / max_R (discrete).
  double base_period = 0;
  std::size_t d = 0;
  double epsilon = 0;
  /// Spectral span (continuous) or largest circle distance (discrete).
  double scale_input = 0;
  std::uint64_t n_used = 0;
  /// Discrete only: ceil(pi / max_R) * factor, the bound met by an integer base step.
  std::optional<double> ceiling_adjusted;
  /// Set when the evaluation is outside the range where the bound was derived.
  std::optional<std::string> flag;
};

struct BoundPair {
  BoundReport first;
  BoundReport second;
  [[nodiscard]] const BoundReport& min() const {
    return second.value < first.value ? second : first;
  }
};

struct QBounds {
  std::uint64_t hypercube = 0;
  std::uint64_t two_cube = 0;
  std::uint64_t simplex_hull = 0;
  [[nodiscard]] std::uint64_t min() const { return std::min({hypercube, two_cube, simplex_hull}); }
};

/// Base step for discrete time: ceil(pi / max_R). A quotient within 1e-12
/// (relative) of an integer snaps to it, so phases entered as pi/k radians
/// give m0 = k despite pi being rounded.
inline std::uint64_t discrete_base_step(double max_r) {
  if (!(max_r > 0) || max_r > std::numbers::pi * (1 + 1e-15))
    throw PreconditionError("largest circle distance must lie in (0, pi]");
  long double ratio = std::numbers::pi_v<long double> / static_cast<long double>(max_r);
  // Compare against the same rounded pi the phases were written with.
  long double ratio_fl = static_cast<long double>(std::numbers::pi) / static_cast<long double>(max_r);
  long double nearest = std::round(ratio_fl);
  if (std::abs(ratio_fl - nearest) <= 1e-12L * ratio_fl) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(ratio));
}

namespace detail {

inline void require_continuous_eps(const Epsilon& eps) {
  if (!eps.in_open_unit()) throw PreconditionError("continuous-time bounds require 0 < epsilon < 1");
}

inline void require_discrete_eps(const Epsilon& eps) {
  if (!(eps.ratio() > 0) || !eps.at_most_half())
    throw PreconditionError("discrete-time bounds (T2, T4a, T4b) require 0 < epsilon <= 1/2");
}

inline double scaled(long double base, const Rational& factor) {
  return static_cast<double>(base * to_long_double(factor));
}

inline BoundReport continuous_report(Theorem th, double e_max, double e_min, std::size_t d,
                                     const Epsilon& eps, std::uint64_t n, Rational factor) {
  BoundReport r;
  r.theorem = th;
  r.factor = std::move(factor);
  long double span = static_cast<long double>(e_max) - static_cast<long double>(e_min);
  r.base_period = static_cast<double>(2 * std::numbers::pi_v<long double> / span);
  r.value = static_cast<double>(2 * std::numbers::pi_v<long double> * to_long_double(r.factor) / span);
  r.d = d;
  r.epsilon = eps.value();
  r.scale_input = static_cast<double>(span);
  r.n_used = n;
  return r;
}

inline BoundReport discrete_report(Theorem th, double max_r, std::size_t d, const Epsilon& eps,
                                   std::uint64_t n, Rational factor) {
  BoundReport r;
  r.theorem = th;
  r.factor = std::move(factor);
  long double base = std::numbers::pi_v<long double> / static_cast<long double>(max_r);
  r.base_period = static_cast<double>(base);
  r.value = scaled(base, r.factor);
  r.d = d;
  r.epsilon = eps.value();
  r.scale_input = max_r;
  r.n_used = n;
  r.ceiling_adjusted = scaled(static_cast<long double>(discrete_base_step(max_r)), r.factor);
  return r;
}

}  // namespace detail

/// t_r <= (2pi / span) (2N)^(d-2).
inline BoundReport bound_T1(double e_max, double e_min, std::size_t d, const Epsilon& eps) {
  if (d < 2) throw PreconditionError("T1 bound needs d >= 2 distinct energies");
  detail::require_continuous_eps(eps);
  if (!(e_max > e_min)) throw PreconditionError("T1 bound needs E_max > E_min");
  std::uint64_t n = eps.ceil_pi_over();
  Rational factor(ipow(BigInt(2 * n), static_cast<int>(d) - 2));
  return detail::continuous_report(Theorem::T1, e_max, e_min, d, eps, n, factor);
}

/// m_r <= (pi / max_R) (2N)^(d-1).
inline BoundReport bound_T2(double max_r, std::size_t d, const Epsilon& eps) {
  if (d < 2) throw PreconditionError("T2 bound needs d >= 2 distinct eigenphases");
  detail::require_discrete_eps(eps);
  std::uint64_t n = eps.ceil_pi_over();
  Rational factor(ipow(BigInt(2 * n), static_cast<int>(d) - 1));
  return detail::discrete_report(Theorem::T2, max_r, d, eps, n, factor);
}

/// T3a = t0 N (2N+1)^(d-3) for d >= 3; T3b = t0 (2N+2)^(d-2) / (d-1) for d >= 2.
/// For d = 2 only T3b is defined and is returned in both slots.
inline BoundPair bound_T3(double e_max, double e_min, std::size_t d, const Epsilon& eps) {
  if (d < 2) throw PreconditionError("T3 bounds need d >= 2 distinct energies");
  detail::require_continuous_eps(eps);
  if (!(e_max > e_min)) throw PreconditionError("T3 bounds need E_max > E_min");
  std::uint64_t n = eps.ceil_pi_over();
  const int di = static_cast<int>(d);
  Rational fb(ipow(BigInt(2 * n + 2), di - 2), BigInt(di - 1));
  auto b = detail::continuous_report(Theorem::T3b, e_max, e_min, d, eps, n, fb);
  if (d < 3) return {b, b};
  Rational fa(BigInt(n) * ipow(BigInt(2 * n + 1), di - 3));
  auto a = detail::continuous_report(Theorem::T3a, e_max, e_min, d, eps, n, fa);
  return {a, b};
}

/// T4a = (pi / max_R) N (2N+1)^(d-2); T4b = (pi / max_R) (2N+2)^(d-1) / d.
inline BoundPair bound_T4(double max_r, std::size_t d, const Epsilon& eps) {
  if (d < 2) throw PreconditionError("T4 bounds need d >= 2 distinct eigenphases");
  detail::require_discrete_eps(eps);
  std::uint64_t n = eps.ceil_pi_over();
  const int di = static_cast<int>(d);
  Rational fa(BigInt(n) * ipow(BigInt(2 * n + 1), di - 2));
  Rational fb(ipow(BigInt(2 * n + 2), di - 1), BigInt(di));
  auto a = detail::discrete_report(Theorem::T4a, max_r, d, eps, n, fa);
  auto b = detail::discrete_report(Theorem::T4b, max_r, d, eps, n, fb);
  if (d == 2)
    a.flag = "first bound evaluated at d = 2; its continuous-time analogue needs d >= 3";
  return {a, b};
}

/// Pigeonhole tile counts ((2N)^(d-1), N(2N+1)^(d-2), ceil((2N+2)^(d-1)/d)).
/// d = 1 (one free value after eliminating an integer difference) gives 1.
inline QBounds prop1_q_bounds(std::size_t d, std::uint64_t n) {
  if (d < 1) throw PreconditionError("q-bounds need d >= 1");
  if (n < 1) throw PreconditionError("q-bounds need N >= 1");
  if (d == 1) return {1, 1, 1};
  const int di = static_cast<int>(d);
  QBounds b;
  b.hypercube = to_uint64(ipow(BigInt(2 * n), di - 1));
  b.two_cube = to_uint64(BigInt(n) * ipow(BigInt(2 * n + 1), di - 2));
  b.simplex_hull = to_uint64(ceil(Rational(ipow(BigInt(2 * n + 2), di - 1), BigInt(di))));
  return b;
}

}  // namespace recur
