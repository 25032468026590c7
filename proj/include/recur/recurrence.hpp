#pragma once

// State and system epsilon-recurrence, the exact worst-case trace distance at a
// given time, non-triviality witnesses, and constructive recurrence
// certificates built on the difference-approximation pigeonhole.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recur/bounds.hpp"
#include "recur/diophantine.hpp"
#include "recur/errors.hpp"
#include "recur/exact.hpp"
#include "recur/spectrum.hpp"

namespace recur {

// ---------------------------------------------------------------------------
// Worst case over all states

namespace detail {

struct Point2 {
  double x;
  double y;
};

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double origin_segment_distance(const Point2& a, const Point2& b) {
  double dx = b.x - a.x;
  double dy = b.y - a.y;
  double len2 = dx * dx + dy * dy;
  double u = len2 > 0 ? std::clamp(-(a.x * dx + a.y * dy) / len2, 0.0, 1.0) : 0.0;
  return std::hypot(a.x + u * dx, a.y + u * dy);
}

inline double origin_hull_distance(const std::vector<Point2>& pts) {
  auto hull = convex_hull(pts);
  if (hull.size() == 1) return std::hypot(hull[0].x, hull[0].y);
  if (hull.size() == 2) return origin_segment_distance(hull[0], hull[1]);
  const Point2 origin{0, 0};
  bool inside = true;
  for (std::size_t i = 0; i < hull.size(); ++i)
    if (cross(hull[i], hull[(i + 1) % hull.size()], origin) < 0) inside = false;
  if (inside) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i)
    best = std::min(best, origin_segment_distance(hull[i], hull[(i + 1) % hull.size()]));
  return best;
}

// Phase of each distinct value at time t, reduced mod 2pi in extended precision.
inline std::vector<double> distinct_phases(const Spectrum& s, double t) {
  std::vector<double> out;
  const long double two_pi = 2 * std::numbers::pi_v<long double>;
  for (double v : s.distinct_values()) {
    long double ph = s.mode() == TimeMode::continuous ? -static_cast<long double>(v) * t
                                                      : static_cast<long double>(v) * t;
    ph = std::fmod(ph, two_pi);
    if (ph < 0) ph += two_pi;
    out.push_back(static_cast<double>(ph));
  }
  return out;
}

}  // namespace detail

/// sup over pure states of the trace distance at time t. The overlap is a
/// convex combination of the unit-circle points exp(-i theta_k), so the supremum
/// is sqrt(1 - dist(0, hull)^2).
inline double worst_case_trace_distance(const Spectrum& s, double t) {
  std::vector<detail::Point2> pts;
  for (double ph : detail::distinct_phases(s, t)) pts.push_back({std::cos(ph), std::sin(ph)});
  double dist = detail::origin_hull_distance(pts);
  return std::sqrt(std::clamp(1.0 - dist * dist, 0.0, 1.0));
}

// ---------------------------------------------------------------------------
// State and system recurrence

struct RecurrenceVerdict {
  bool recurrent = false;
  /// Condition (i): the distance at t is at most epsilon.
  bool within_epsilon = false;
  double distance_at_t = 0;
  /// First excursion time with distance above epsilon, if any.
  std::optional<double> excursion_time;
  std::optional<double> excursion_distance;
  /// No excursion time was supplied, so only a trivial recurrence can be claimed.
  bool no_excursion_candidates = false;
};

namespace detail {

inline void require_eps_definition(double eps) {
  if (!(eps >= 0 && eps < 1)) throw PreconditionError("epsilon must satisfy 0 <= eps < 1");
}

inline bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

inline void require_times(const Spectrum& s, double t, std::span<const double> excursions) {
  if (!std::isfinite(t) || t < 0) throw PreconditionError("time must be finite and non-negative");
  if (s.mode() == TimeMode::discrete && !is_integer(t))
    throw PreconditionError("discrete-time recurrence needs an integer time");
  for (double tp : excursions) {
    if (!(tp < t)) throw PreconditionError("excursion times must be strictly less than t");
    if (s.mode() == TimeMode::discrete && (!is_integer(tp) || tp < 1))
      throw PreconditionError("discrete excursion times must be positive integers");
    if (s.mode() == TimeMode::continuous && !(tp >= 0))
      throw PreconditionError("excursion times must be non-negative");
  }
}

template <class DistanceAt>
RecurrenceVerdict classify(double eps, double t, std::span<const double> excursions, DistanceAt&& dist) {
  RecurrenceVerdict v;
  v.distance_at_t = dist(t);
  v.within_epsilon = v.distance_at_t <= eps;
  v.no_excursion_candidates = excursions.empty();
  for (double tp : excursions) {
    double dp = dist(tp);
    if (dp > eps) {
      v.excursion_time = tp;
      v.excursion_distance = dp;
      break;
    }
  }
  v.recurrent = v.within_epsilon && v.excursion_time.has_value();
  return v;
}

}  // namespace detail

/// State recurrence: distance at t <= eps and some earlier
/// excursion time with distance > eps.
inline RecurrenceVerdict is_state_recurrent_at(const PureState& state, const Spectrum& s, double eps, double t,
                                               std::span<const double> excursion_times) {
  detail::require_eps_definition(eps);
  detail::require_dimension(state.size(), s);
  detail::require_times(s, t, excursion_times);
  return detail::classify(eps, t, excursion_times,
                          [&](double tt) { return trace_distance_pure(state, s, tt); });
}

/// Candidate excursion times used when the caller gives none: 10^4 uniform
/// points in (0, t), or every integer step below t in discrete time. This is a
/// search heuristic, not a proof that no excursion exists.
inline std::vector<double> default_excursion_grid(const Spectrum& s, double t, std::size_t points = 10000) {
  std::vector<double> grid;
  if (!(t > 0)) return grid;
  if (s.mode() == TimeMode::discrete) {
    const auto steps = static_cast<std::uint64_t>(t);
    const std::uint64_t stride = std::max<std::uint64_t>(1, steps / points);
    for (std::uint64_t m = 1; m < steps; m += stride) grid.push_back(static_cast<double>(m));
    return grid;
  }
  for (std::size_t i = 1; i <= points; ++i)
    grid.push_back(t * static_cast<double>(i) / static_cast<double>(points + 1));
  return grid;
}

/// System recurrence: every state within eps at t, and some state beyond eps at an
/// earlier candidate time. Both conditions use the exact worst case. With no
/// candidate list the default grid is searched.
inline RecurrenceVerdict is_system_recurrent_at(const Spectrum& s, double eps, double t,
                                                std::optional<std::vector<double>> excursion_times = std::nullopt) {
  detail::require_eps_definition(eps);
  std::vector<double> times = excursion_times ? *excursion_times : default_excursion_grid(s, t);
  detail::require_times(s, t, times);
  return detail::classify(eps, t, times, [&](double tt) { return worst_case_trace_distance(s, tt); });
}

// ---------------------------------------------------------------------------
// Witnesses

struct Witness {
  PureState state;
  double time = 0;
  double distance = 0;
  /// Distinct-value indices superposed by the witness.
  std::size_t low = 0;
  std::size_t high = 0;
};

namespace detail {

struct MaxCirclePair {
  std::size_t j = 0;
  std::size_t k = 1;
  double distance = 0;
  std::optional<Rational> exact_turns;
};

inline MaxCirclePair max_circle_pair(const Spectrum& s) {
  MaxCirclePair best;
  auto phases = s.distinct_values();
  for (std::size_t j = 0; j < phases.size(); ++j)
    for (std::size_t k = j + 1; k < phases.size(); ++k) {
      double r = circle_distance(phases[j], phases[k]);
      if (r > best.distance) best = {j, k, r, std::nullopt};
    }
  if (s.has_exact()) {
    auto ex = s.exact_distinct();
    Rational best_r = -1;
    for (std::size_t j = 0; j < ex.size(); ++j)
      for (std::size_t k = j + 1; k < ex.size(); ++k) {
        Rational diff = ex[k] - ex[j];
        if (diff < 0) diff = -diff;
        Rational r = std::min(diff, Rational(1 - diff));
        if (r > best_r) {
          best_r = r;
          best.j = j;
          best.k = k;
        }
      }
    best.exact_turns = best_r;
    best.distance = static_cast<double>(2 * std::numbers::pi_v<long double> * to_long_double(best_r));
  }
  return best;
}

}  // namespace detail

/// Largest circle distance between distinct eigenphases.
inline double max_circle_distance(const Spectrum& s) {
  if (s.mode() != TimeMode::discrete) throw PreconditionError("circle distance applies to discrete spectra");
  s.require_recurrence_ready();
  return detail::max_circle_pair(s).distance;
}

/// Integer base step m0 = ceil(pi / max_R), exact for rational (turns) spectra.
inline std::uint64_t discrete_base_step(const Spectrum& s) {
  auto pair = detail::max_circle_pair(s);
  if (pair.exact_turns) return to_uint64(ceil(Rational(1 / (2 * *pair.exact_turns))));
  return discrete_base_step(pair.distance);
}

/// A state and an earlier time at which it sits beyond eps from its start.
/// Continuous: (|E_min> + |E_max>)/sqrt2 at the midpoint of the interval in
/// (0, t0) where |sin((E_max - E_min) t / 2)| > eps, which is t0 / 2.
/// Discrete: the pair with largest circle distance R at the smallest integer
/// m' with m' R > pi/3.
inline Witness witness_nontrivial(const Spectrum& s, const Epsilon& eps) {
  s.require_recurrence_ready();
  Witness w;
  if (s.mode() == TimeMode::continuous) {
    if (!eps.in_open_unit()) throw PreconditionError("continuous witness requires 0 < epsilon < 1");
    w.low = 0;
    w.high = s.d() - 1;
    w.time = std::numbers::pi / s.spread();
  } else {
    if (!(eps.ratio() > 0) || !eps.at_most_half())
      throw PreconditionError("discrete witness requires 0 < epsilon <= 1/2");
    auto pair = detail::max_circle_pair(s);
    w.low = pair.j;
    w.high = pair.k;
    std::uint64_t m;
    if (pair.exact_turns)
      m = to_uint64(floor(Rational(1 / (6 * *pair.exact_turns)))) + 1;
    else
      m = static_cast<std::uint64_t>(std::floor(std::numbers::pi / (3 * pair.distance))) + 1;
    w.time = static_cast<double>(m);
  }
  w.state = PureState::equal_pair(s.dimension(), s.representative(w.low), s.representative(w.high));
  w.distance = trace_distance_pure(w.state, s, w.time);
  if (!(w.distance > eps.value()))
    throw InternalError("witness state does not exceed epsilon at the witness time");
  return w;
}

// ---------------------------------------------------------------------------
// Certificates

struct RecurrenceCertificate {
  TimeMode mode = TimeMode::continuous;
  /// t_r (time units) or m_r (integer steps).
  double recurrence_time = 0;
  /// t0 = 2pi / span, or m0 = ceil(pi / max_R).
  double base_time = 0;
  std::uint64_t multiplier = 1;
  /// One integer per distinct spectral value, ascending order.
  std::vector<std::int64_t> phase_integers;
  double epsilon = 0;
  std::uint64_t n_used = 0;
  double worst_case_at_tr = 0;
  PureState witness_state;
  double witness_time = 0;
  double witness_distance = 0;
  Theorem bound_used = Theorem::T1;
  double bound_value = 0;
  /// Discrete only: the bound with the non-integer pi / max_R as base step.
  std::optional<double> bound_value_literal;
  TileMethod method = TileMethod::simplex_hull;
  std::uint64_t q_bound = 1;
  /// max over pairs of |(E_j - E_k) t_r - 2pi (l_j - l_k)|; must not exceed 2 eps.
  double max_phase_error = 0;
  bool bound_exceeded = false;
  Precision precision_used = Precision::extended;
};

namespace detail {

inline long double phase_error(const Spectrum& s, std::size_t j, std::size_t k, double t,
                               std::int64_t lj, std::int64_t lk) {
  auto vals = s.distinct_values();
  long double diff = static_cast<long double>(vals[j]) - static_cast<long double>(vals[k]);
  return std::abs(diff * static_cast<long double>(t) -
                  2 * std::numbers::pi_v<long double> * static_cast<long double>(lj - lk));
}

inline double max_phase_error(const Spectrum& s, double t, std::span<const std::int64_t> l) {
  long double worst = 0;
  for (std::size_t j = 0; j < l.size(); ++j)
    for (std::size_t k = j + 1; k < l.size(); ++k) worst = std::max(worst, phase_error(s, j, k, t, l[j], l[k]));
  return static_cast<double>(worst);
}

inline Theorem theorem_for(TimeMode mode, TileMethod method, std::size_t d) {
  if (mode == TimeMode::continuous) {
    switch (method) {
      case TileMethod::hypercube: return Theorem::T1;
      case TileMethod::two_cube: return d >= 3 ? Theorem::T3a : Theorem::T1;
      case TileMethod::simplex_hull: return Theorem::T3b;
    }
  }
  switch (method) {
    case TileMethod::hypercube: return Theorem::T2;
    case TileMethod::two_cube: return Theorem::T4a;
    case TileMethod::simplex_hull: return Theorem::T4b;
  }
  return Theorem::T1;
}

}  // namespace detail

/// Theorem bound as (certified value, literal value). They differ only in
/// discrete time, where the certified value uses the integer base step.
inline std::pair<double, double> theorem_bound(const Spectrum& s, const Epsilon& eps, Theorem th) {
  const std::size_t d = s.d();
  if (s.mode() == TimeMode::continuous) {
    switch (th) {
      case Theorem::T1: {
        auto r = bound_T1(s.max_value(), s.min_value(), d, eps);
        return {r.value, r.value};
      }
      case Theorem::T3a: {
        auto r = bound_T3(s.max_value(), s.min_value(), d, eps).first;
        return {r.value, r.value};
      }
      case Theorem::T3b: {
        auto r = bound_T3(s.max_value(), s.min_value(), d, eps).second;
        return {r.value, r.value};
      }
      default: throw PreconditionError("theorem does not apply to continuous time");
    }
  }
  const double max_r = detail::max_circle_pair(s).distance;
  const auto m0 = static_cast<double>(discrete_base_step(s));
  BoundReport r;
  switch (th) {
    case Theorem::T2: r = bound_T2(max_r, d, eps); break;
    case Theorem::T4a: r = bound_T4(max_r, d, eps).first; break;
    case Theorem::T4b: r = bound_T4(max_r, d, eps).second; break;
    default: throw PreconditionError("theorem does not apply to discrete time");
  }
  double certified = static_cast<double>(static_cast<long double>(m0) * to_long_double(r.factor));
  return {certified, r.value};
}

/// Smallest applicable closed-form bound for this spectrum (certified variant).
inline std::pair<Theorem, double> min_theorem_bound(const Spectrum& s, const Epsilon& eps) {
  std::vector<Theorem> cands;
  if (s.mode() == TimeMode::continuous) {
    cands = {Theorem::T1, Theorem::T3b};
    if (s.d() >= 3) cands.push_back(Theorem::T3a);
  } else {
    cands = {Theorem::T2, Theorem::T4a, Theorem::T4b};
  }
  std::pair<Theorem, double> best{cands.front(), theorem_bound(s, eps, cands.front()).first};
  for (auto th : cands) {
    double v = theorem_bound(s, eps, th).first;
    if (v < best.second) best = {th, v};
  }
  return best;
}

/// Build a certified recurrence time t_r = q t0 (or m_r = q m0) with the
/// pairwise phase condition |(E_j - E_k) t_r - 2pi (l_j - l_k)| <= 2 eps.
inline RecurrenceCertificate find_recurrence_constructive(const Spectrum& s, const Epsilon& eps,
                                                          TileMethod method = TileMethod::simplex_hull,
                                                          Precision start = Precision::extended) {
  s.require_recurrence_ready();
  const std::size_t d = s.d();
  RecurrenceCertificate cert;
  cert.mode = s.mode();
  cert.method = method;
  cert.epsilon = eps.value();

  auto witness = witness_nontrivial(s, eps);
  const std::uint64_t n = eps.ceil_pi_over();
  cert.n_used = n;

  std::vector<Rational> alphas;
  std::optional<IntegerPair> pair;
  long double span_ld = 1;
  if (s.mode() == TimeMode::continuous) {
    if (s.has_exact()) {
      auto ex = s.exact_distinct();
      Rational span = ex.back() - ex.front();
      for (const auto& r : ex) alphas.push_back((r - ex.front()) / span);
    } else {
      auto vals = s.distinct_values();
      const double span = s.spread();
      for (double v : vals) alphas.push_back(to_rational((v - vals.front()) / span));
    }
    pair = IntegerPair{d - 1, 0};
    span_ld = static_cast<long double>(s.max_value()) - static_cast<long double>(s.min_value());
    cert.base_time = static_cast<double>(2 * std::numbers::pi_v<long double> / span_ld);
  } else {
    const std::uint64_t m0 = discrete_base_step(s);
    if (s.has_exact()) {
      auto ex = s.exact_distinct();
      for (const auto& r : ex) alphas.push_back((r - ex.front()) * Rational(BigInt(m0)));
    } else {
      auto vals = s.distinct_values();
      for (double v : vals) {
        long double a = (static_cast<long double>(v) - vals.front()) * static_cast<long double>(m0) /
                        (2 * std::numbers::pi_v<long double>);
        alphas.push_back(to_rational(static_cast<double>(a)));
      }
    }
    cert.base_time = static_cast<double>(m0);
  }

  auto approx = diff_approx(std::span<const Rational>(alphas), n, method, pair, start);
  cert.multiplier = approx.q;
  cert.phase_integers = approx.l;
  cert.q_bound = approx.q_bound;
  cert.bound_exceeded = approx.bound_exceeded;
  cert.precision_used = approx.precision_used;
  // Same evaluation order as the theorem bounds, so a q equal to the bound's
  // factor gives a bit-identical time.
  cert.recurrence_time =
      s.mode() == TimeMode::continuous
          ? static_cast<double>(2 * std::numbers::pi_v<long double> * static_cast<long double>(approx.q) / span_ld)
          : static_cast<double>(static_cast<long double>(approx.q) * static_cast<long double>(cert.base_time));

  cert.max_phase_error = detail::max_phase_error(s, cert.recurrence_time, cert.phase_integers);
  if (cert.max_phase_error > 2 * cert.epsilon + Tolerances::num)
    throw InternalError("constructed time violates the pairwise phase condition");

  cert.worst_case_at_tr = worst_case_trace_distance(s, cert.recurrence_time);
  if (cert.worst_case_at_tr > cert.epsilon + Tolerances::num)
    throw InternalError("constructed time leaves some state farther than epsilon");

  cert.witness_state = witness.state;
  cert.witness_time = witness.time;
  cert.witness_distance = witness.distance;

  cert.bound_used = detail::theorem_for(s.mode(), method, d);
  auto [certified, literal] = theorem_bound(s, eps, cert.bound_used);
  cert.bound_value = certified;
  if (s.mode() == TimeMode::discrete) cert.bound_value_literal = literal;
  return cert;
}

/// Runs every tiling and keeps the certificate with the smallest multiplier
/// (first method in declaration order on ties).
inline RecurrenceCertificate find_recurrence_best(const Spectrum& s, const Epsilon& eps,
                                                  Precision start = Precision::extended) {
  std::optional<RecurrenceCertificate> best;
  for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
    auto c = find_recurrence_constructive(s, eps, m, start);
    if (!best || c.multiplier < best->multiplier) best = std::move(c);
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Verification

enum class CertificateClause {
  mode,
  epsilon_range,
  phase_integer_count,
  multiplier,
  base_ordering,
  theorem_bound,
  integer_time,
  phase_condition,
  worst_case,
  witness_dimension,
  witness_ordering,
  witness_excursion,
};

inline const char* to_string(CertificateClause c) {
  switch (c) {
    case CertificateClause::mode: return "mode";
    case CertificateClause::epsilon_range: return "epsilon_range";
    case CertificateClause::phase_integer_count: return "phase_integer_count";
    case CertificateClause::multiplier: return "multiplier";
    case CertificateClause::base_ordering: return "base_ordering";
    case CertificateClause::theorem_bound: return "theorem_bound";
    case CertificateClause::integer_time: return "integer_time";
    case CertificateClause::phase_condition: return "phase_condition";
    case CertificateClause::worst_case: return "worst_case";
    case CertificateClause::witness_dimension: return "witness_dimension";
    case CertificateClause::witness_ordering: return "witness_ordering";
    case CertificateClause::witness_excursion: return "witness_excursion";
  }
  return "?";
}

struct Violation {
  CertificateClause clause;
  std::string detail;
};

struct CertificateCheck {
  bool ok = true;
  std::vector<Violation> violations;
  [[nodiscard]] bool has(CertificateClause c) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.clause == c; });
  }
};

/// Re-derives every certificate clause from the spectrum alone.
inline CertificateCheck verify_certificate(const RecurrenceCertificate& cert, const Spectrum& s) {
  CertificateCheck out;
  auto fail = [&](CertificateClause c, std::string msg) {
    out.ok = false;
    out.violations.push_back({c, std::move(msg)});
  };
  const double eta = Tolerances::num;
  const double rel = 1e-12;

  if (cert.mode != s.mode()) fail(CertificateClause::mode, "certificate mode differs from spectrum mode");
  const bool eps_ok = cert.mode == TimeMode::continuous ? (cert.epsilon > 0 && cert.epsilon < 1)
                                                        : (cert.epsilon > 0 && cert.epsilon <= 0.5);
  if (!eps_ok) fail(CertificateClause::epsilon_range, "epsilon outside the theorem's range");

  const double tr = cert.recurrence_time;
  const double expected = static_cast<double>(static_cast<long double>(cert.multiplier) * cert.base_time);
  if (cert.multiplier < 1 || std::abs(tr - expected) > rel * std::max(1.0, std::abs(expected)))
    fail(CertificateClause::multiplier, "recurrence_time != multiplier * base_time");
  if (!(cert.base_time <= tr * (1 + rel)))
    fail(CertificateClause::base_ordering, "base_time exceeds recurrence_time");
  if (!(tr <= cert.bound_value * (1 + rel)))
    fail(CertificateClause::theorem_bound, "recurrence_time exceeds the theorem bound");
  if (cert.mode == TimeMode::discrete && (!detail::is_integer(tr) || !detail::is_integer(cert.witness_time) ||
                                          !detail::is_integer(cert.base_time)))
    fail(CertificateClause::integer_time, "discrete times must be integers");

  if (cert.phase_integers.size() != s.d()) {
    fail(CertificateClause::phase_integer_count, "one phase integer per distinct value is required");
  } else {
    double err = detail::max_phase_error(s, tr, cert.phase_integers);
    if (err > 2 * cert.epsilon + eta)
      fail(CertificateClause::phase_condition,
           "max pairwise phase error " + std::to_string(err) + " > 2 eps");
  }

  double worst = worst_case_trace_distance(s, tr);
  if (worst > cert.epsilon + eta)
    fail(CertificateClause::worst_case, "worst-case distance " + std::to_string(worst) + " > eps");

  if (cert.witness_state.size() != s.dimension()) {
    fail(CertificateClause::witness_dimension, "witness state dimension mismatch");
  } else {
    if (!(cert.witness_time < tr))
      fail(CertificateClause::witness_ordering, "witness_time must be strictly before recurrence_time");
    if (!(cert.witness_time >= 0)) fail(CertificateClause::witness_ordering, "witness_time is negative");
    double wd = trace_distance_pure(cert.witness_state, s, cert.witness_time);
    if (!(wd > cert.epsilon))
      fail(CertificateClause::witness_excursion, "witness distance " + std::to_string(wd) + " <= eps");
  }
  return out;
}

}  // namespace recur
