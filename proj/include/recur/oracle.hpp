#pragma once

// Brute-force and Monte Carlo reference implementations. None of these share
// code paths with the constructive routines they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "recur/diophantine.hpp"
#include "recur/errors.hpp"
#include "recur/exact.hpp"
#include "recur/recurrence.hpp"
#include "recur/spectrum.hpp"

namespace recur {

/// Counter-based generator: every draw is SplitMix64 applied to
/// (seed, stream, counter), so sample i of a run is reproducible on its own
/// regardless of how work is split across threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    return mix(mix(mix(seed_) ^ stream_) ^ counter_++);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

/// Haar-distributed pure state: normalized complex Gaussian vector.
inline PureState random_pure_state(std::size_t dimension, CounterRng& rng) {
  std::vector<Complex> amps(dimension);
  for (auto& a : amps) a = Complex{rng.normal(), rng.normal()};
  return PureState(std::move(amps));
}

// ---------------------------------------------------------------------------

struct BruteApproximation {
  std::uint64_t q = 0;
  std::vector<std::int64_t> l;
};

/// Smallest q in [1, max_q] for which nearest-integer l (with l_1 = 0)
/// satisfy |(alpha_i - alpha_j) q - (l_i - l_j)| < 1/N for every pair.
inline std::optional<BruteApproximation> brute_min_q(std::span<const double> alphas, std::uint64_t n,
                                                     std::uint64_t max_q) {
  if (max_q < 1) throw PreconditionError("brute_min_q needs M_max >= 1");
  if (alphas.empty()) throw PreconditionError("brute_min_q needs at least one alpha");
  const std::size_t d = alphas.size();
  std::vector<Rational> exact;
  for (double a : alphas) exact.push_back(to_rational(a));
  const long double limit = 1.0L / static_cast<long double>(n);
  std::vector<std::int64_t> l(d);
  std::vector<long double> err(d);
  for (std::uint64_t q = 1; q <= max_q; ++q) {
    for (std::size_t i = 0; i < d; ++i) {
      long double v = (static_cast<long double>(alphas[i]) - alphas[0]) * static_cast<long double>(q);
      l[i] = static_cast<std::int64_t>(std::llround(v));
      err[i] = v - static_cast<long double>(l[i]);
    }
    auto [lo, hi] = std::minmax_element(err.begin(), err.end());
    long double spread = *hi - *lo;
    if (spread >= limit + 1e-12L) continue;
    if (spread < limit - 1e-12L) return BruteApproximation{q, l};
    // Too close to call in extended precision: decide exactly.
    Rational lim(BigInt(1), BigInt(n));
    bool ok = true;
    for (std::size_t i = 0; i < d && ok; ++i)
      for (std::size_t j = i + 1; j < d && ok; ++j) {
        Rational e = (exact[i] - exact[j]) * Rational(BigInt(q)) - Rational(BigInt(l[i] - l[j]));
        if (e < 0) e = -e;
        ok = e < lim;
      }
    if (ok) return BruteApproximation{q, l};
  }
  return std::nullopt;
}

inline std::optional<BruteApproximation> brute_min_q(std::initializer_list<double> alphas, std::uint64_t n,
                                                     std::uint64_t max_q) {
  return brute_min_q(std::span<const double>(alphas.begin(), alphas.size()), n, max_q);
}

// ---------------------------------------------------------------------------

struct ScanSample {
  double time;
  double worst_case;
};

struct ScanReport {
  double grid_step = 0;
  double t_max = 0;
  double epsilon = 0;
  std::optional<double> first_recurrence;
  std::optional<double> first_excursion;
  bool excursion_seen = false;
  std::vector<ScanSample> samples;
};

/// System recurrence checked on a uniform grid (integer steps in discrete time):
/// the earliest grid time with worst case <= eps after a grid time with worst
/// case > eps.
inline ScanReport scan_first_recurrence(const Spectrum& s, double eps, double t_step, double t_max) {
  if (!(eps >= 0 && eps < 1)) throw PreconditionError("epsilon must satisfy 0 <= eps < 1");
  if (s.mode() == TimeMode::discrete && t_step != 1.0)
    throw PreconditionError("discrete scans use a step of exactly 1");
  if (!(t_step > 0)) throw PreconditionError("grid step must be positive");
  if (!(t_max >= 0)) throw PreconditionError("t_max must be non-negative");
  ScanReport r;
  r.grid_step = t_step;
  r.t_max = t_max;
  r.epsilon = eps;
  const auto count = static_cast<std::uint64_t>(std::floor(t_max / t_step + 1e-9));
  for (std::uint64_t i = 0; i <= count; ++i) {
    double t = static_cast<double>(i) * t_step;
    double w = worst_case_trace_distance(s, t);
    r.samples.push_back({t, w});
    if (w > eps && !r.excursion_seen) {
      r.excursion_seen = true;
      r.first_excursion = t;
    } else if (w <= eps && r.excursion_seen && !r.first_recurrence) {
      r.first_recurrence = t;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

struct VolumeEstimate {
  double estimate = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Hit-or-miss estimate of vol(T) from uniform samples in [-1/(2N), 1/(2N))^(d-1).
inline VolumeEstimate mc_volume_T(std::size_t d, std::uint64_t n, std::uint64_t samples, std::uint64_t seed) {
  if (d < 2) throw PreconditionError("mc_volume_T needs d >= 2");
  if (n < 1) throw PreconditionError("N must be >= 1");
  if (samples < 1000) throw PreconditionError("mc_volume_T needs at least 1000 samples");
  const std::size_t dim = d - 1;
  const double h = 1.0 / static_cast<double>(2 * n);
  std::vector<double> x(dim);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    for (auto& xi : x) xi = rng.uniform(-h, h);
    if (tile_T_membership<double>(x, n)) ++hits;
  }
  const double box = std::pow(2 * h, static_cast<double>(dim));
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  VolumeEstimate v;
  v.estimate = box * p;
  v.std_error = box * std::sqrt(p * (1 - p) / static_cast<double>(samples));
  v.samples = samples;
  v.seed = seed;
  return v;
}

// ---------------------------------------------------------------------------

/// sqrt of sum_{j,k} p_j p_k (1 - cos(phase_j - phase_k)): the trace distance
/// written as a double sum instead of through the survival amplitude.
inline double trace_distance_double_sum(const PureState& state, const Spectrum& s, double t) {
  auto p = state.probabilities();
  auto raw = s.raw_values();
  if (p.size() != raw.size()) throw PreconditionError("state dimension does not match spectrum");
  double sum = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    for (std::size_t k = 0; k < p.size(); ++k)
      sum += p[j] * p[k] * (1 - std::cos(s.phase(raw[j], t) - s.phase(raw[k], t)));
  return std::sqrt(std::max(0.0, sum));
}

/// Lower estimate of the worst-case trace distance: the maximum over random
/// Haar states and over every equal-weight two-level superposition.
inline double sample_states_sup(const Spectrum& s, double t, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw PreconditionError("sample_states_sup needs at least one sample");
  double best = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    CounterRng rng(seed, i);
    best = std::max(best, trace_distance_pure(random_pure_state(s.dimension(), rng), s, t));
  }
  for (std::size_t j = 0; j < s.d(); ++j)
    for (std::size_t k = j + 1; k < s.d(); ++k) {
      auto st = PureState::equal_pair(s.dimension(), s.representative(j), s.representative(k));
      best = std::max(best, trace_distance_pure(st, s, t));
    }
  return best;
}

}  // namespace recur
