#pragma once

// Finite spectra, pure and mixed states over an eigenbasis, and the trace
// distance between an initial state and its time evolution.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recur/errors.hpp"
#include "recur/exact.hpp"

namespace recur {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerances. Deduplication is relative, the others absolute.
struct Tolerances {
  static constexpr double dedup = 1e-12;
  static constexpr double norm = 1e-9;
  static constexpr double num = 1e-9;
};

/// Largest raw dimension accepted by the dense mixed-state routine.
inline constexpr std::size_t kMaxMixedDimension = 256;

enum class TimeMode { continuous, discrete };

inline const char* to_string(TimeMode m) {
  return m == TimeMode::continuous ? "continuous" : "discrete";
}

inline TimeMode time_mode_from_string(const std::string& s) {
  if (s == "continuous") return TimeMode::continuous;
  if (s == "discrete") return TimeMode::discrete;
  throw PreconditionError("unknown mode '" + s + "' (expected continuous|discrete)");
}

/// Reduce an angle into [0, 2pi).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Energies (continuous time) or eigenphases (discrete time) of the evolution
/// generator. Immutable after construction.
class Spectrum {
 public:
  [[nodiscard]] TimeMode mode() const { return mode_; }
  [[nodiscard]] std::span<const double> raw_values() const { return raw_; }
  [[nodiscard]] std::span<const double> distinct_values() const { return distinct_; }
  [[nodiscard]] std::span<const std::size_t> degeneracy_map() const { return degeneracy_; }

  /// Number of distinct values.
  [[nodiscard]] std::size_t d() const { return distinct_.size(); }
  /// Hilbert space dimension (number of raw values).
  [[nodiscard]] std::size_t dimension() const { return raw_.size(); }

  [[nodiscard]] double min_value() const { return distinct_.front(); }
  [[nodiscard]] double max_value() const { return distinct_.back(); }
  [[nodiscard]] double spread() const { return max_value() - min_value(); }

  /// Exact distinct values, when the spectrum was built from rationals. In
  /// continuous mode these are energies divided by the common scale; in
  /// discrete mode they are phases in turns, in [0, 1).
  [[nodiscard]] bool has_exact() const { return !exact_distinct_.empty(); }
  [[nodiscard]] std::span<const Rational> exact_distinct() const { return exact_distinct_; }
  [[nodiscard]] std::optional<double> scale() const { return scale_; }

  /// Phase acquired by eigenvalue `value` after time t, so that an eigenstate
  /// evolves as exp(i * phase).
  [[nodiscard]] double phase(double value, double t) const {
    return mode_ == TimeMode::continuous ? -value * t : value * t;
  }

  /// Raw index of the first eigenvector carrying distinct value k.
  [[nodiscard]] std::size_t representative(std::size_t distinct_index) const {
    for (std::size_t i = 0; i < degeneracy_.size(); ++i)
      if (degeneracy_[i] == distinct_index) return i;
    throw InternalError("degeneracy map is not surjective");
  }

  void require_recurrence_ready() const {
    if (d() < 2)
      throw PreconditionError("recurrence analysis needs at least 2 distinct spectral values, got " +
                              std::to_string(d()));
  }

 private:
  friend Spectrum make_spectrum(std::span<const double>, TimeMode);
  friend Spectrum make_spectrum_exact(std::span<const Rational>, TimeMode, std::optional<double>);

  TimeMode mode_ = TimeMode::continuous;
  std::vector<double> raw_;
  std::vector<double> distinct_;
  std::vector<std::size_t> degeneracy_;
  std::vector<Rational> exact_distinct_;
  std::optional<double> scale_;
};

namespace detail {

inline bool nearly_equal(double a, double b, TimeMode mode) {
  if (mode == TimeMode::discrete) {
    double diff = std::abs(a - b);
    return std::min(diff, kTwoPi - diff) <= Tolerances::dedup * kTwoPi;
  }
  return std::abs(a - b) <= Tolerances::dedup * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

/// Build a spectrum from floating values. Discrete phases are reduced mod 2pi
/// before deduplication.
inline Spectrum make_spectrum(std::span<const double> values, TimeMode mode) {
  if (values.empty()) throw PreconditionError("spectrum needs at least one value");
  Spectrum s;
  s.mode_ = mode;
  s.raw_.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("spectrum values must be finite");
    s.raw_.push_back(mode == TimeMode::discrete ? wrap_angle(v) : v);
  }
  if (mode == TimeMode::discrete) {
    // Phases within the dedup tolerance of 2pi belong to 0.
    for (double& v : s.raw_)
      if (kTwoPi - v <= Tolerances::dedup * kTwoPi) v = 0.0;
  }

  std::vector<std::size_t> order(s.raw_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.raw_[a] < s.raw_[b]; });

  s.degeneracy_.assign(s.raw_.size(), 0);
  for (std::size_t idx : order) {
    double v = s.raw_[idx];
    if (s.distinct_.empty() || !detail::nearly_equal(s.distinct_.back(), v, mode))
      s.distinct_.push_back(v);
    s.degeneracy_[idx] = s.distinct_.size() - 1;
  }
  return s;
}

inline Spectrum make_spectrum(std::initializer_list<double> values, TimeMode mode) {
  return make_spectrum(std::span<const double>(values.begin(), values.size()), mode);
}

/// Build a spectrum from exact rationals. Continuous: energy_k = scale * r_k
/// (scale defaults to 1). Discrete: r_k is a phase in turns, phase = 2pi * r_k
/// reduced mod 1; an explicit scale switches to radians = scale * r_k and drops
/// exactness.
inline Spectrum make_spectrum_exact(std::span<const Rational> values, TimeMode mode,
                                    std::optional<double> scale = std::nullopt) {
  if (values.empty()) throw PreconditionError("spectrum needs at least one value");
  if (scale && !(std::isfinite(*scale) && *scale > 0))
    throw PreconditionError("spectrum scale must be a positive finite number");

  if (mode == TimeMode::discrete && scale) {
    std::vector<double> v;
    for (const auto& r : values) v.push_back(*scale * to_double(r));
    Spectrum s = make_spectrum(v, mode);
    s.scale_ = scale;
    return s;
  }

  std::vector<Rational> reduced(values.begin(), values.end());
  if (mode == TimeMode::discrete)
    for (auto& r : reduced) r -= Rational(floor(r));

  std::vector<std::size_t> order(reduced.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reduced[a] < reduced[b]; });

  Spectrum s;
  s.mode_ = mode;
  s.scale_ = scale;
  double unit = mode == TimeMode::discrete ? kTwoPi : scale.value_or(1.0);
  s.raw_.resize(reduced.size());
  s.degeneracy_.assign(reduced.size(), 0);
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    double v = static_cast<double>(static_cast<long double>(unit) * to_long_double(reduced[i]));
    s.raw_[i] = mode == TimeMode::discrete ? wrap_angle(v) : v;
  }
  for (std::size_t idx : order) {
    if (s.exact_distinct_.empty() || s.exact_distinct_.back() != reduced[idx]) {
      s.exact_distinct_.push_back(reduced[idx]);
      s.distinct_.push_back(s.raw_[idx]);
    }
    s.degeneracy_[idx] = s.distinct_.size() - 1;
  }
  return s;
}

/// Amplitudes over the raw eigenbasis, normalized on construction.
class PureState {
 public:
  PureState() = default;
  explicit PureState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw PreconditionError("state needs at least one amplitude");
    double norm2 = 0;
    for (const auto& c : amplitudes_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw PreconditionError("state amplitudes must be finite");
      norm2 += std::norm(c);
    }
    if (norm2 <= 0) throw PreconditionError("state has zero norm");
    if (std::abs(norm2 - 1.0) > Tolerances::norm) {
      renormalized_ = true;
      double scale = 1.0 / std::sqrt(norm2);
      for (auto& c : amplitudes_) c *= scale;
    }
  }

  /// Equal superposition of two raw basis vectors.
  static PureState equal_pair(std::size_t dimension, std::size_t a, std::size_t b) {
    std::vector<Complex> amps(dimension, Complex{0, 0});
    amps.at(a) = Complex{(1.0 / std::numbers::sqrt2), 0};
    amps.at(b) = Complex{(1.0 / std::numbers::sqrt2), 0};
    return PureState(std::move(amps));
  }

  static PureState basis(std::size_t dimension, std::size_t k) {
    std::vector<Complex> amps(dimension, Complex{0, 0});
    amps.at(k) = Complex{1, 0};
    return PureState(std::move(amps));
  }

  [[nodiscard]] std::span<const Complex> amplitudes() const { return amplitudes_; }
  [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
  /// True when the input norm was off by more than the normalization tolerance.
  [[nodiscard]] bool renormalized() const { return renormalized_; }

  [[nodiscard]] std::vector<double> probabilities() const {
    std::vector<double> p;
    p.reserve(amplitudes_.size());
    for (const auto& c : amplitudes_) p.push_back(std::norm(c));
    return p;
  }

 private:
  std::vector<Complex> amplitudes_;
  bool renormalized_ = false;
};

/// Convex mixture of pure states.
class MixedEnsemble {
 public:
  struct Component {
    double probability;
    PureState state;
  };

  explicit MixedEnsemble(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw PreconditionError("ensemble needs at least one component");
    double total = 0;
    for (const auto& c : components_) {
      if (!(c.probability >= 0)) throw PreconditionError("ensemble probabilities must be >= 0");
      if (c.state.size() != components_.front().state.size())
        throw PreconditionError("ensemble components have different dimensions");
      total += c.probability;
    }
    if (total <= 0) throw PreconditionError("ensemble probabilities sum to zero");
    if (std::abs(total - 1.0) > Tolerances::norm) {
      renormalized_ = true;
      for (auto& c : components_) c.probability /= total;
    }
  }

  [[nodiscard]] std::span<const Component> components() const { return components_; }
  [[nodiscard]] std::size_t dimension() const { return components_.front().state.size(); }
  [[nodiscard]] bool renormalized() const { return renormalized_; }

 private:
  std::vector<Component> components_;
  bool renormalized_ = false;
};

namespace detail {

inline void require_dimension(std::size_t state_dim, const Spectrum& s) {
  if (state_dim != s.dimension())
    throw PreconditionError("state dimension " + std::to_string(state_dim) +
                            " does not match spectrum dimension " + std::to_string(s.dimension()));
}

}  // namespace detail

/// <psi(t)|psi(0)> = sum_k |c_k|^2 exp(-i phase_k(t)).
inline Complex survival_amplitude(const PureState& state, const Spectrum& s, double t) {
  detail::require_dimension(state.size(), s);
  auto raw = s.raw_values();
  Complex sum{0, 0};
  for (std::size_t k = 0; k < raw.size(); ++k)
    sum += std::norm(state.amplitudes()[k]) * std::polar(1.0, -s.phase(raw[k], t));
  return sum;
}

/// sqrt(1 - |A|^2) with A the survival amplitude. Written as u (2 - u) - Im(A)^2,
/// u = 1 - Re(A) = sum p_k 2 sin^2(phase_k / 2), so it stays accurate near
/// recurrences where |A| is close to 1.
inline double trace_distance_pure(const PureState& state, const Spectrum& s, double t) {
  detail::require_dimension(state.size(), s);
  auto raw = s.raw_values();
  double total = 0, u = 0, im = 0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const double p = std::norm(state.amplitudes()[k]);
    const double ph = s.phase(raw[k], t);
    const double h = std::sin(ph / 2);
    total += p;
    u += p * 2 * h * h;
    im -= p * std::sin(ph);
  }
  u /= total;
  im /= total;
  return std::sqrt(std::clamp(u * (2 - u) - im * im, 0.0, 1.0));
}

/// Half the trace norm of rho(t) - rho(0), with rho built in the eigenbasis.
inline double trace_distance_mixed(const MixedEnsemble& e, const Spectrum& s, double t) {
  const std::size_t dim = e.dimension();
  detail::require_dimension(dim, s);
  if (dim > kMaxMixedDimension)
    throw PreconditionError("mixed-state dimension exceeds " + std::to_string(kMaxMixedDimension));

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
  for (const auto& comp : e.components()) {
    Eigen::Map<const Eigen::VectorXcd> psi(comp.state.amplitudes().data(),
                                           static_cast<Eigen::Index>(dim));
    rho.noalias() += comp.probability * psi * psi.adjoint();
  }

  auto raw = s.raw_values();
  Eigen::MatrixXcd diff(rho.rows(), rho.cols());
  for (Eigen::Index j = 0; j < rho.rows(); ++j)
    for (Eigen::Index k = 0; k < rho.cols(); ++k) {
      double phase = s.phase(raw[static_cast<std::size_t>(j)], t) -
                     s.phase(raw[static_cast<std::size_t>(k)], t);
      diff(j, k) = rho(j, k) * std::polar(1.0, phase) - rho(j, k);
    }

  double residue = (diff - diff.adjoint()).cwiseAbs().maxCoeff();
  if (residue > Tolerances::num)
    throw InternalError("density difference is not Hermitian (residue " + std::to_string(residue) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw InternalError("Hermitian eigensolver did not converge");
  return std::clamp(0.5 * solver.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

/// Distance on the circle, in [0, pi]. Inputs outside [0, 2pi) are reduced
/// mod 2pi rather than rejected.
inline double circle_distance(double theta1, double theta2) {
  double diff = std::abs(wrap_angle(theta1) - wrap_angle(theta2));
  return std::min(diff, kTwoPi - diff);
}

}  // namespace recur
