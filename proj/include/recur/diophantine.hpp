#pragma once

// Simultaneous approximation of differences alpha_i - alpha_j by
// (l_i - l_j) / q with error below 1 / (N q), found by the pigeonhole principle
// over three tilings of [0,1)^(d-1): hypercubes of side 1/(2N), the union of
// two stacked hypercubes, and the polytope T that tiles R^(d-1) under the
// translations v^(i) = (1,..,1,2,1,..,1) / (2N). Classical simultaneous
// Dirichlet approximation is provided as a baseline.
//
// Every routine is templated on the working number type. Floating results are
// re-verified in exact rational arithmetic against the inputs and recomputed
// at the next precision when the verification fails.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recur/bounds.hpp"
#include "recur/errors.hpp"
#include "recur/exact.hpp"

namespace recur {

enum class TileMethod { hypercube, two_cube, simplex_hull };

inline const char* to_string(TileMethod m) {
  switch (m) {
    case TileMethod::hypercube: return "hypercube";
    case TileMethod::two_cube: return "two_cube";
    case TileMethod::simplex_hull: return "simplex_hull";
  }
  return "?";
}

/// Accepts both "two_cube" and "two-cube" spellings.
inline TileMethod tile_method_from_string(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "hypercube") return TileMethod::hypercube;
  if (s == "two_cube") return TileMethod::two_cube;
  if (s == "simplex_hull") return TileMethod::simplex_hull;
  throw PreconditionError("unknown tile method '" + s + "' (expected hypercube|two-cube|simplex-hull)");
}

/// Working precision, in escalation order.
enum class Precision { float64, extended, float50, rational };

inline const char* to_string(Precision p) {
  switch (p) {
    case Precision::float64: return "float";
    case Precision::extended: return "extended";
    case Precision::float50: return "float50";
    case Precision::rational: return "rational";
  }
  return "?";
}

inline Precision precision_from_string(const std::string& s) {
  if (s == "float") return Precision::float64;
  if (s == "extended") return Precision::extended;
  if (s == "float50") return Precision::float50;
  if (s == "rational") return Precision::rational;
  throw PreconditionError("unknown precision '" + s + "' (expected float|extended|rational)");
}

namespace detail {

template <class Real>
std::int64_t floor_i64(const Real& x) {
  if constexpr (std::is_same_v<Real, Rational>) {
    return to_int64(floor(x));
  } else if constexpr (std::is_floating_point_v<Real>) {
    Real f = std::floor(x);
    if (!(f >= static_cast<Real>(std::numeric_limits<std::int64_t>::min()) &&
          f < static_cast<Real>(std::numeric_limits<std::int64_t>::max())))
      throw PreconditionError("value out of 64-bit integer range during tiling");
    return static_cast<std::int64_t>(f);
  } else {
    Real f = boost::multiprecision::floor(x);
    return to_int64(BigInt(f));
  }
}

template <class Real>
Real from_rational(const Rational& r) {
  if constexpr (std::is_same_v<Real, Rational>) {
    return r;
  } else if constexpr (std::is_floating_point_v<Real>) {
    return r.convert_to<Real>();
  } else {
    return Real(boost::multiprecision::numerator(r)) / Real(boost::multiprecision::denominator(r));
  }
}

template <class Real>
Real half() {
  return Real(1) / Real(2);
}

struct KeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Fractional decomposition

template <class Real>
struct BasicFractionalDecomposition {
  /// order[0] is the index of the smallest alpha; x[j], k[j] belong to order[j+1].
  std::vector<std::size_t> order;
  std::vector<Real> x;
  std::vector<std::int64_t> k;
};

using FractionalDecomposition = BasicFractionalDecomposition<double>;

/// Ascending order of alphas, ties kept in input order.
template <class Real>
std::vector<std::size_t> ascending_order(std::span<const Real> alphas) {
  std::vector<std::size_t> order(alphas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return alphas[a] < alphas[b]; });
  return order;
}

/// (alpha_i - alpha_min) m = x_i + k_i with 0 <= x_i < 1 and k_i integer.
template <class Real>
BasicFractionalDecomposition<Real> fractional_decompose(std::span<const Real> alphas, std::uint64_t m) {
  if (alphas.empty()) throw PreconditionError("fractional_decompose needs at least one alpha");
  BasicFractionalDecomposition<Real> out;
  out.order = ascending_order(alphas);
  const Real& ref = alphas[out.order.front()];
  for (std::size_t j = 1; j < out.order.size(); ++j) {
    Real v = (alphas[out.order[j]] - ref) * Real(m);
    std::int64_t k = detail::floor_i64(v);
    Real x = v - Real(k);
    out.k.push_back(k);
    out.x.push_back(x);
  }
  return out;
}

inline FractionalDecomposition fractional_decompose(std::initializer_list<double> alphas, std::uint64_t m) {
  return fractional_decompose(std::span<const double>(alphas.begin(), alphas.size()), m);
}

// ---------------------------------------------------------------------------
// Hypercube tiles

/// index_i = floor(2N x_i).
template <class Real>
std::vector<std::int64_t> tile_index_hypercube(std::span<const Real> x, std::uint64_t n) {
  if (n < 1) throw PreconditionError("N must be >= 1");
  std::vector<std::int64_t> idx;
  idx.reserve(x.size());
  for (const auto& xi : x) idx.push_back(detail::floor_i64(Real(2 * n) * xi));
  return idx;
}

inline std::vector<std::int64_t> tile_index_hypercube(std::initializer_list<double> x, std::uint64_t n) {
  return tile_index_hypercube(std::span<const double>(x.begin(), x.size()), n);
}

// ---------------------------------------------------------------------------
// Two-cube tiles: P = [0,h)^D u [h,2h)^D, h = 1/(2N), translated by
// A = { h sum_{k<D} a_k e_k : a_k in {-1,..,2N-1} } and B = { (b/N) e_D : b < N }.
// For D = 1 the tiles are the intervals [b/N, (b+1)/N).

struct TwoCubeTile {
  /// Translation offsets a_1..a_{D-1}, each in {-1, .., 2N-1}.
  std::vector<std::int64_t> a_offsets;
  /// Flattened id in [0, (2N+1)^(D-1)).
  std::uint64_t a_id = 0;
  /// Id in B, in [0, N).
  std::uint64_t b_id = 0;
  /// Whether the point falls in the upper cube [h,2h)^D of the tile.
  bool upper = false;
};

template <class Real>
TwoCubeTile tile_index_two_cube(std::span<const Real> x, std::uint64_t n) {
  if (n < 1) throw PreconditionError("N must be >= 1");
  if (x.empty()) throw PreconditionError("two-cube tiling needs at least one coordinate");
  TwoCubeTile t;
  const std::size_t dim = x.size();
  if (dim == 1) {
    std::int64_t b = detail::floor_i64(Real(n) * x[0]);
    if (b < 0 || b >= static_cast<std::int64_t>(n))
      throw PreconditionError("point outside the two-cube covered region");
    t.b_id = static_cast<std::uint64_t>(b);
    return t;
  }
  Real y_last = Real(2 * n) * x[dim - 1];
  std::int64_t b = detail::floor_i64(y_last / Real(2));
  Real r = y_last - Real(2 * b);
  t.upper = r >= Real(1);
  if (b < 0 || b >= static_cast<std::int64_t>(n))
    throw PreconditionError("point outside the two-cube covered region");
  t.b_id = static_cast<std::uint64_t>(b);
  const auto radix = static_cast<std::uint64_t>(2 * n + 1);
  t.a_offsets.resize(dim - 1);
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    std::int64_t a = detail::floor_i64(Real(2 * n) * x[i]) - (t.upper ? 1 : 0);
    if (a < -1 || a > static_cast<std::int64_t>(2 * n) - 1)
      throw PreconditionError("point outside the two-cube covered region");
    t.a_offsets[i] = a;
  }
  // Mixed radix, first offset least significant.
  for (std::size_t i = t.a_offsets.size(); i-- > 0;)
    t.a_id = t.a_id * radix + static_cast<std::uint64_t>(t.a_offsets[i] + 1);
  return t;
}

inline TwoCubeTile tile_index_two_cube(std::initializer_list<double> x, std::uint64_t n) {
  return tile_index_two_cube(std::span<const double>(x.begin(), x.size()), n);
}

/// Lower corner of a two-cube tile (the translation applied to P).
inline std::vector<double> two_cube_origin(const TwoCubeTile& t, std::size_t dim, std::uint64_t n) {
  std::vector<double> o(dim, 0.0);
  if (dim == 1) {
    o[0] = static_cast<double>(t.b_id) / static_cast<double>(n);
    return o;
  }
  for (std::size_t i = 0; i + 1 < dim; ++i)
    o[i] = static_cast<double>(t.a_offsets[i]) / static_cast<double>(2 * n);
  o[dim - 1] = static_cast<double>(t.b_id) / static_cast<double>(n);
  return o;
}

/// Membership in the untranslated region P (or [0, 1/N) when D = 1).
inline bool two_cube_membership(std::span<const double> r, std::uint64_t n) {
  if (r.size() == 1) return r[0] >= 0 && r[0] * static_cast<double>(n) < 1;
  auto in_cube = [&](double lo, double hi) {
    return std::all_of(r.begin(), r.end(), [&](double v) {
      double y = v * static_cast<double>(2 * n);
      return y >= lo && y < hi;
    });
  };
  return in_cube(0, 1) || in_cube(1, 2);
}

// ---------------------------------------------------------------------------
// Polytope T = { x : -h <= x_i < h, -h <= x_j - x_i < h for j > i }, h = 1/(2N).

template <class Real>
bool tile_T_membership(std::span<const Real> x, std::uint64_t n) {
  if (n < 1) throw PreconditionError("N must be >= 1");
  std::vector<Real> y;
  y.reserve(x.size());
  for (const auto& xi : x) y.push_back(Real(2 * n) * xi);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < Real(-1) || !(y[i] < Real(1))) return false;
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      Real diff = y[j] - y[i];
      if (diff < Real(-1) || !(diff < Real(1))) return false;
    }
  }
  return true;
}

inline bool tile_T_membership(std::initializer_list<double> x, std::uint64_t n) {
  return tile_T_membership(std::span<const double>(x.begin(), x.size()), n);
}

template <class Real>
struct BasicTileDecomposition {
  std::vector<std::int64_t> n;
  /// 2N x = sum_i (n_i + beta_i) v^(i)
  std::vector<Real> beta;
  std::uint64_t N = 1;
};

using TileDecomposition = BasicTileDecomposition<double>;

namespace detail {

// Scaled residual 2N r = beta + (sum beta) 1; membership in T in beta terms.
template <class Real>
bool beta_in_T(const std::vector<Real>& beta) {
  Real sum(0);
  for (const auto& b : beta) sum += b;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    Real y = beta[i] + sum;
    if (y < Real(-1) || !(y < Real(1))) return false;
    for (std::size_t j = i + 1; j < beta.size(); ++j) {
      Real diff = beta[j] - beta[i];
      if (diff < Real(-1) || !(diff < Real(1))) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Residual x - sum_i n_i v^(i) / (2N).
template <class Real>
std::vector<Real> tile_T_residual(std::span<const Real> x, std::span<const std::int64_t> nvec,
                                  std::uint64_t n) {
  if (x.size() != nvec.size()) throw PreconditionError("translation vector has wrong dimension");
  std::int64_t total = 0;
  for (auto v : nvec) total += v;
  std::vector<Real> r;
  r.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r.push_back(x[i] - Real(total + nvec[i]) / Real(2 * n));
  return r;
}

/// The unique integer vector n with x - sum n_i v^(i) / (2N) in T.
template <class Real>
BasicTileDecomposition<Real> tile_decompose_T(std::span<const Real> x, std::uint64_t n) {
  if (n < 1) throw PreconditionError("N must be >= 1");
  const std::size_t dim = x.size();
  const std::size_t d = dim + 1;
  BasicTileDecomposition<Real> out;
  out.N = n;
  if (dim == 0) return out;

  // Inverse of (I + 1 1^T): c = y - (sum y) / d, with y = 2N x.
  std::vector<Real> y;
  Real ysum(0);
  for (const auto& xi : x) {
    y.push_back(Real(2 * n) * xi);
    ysum += y.back();
  }
  Real shift = ysum / Real(d);
  out.n.resize(dim);
  out.beta.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    Real c = y[i] - shift;
    // beta in (-1/2, 1/2]
    std::int64_t ni = -detail::floor_i64(Real(-(c - detail::half<Real>())));
    out.n[i] = ni;
    out.beta[i] = c - Real(ni);
  }

  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.beta[a] < out.beta[b]; });
  Real sum(0);
  for (const auto& b : out.beta) sum += b;

  const Real& bmax = out.beta[order.back()];
  const Real& bmin = out.beta[order.front()];
  if (!(bmax + sum < Real(1))) {
    // Smallest (1-based, ascending) j with beta_j + sum >= d - j; shift l >= j down.
    for (std::size_t j = 0; j < dim; ++j) {
      if (out.beta[order[j]] + sum >= Real(static_cast<std::int64_t>(d - (j + 1)))) {
        for (std::size_t l = j; l < dim; ++l) {
          out.beta[order[l]] -= Real(1);
          out.n[order[l]] += 1;
        }
        break;
      }
    }
  } else if (bmin + sum < Real(-1)) {
    // Largest j with beta_j + sum < -j; shift l <= j up.
    for (std::size_t j = dim; j-- > 0;) {
      if (out.beta[order[j]] + sum < Real(-static_cast<std::int64_t>(j + 1))) {
        for (std::size_t l = 0; l <= j; ++l) {
          out.beta[order[l]] += Real(1);
          out.n[order[l]] -= 1;
        }
        break;
      }
    }
  }

  // Strict pairwise condition: beta_j - beta_i < 1 for j > i.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j)
        if (!(out.beta[j] - out.beta[i] < Real(1))) {
          out.beta[j] -= Real(1);
          out.beta[i] += Real(1);
          out.n[j] += 1;
          out.n[i] -= 1;
          changed = true;
        }
  }

  if (detail::beta_in_T(out.beta)) return out;

  // Rounding can push a point that sits on a facet to the wrong side. Search
  // the neighbouring translations for the one whose residual lands in T.
  if constexpr (!std::is_same_v<Real, Rational>) {
    std::vector<std::int64_t> trial(out.n);
    std::vector<int> delta(dim, -1);
    while (true) {
      for (std::size_t i = 0; i < dim; ++i) trial[i] = out.n[i] + delta[i];
      auto r = tile_T_residual<Real>(x, trial, n);
      if (tile_T_membership<Real>(r, n)) {
        out.n = trial;
        for (std::size_t i = 0; i < dim; ++i) out.beta[i] = out.beta[i] - Real(delta[i]);
        return out;
      }
      std::size_t pos = 0;
      while (pos < dim && delta[pos] == 1) delta[pos++] = -1;
      if (pos == dim) break;
      ++delta[pos];
    }
  }
  throw InternalError("T-tile decomposition failed post-verification");
}

inline TileDecomposition tile_decompose_T(std::initializer_list<double> x, std::uint64_t n) {
  return tile_decompose_T(std::span<const double>(x.begin(), x.size()), n);
}

/// Exact hyper-volume d / (2N)^(d-1) of T in R^(d-1).
inline Rational volume_T(std::size_t d, std::uint64_t n) {
  if (d < 2) throw PreconditionError("volume_T needs d >= 2");
  if (n < 1) throw PreconditionError("N must be >= 1");
  return Rational(BigInt(d), ipow(BigInt(2 * n), static_cast<int>(d) - 1));
}

// ---------------------------------------------------------------------------
// Difference approximation

/// alphas[hi] - alphas[lo] is known to be an integer (0-based indices).
struct IntegerPair {
  std::size_t hi = 0;
  std::size_t lo = 0;
};

struct DiffApproximation {
  std::uint64_t q = 1;
  std::vector<std::int64_t> l;
  std::uint64_t N = 1;
  TileMethod method = TileMethod::simplex_hull;
  /// max_{i,j} |(alpha_i - alpha_j) - (l_i - l_j)/q|, always < 1/(N q).
  double max_pair_error = 0;
  std::uint64_t q_bound = 1;
  bool reduced = false;
  std::optional<IntegerPair> integer_pair;
  /// The T-tile count bound is asserted rather than derived; set if ever exceeded.
  bool bound_exceeded = false;
  Precision precision_used = Precision::extended;
  /// Index n of the later point in the colliding pair (q = n - m).
  std::uint64_t collision_step = 0;
  std::size_t d = 0;
};

namespace detail {

inline std::uint64_t method_bound(TileMethod method, std::size_t d_eff, std::uint64_t n) {
  auto b = prop1_q_bounds(d_eff, n);
  switch (method) {
    case TileMethod::hypercube: return b.hypercube;
    case TileMethod::two_cube: return b.two_cube;
    case TileMethod::simplex_hull: return b.simplex_hull;
  }
  return b.hypercube;
}

// Upper limit on the number of tiles that can meet [0,1)^dim. Exact for the
// cube tilings; for T every tile meeting the unit cube lies inside
// [-1/N, 1 + 1/N]^dim, which bounds the count by volume.
inline std::uint64_t tile_count_cap(TileMethod method, std::size_t dim, std::uint64_t n) {
  if (dim == 0) return 1;
  switch (method) {
    case TileMethod::hypercube: return method_bound(method, dim + 1, n);
    case TileMethod::two_cube: return method_bound(method, dim + 1, n);
    case TileMethod::simplex_hull:
      return to_uint64(ceil(Rational(ipow(BigInt(2 * n + 4), static_cast<int>(dim)), BigInt(dim + 1))));
  }
  return 0;
}

template <class Real>
std::vector<std::int64_t> tile_key(TileMethod method, std::span<const Real> x, std::uint64_t n) {
  switch (method) {
    case TileMethod::hypercube: return tile_index_hypercube<Real>(x, n);
    case TileMethod::two_cube: {
      auto t = tile_index_two_cube<Real>(x, n);
      std::vector<std::int64_t> key(t.a_offsets);
      key.push_back(static_cast<std::int64_t>(t.b_id));
      return key;
    }
    case TileMethod::simplex_hull: return tile_decompose_T<Real>(x, n).n;
  }
  return {};
}

struct Collision {
  std::uint64_t q = 0;
  std::uint64_t step = 0;
  std::vector<std::int64_t> l;  // per coordinate of the fractional decomposition
};

// Fractional point x = frac(m diffs) and its integer parts.
template <class Real>
void point_at(const std::vector<Real>& diffs, std::uint64_t m, std::vector<Real>& x, std::vector<std::int64_t>& k) {
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    Real v = diffs[i] * Real(m);
    k[i] = floor_i64(v);
    x[i] = v - Real(k[i]);
  }
}

// Run m = 0, 1, .. until two fractional points share a tile, remembering the
// first step seen in every tile.
template <class Real>
Collision pigeonhole_table(const std::vector<Real>& diffs, std::uint64_t n, TileMethod method, std::uint64_t cap) {
  const std::size_t dim = diffs.size();
  std::unordered_map<std::vector<std::int64_t>, std::pair<std::uint64_t, std::vector<std::int64_t>>, KeyHash>
      seen;
  std::vector<Real> x(dim);
  std::vector<std::int64_t> k(dim);
  for (std::uint64_t m = 0; m <= cap; ++m) {
    point_at(diffs, m, x, k);
    auto key = tile_key<Real>(method, std::span<const Real>(x), n);
    auto [it, inserted] = seen.try_emplace(std::move(key), m, k);
    if (!inserted) {
      Collision c;
      c.q = m - it->second.first;
      c.step = m;
      c.l.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) c.l[i] = k[i] - it->second.second[i];
      return c;
    }
  }
  throw InternalError("pigeonhole search found no collision within the tile count");
}

// Same search without the table. Two steps m < s share a tile only if the lag
// q = s - m shifts the point by a vector delta (taken mod 1, nearest to 0) in
// the difference set of one tile, so it suffices to keep the lags that pass
// this test and compare tiles of s and s - q for those lags only. The test
// runs in double with a margin that only admits extra lags; tile comparisons
// use Real.
//   hypercube: |delta_i| < h with h = 1/(2N)
//   two_cube:  |delta_i| < h for all i, or 0 < delta_i < 2h for all i, or
//              -2h < delta_i < 0 for all i (one point in each cube); D = 1: |delta| < 2h
//   T:         |delta_i| < 2h and |delta_i - delta_j| < 2h
template <class Real>
Collision pigeonhole_lags(const std::vector<Real>& diffs, std::uint64_t n, TileMethod method, std::uint64_t cap) {
  const std::size_t dim = diffs.size();
  const double h = 0.5 / static_cast<double>(n);
  const double margin = 1e-7;
  std::vector<long double> dl(dim);
  for (std::size_t i = 0; i < dim; ++i) dl[i] = static_cast<long double>(diffs[i]);
  auto offset_at = [&](std::size_t i, std::uint64_t s) {
    long double v = dl[i] * static_cast<long double>(s);
    v -= std::floor(v);
    return static_cast<double>(v < 0.5L ? v : v - 1);
  };
  // Coordinate 0 is advanced incrementally and tested first; the others are
  // computed only for the few steps where it passes.
  const double step0 = static_cast<double>(dl[0] - std::floor(dl[0]));
  const double first_width = (method == TileMethod::hypercube ? h : 2 * h) + margin;
  double f0 = 0.0;
  std::vector<double> off(dim);
  auto all_within = [&](double lo, double hi) {
    for (std::size_t i = 0; i < dim; ++i)
      if (!(off[i] > lo - margin && off[i] < hi + margin)) return false;
    return true;
  };
  auto shifts_in_tile = [&]() {
    switch (method) {
      case TileMethod::hypercube: return all_within(-h, h);
      case TileMethod::two_cube:
        if (dim == 1) return all_within(-2 * h, 2 * h);
        return all_within(-h, h) || all_within(0, 2 * h) || all_within(-2 * h, 0);
      case TileMethod::simplex_hull:
        if (!all_within(-2 * h, 2 * h)) return false;
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = i + 1; j < dim; ++j)
            if (!(std::abs(off[i] - off[j]) < 2 * h + margin)) return false;
        return true;
    }
    return true;
  };
  std::vector<std::uint64_t> lags;
  std::vector<Real> xs(dim), xm(dim);
  std::vector<std::int64_t> ks(dim), km(dim);
  for (std::uint64_t s = 1; s <= cap; ++s) {
    if ((s & 0xFFFFF) == 0) {
      f0 = offset_at(0, s);
      if (f0 < 0) f0 += 1.0;
    } else {
      f0 += step0;
      f0 -= f0 >= 1.0 ? 1.0 : 0.0;
    }
    bool near = false;
    const double o0 = f0 < 0.5 ? f0 : f0 - 1.0;
    if (std::abs(o0) < first_width) {
      off[0] = offset_at(0, s);
      for (std::size_t i = 1; i < dim; ++i) off[i] = offset_at(i, s);
      near = shifts_in_tile();
    }
    if (near) lags.push_back(s);
    if (lags.empty()) continue;
    point_at(diffs, s, xs, ks);
    auto key_s = tile_key<Real>(method, std::span<const Real>(xs), n);
    // At most one earlier step can share the tile of s, otherwise an earlier
    // collision would exist, so the first match is the table's answer.
    for (std::uint64_t q : lags) {
      point_at(diffs, s - q, xm, km);
      if (tile_key<Real>(method, std::span<const Real>(xm), n) != key_s) continue;
      Collision c;
      c.q = q;
      c.step = s;
      c.l.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) c.l[i] = ks[i] - km[i];
      return c;
    }
  }
  throw InternalError("pigeonhole search found no collision within the tile count");
}

// Tile counts up to this size use the table; larger ones use the lag search,
// whose memory does not grow with the step count.
inline constexpr std::uint64_t kTableSearchLimit = 1u << 16;

template <class Real>
Collision pigeonhole(const std::vector<Real>& diffs, std::uint64_t n, TileMethod method,
                     std::uint64_t table_limit = kTableSearchLimit) {
  if (diffs.empty()) return {1, 1, {}};
  const std::uint64_t cap = tile_count_cap(method, diffs.size(), n);
  if (cap <= table_limit) return pigeonhole_table(diffs, n, method, cap);
  return pigeonhole_lags(diffs, n, method, cap);
}

// Exact check of the strict pairwise condition; returns the max error.
inline std::optional<Rational> verify_differences(std::span<const Rational> alphas, std::uint64_t q,
                                                  std::span<const std::int64_t> l, std::uint64_t n) {
  Rational limit(BigInt(1), BigInt(n) * BigInt(q));
  Rational worst = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      Rational err = (alphas[i] - alphas[j]) - Rational(BigInt(l[i] - l[j]), BigInt(q));
      if (err < 0) err = -err;
      if (err >= limit) return std::nullopt;
      worst = std::max(worst, err);
    }
  return worst;
}

template <class Real>
Collision pigeonhole_at(std::span<const Rational> alphas, const std::vector<std::size_t>& kept,
                        std::uint64_t n, TileMethod method, std::vector<std::size_t>& order_out) {
  std::vector<Rational> kept_vals;
  for (auto i : kept) kept_vals.push_back(alphas[i]);
  auto order = ascending_order<Rational>(kept_vals);
  order_out.clear();
  for (auto o : order) order_out.push_back(kept[o]);
  std::vector<Real> diffs;
  for (std::size_t j = 1; j < order.size(); ++j)
    diffs.push_back(from_rational<Real>(kept_vals[order[j]] - kept_vals[order.front()]));
  return pigeonhole<Real>(diffs, n, method);
}

}  // namespace detail

/// Find q, l with |(alpha_i - alpha_j) - (l_i - l_j)/q| < 1/(N q) for all pairs.
/// When `pair` is given, alphas[hi] - alphas[lo] must be an integer; that
/// coordinate is dropped before tiling and its l recovered exactly.
inline DiffApproximation diff_approx(std::span<const Rational> alphas, std::uint64_t n, TileMethod method,
                                     std::optional<IntegerPair> pair = std::nullopt,
                                     Precision start = Precision::extended) {
  const std::size_t d = alphas.size();
  if (d < 2) throw PreconditionError("difference approximation needs d >= 2 values");
  if (n < 1) throw PreconditionError("N must be >= 1");

  std::vector<std::size_t> kept;
  Rational pair_gap = 0;
  if (pair) {
    if (pair->hi >= d || pair->lo >= d || pair->hi == pair->lo)
      throw PreconditionError("integer pair indices are invalid");
    pair_gap = alphas[pair->hi] - alphas[pair->lo];
    if (boost::multiprecision::denominator(pair_gap) != 1)
      throw PreconditionError("integer pair verification failed: alpha difference " + pair_gap.str() +
                              " is not an integer");
  }
  for (std::size_t i = 0; i < d; ++i)
    if (!pair || i != pair->hi) kept.push_back(i);
  const std::size_t d_eff = kept.size();

  DiffApproximation out;
  out.N = n;
  out.method = method;
  out.reduced = pair.has_value();
  out.integer_pair = pair;
  out.d = d;
  out.q_bound = detail::method_bound(method, d_eff, n);

  for (int p = static_cast<int>(start); p <= static_cast<int>(Precision::rational); ++p) {
    const auto prec = static_cast<Precision>(p);
    std::vector<std::size_t> order;
    detail::Collision c;
    switch (prec) {
      case Precision::float64: c = detail::pigeonhole_at<double>(alphas, kept, n, method, order); break;
      case Precision::extended: c = detail::pigeonhole_at<long double>(alphas, kept, n, method, order); break;
      case Precision::float50: c = detail::pigeonhole_at<Float50>(alphas, kept, n, method, order); break;
      case Precision::rational: c = detail::pigeonhole_at<Rational>(alphas, kept, n, method, order); break;
    }
    std::vector<std::int64_t> l(d, 0);
    l[order.front()] = 0;
    for (std::size_t j = 1; j < order.size(); ++j) l[order[j]] = c.l[j - 1];
    if (pair) l[pair->hi] = l[pair->lo] + to_int64(BigInt(boost::multiprecision::numerator(pair_gap)) * c.q);

    auto err = detail::verify_differences(alphas, c.q, l, n);
    const bool last = prec == Precision::rational;
    if (!err) {
      if (last) throw InternalError("exact pigeonhole result failed the strict difference bound");
      continue;
    }
    if (c.q > out.q_bound && !last) continue;
    out.q = c.q;
    out.l = std::move(l);
    out.max_pair_error = to_double(*err);
    out.precision_used = prec;
    out.collision_step = c.step;
    if (out.q > out.q_bound) {
      if (method != TileMethod::simplex_hull)
        throw InternalError("pigeonhole q exceeds the exact tile count");
      out.bound_exceeded = true;
    }
    return out;
  }
  throw InternalError("unreachable precision ladder state");
}

inline DiffApproximation diff_approx(std::span<const double> alphas, std::uint64_t n, TileMethod method,
                                     std::optional<IntegerPair> pair = std::nullopt,
                                     Precision start = Precision::extended) {
  std::vector<Rational> exact;
  exact.reserve(alphas.size());
  for (double a : alphas) exact.push_back(to_rational(a));
  return diff_approx(std::span<const Rational>(exact), n, method, pair, start);
}

inline DiffApproximation diff_approx(std::initializer_list<double> alphas, std::uint64_t n, TileMethod method,
                                     std::optional<IntegerPair> pair = std::nullopt,
                                     Precision start = Precision::extended) {
  return diff_approx(std::span<const double>(alphas.begin(), alphas.size()), n, method, pair, start);
}

// ---------------------------------------------------------------------------
// Simultaneous Dirichlet approximation

struct DirichletApproximation {
  std::uint64_t q = 1;
  std::vector<std::int64_t> l;
  std::uint64_t N = 1;
  /// max_i |alpha_i - l_i / q|, at most 1/(q N).
  double max_error = 0;
  std::uint64_t q_bound = 1;
  Precision precision_used = Precision::extended;
};

namespace detail {

template <class Real>
std::pair<std::uint64_t, std::vector<std::int64_t>> dirichlet_pigeonhole(std::span<const Rational> alphas,
                                                                          std::uint64_t n,
                                                                          std::uint64_t cells) {
  std::vector<Real> a;
  for (const auto& r : alphas) a.push_back(from_rational<Real>(r));
  std::unordered_map<std::vector<std::int64_t>, std::pair<std::uint64_t, std::vector<std::int64_t>>, KeyHash>
      seen;
  std::vector<std::int64_t> k(a.size()), cell(a.size());
  for (std::uint64_t q = 0; q <= cells; ++q) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      Real v = a[i] * Real(q);
      k[i] = floor_i64(v);
      cell[i] = floor_i64(Real(n) * (v - Real(k[i])));
    }
    auto [it, inserted] = seen.try_emplace(cell, q, k);
    if (!inserted) {
      std::vector<std::int64_t> l(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) l[i] = k[i] - it->second.second[i];
      return {q - it->second.first, l};
    }
  }
  throw InternalError("Dirichlet pigeonhole found no collision");
}

}  // namespace detail

/// q <= N^d and |alpha_i - l_i/q| <= 1/(q N) for every i.
inline DirichletApproximation dirichlet_simultaneous(std::span<const Rational> alphas, std::uint64_t n,
                                                     Precision start = Precision::extended) {
  if (alphas.empty()) throw PreconditionError("Dirichlet approximation needs d >= 1 values");
  if (n < 1) throw PreconditionError("N must be >= 1");
  DirichletApproximation out;
  out.N = n;
  out.q_bound = to_uint64(ipow(BigInt(n), static_cast<int>(alphas.size())));
  for (int p = static_cast<int>(start); p <= static_cast<int>(Precision::rational); ++p) {
    const auto prec = static_cast<Precision>(p);
    std::pair<std::uint64_t, std::vector<std::int64_t>> res;
    switch (prec) {
      case Precision::float64: res = detail::dirichlet_pigeonhole<double>(alphas, n, out.q_bound); break;
      case Precision::extended: res = detail::dirichlet_pigeonhole<long double>(alphas, n, out.q_bound); break;
      case Precision::float50: res = detail::dirichlet_pigeonhole<Float50>(alphas, n, out.q_bound); break;
      case Precision::rational: res = detail::dirichlet_pigeonhole<Rational>(alphas, n, out.q_bound); break;
    }
    auto& [q, l] = res;
    Rational limit(BigInt(1), BigInt(q) * BigInt(n));
    Rational worst = 0;
    bool ok = q <= out.q_bound;
    for (std::size_t i = 0; i < alphas.size() && ok; ++i) {
      Rational err = alphas[i] - Rational(BigInt(l[i]), BigInt(q));
      if (err < 0) err = -err;
      if (err > limit) ok = false;
      worst = std::max(worst, err);
    }
    if (!ok) {
      if (prec == Precision::rational) throw InternalError("exact Dirichlet result failed verification");
      continue;
    }
    out.q = q;
    out.l = std::move(l);
    out.max_error = to_double(worst);
    out.precision_used = prec;
    return out;
  }
  throw InternalError("unreachable precision ladder state");
}

inline DirichletApproximation dirichlet_simultaneous(std::span<const double> alphas, std::uint64_t n,
                                                     Precision start = Precision::extended) {
  std::vector<Rational> exact;
  for (double a : alphas) exact.push_back(to_rational(a));
  return dirichlet_simultaneous(std::span<const Rational>(exact), n, start);
}

inline DirichletApproximation dirichlet_simultaneous(std::initializer_list<double> alphas, std::uint64_t n) {
  return dirichlet_simultaneous(std::span<const double>(alphas.begin(), alphas.size()), n);
}

}  // namespace recur
