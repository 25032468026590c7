#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "recur/diophantine.hpp"
#include "recur/oracle.hpp"

using namespace recur;
using Catch::Approx;

namespace {

std::vector<double> sample_in_T(std::size_t dim, std::uint64_t n, CounterRng& rng) {
  const double h = 1.0 / static_cast<double>(2 * n);
  std::vector<double> x(dim);
  do {
    for (auto& v : x) v = rng.uniform(-h, h);
  } while (!tile_T_membership<double>(x, n));
  return x;
}

// Checks |z_i - y_i| < 1/N and |(z_i - y_i) - (z_j - y_j)| < 1/N.
bool two_point_property(const std::vector<double>& y, const std::vector<double>& z, std::uint64_t n) {
  const double lim = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < y.size(); ++i) {
    double di = z[i] - y[i];
    if (!(std::abs(di) < lim)) return false;
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      double dj = z[j] - y[j];
      if (!(std::abs(di - dj) < lim)) return false;
    }
  }
  return true;
}

void check_strict_pairs(std::span<const double> alphas, const DiffApproximation& a) {
  Rational limit(BigInt(1), BigInt(a.N) * BigInt(a.q));
  for (std::size_t i = 0; i < alphas.size(); ++i)
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      Rational e = (to_rational(alphas[i]) - to_rational(alphas[j])) - Rational(BigInt(a.l[i] - a.l[j]), BigInt(a.q));
      if (e < 0) e = -e;
      CHECK(e < limit);
    }
}

}  // namespace

TEST_CASE("fractional_decompose examples") {
  auto a = fractional_decompose({0.0, 0.25, 0.75}, 2);
  REQUIRE(a.x.size() == 2);
  CHECK(a.x[0] == 0.5);
  CHECK(a.x[1] == 0.5);
  CHECK(a.k[0] == 0);
  CHECK(a.k[1] == 1);

  auto b = fractional_decompose({0.3, 0.1, 0.7}, 0);
  CHECK(b.x == std::vector<double>{0, 0});
  CHECK(b.k == std::vector<std::int64_t>{0, 0});

  std::vector<Rational> r{make_rational(0, 1), make_rational(1, 3)};
  auto c = fractional_decompose<Rational>(r, 5);
  CHECK(c.x[0] == make_rational(2, 3));
  CHECK(c.k[0] == 1);
}

TEST_CASE("fractional_decompose sorts and records the permutation") {
  auto a = fractional_decompose({0.5, 0.2, 0.9}, 3);
  CHECK(a.order == std::vector<std::size_t>{1, 0, 2});
  CHECK(a.x[0] == Approx(0.9));
  CHECK(a.k[0] == 0);
  CHECK(a.x[1] == Approx(0.1));
  CHECK(a.k[1] == 2);
}

TEST_CASE("tile_index_hypercube examples") {
  CHECK(tile_index_hypercube({0.0, 0.0, 0.0}, 3) == std::vector<std::int64_t>{0, 0, 0});
  CHECK(tile_index_hypercube({0.49, 0.51}, 1) == std::vector<std::int64_t>{0, 1});
  std::set<std::vector<std::int64_t>> ids;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      std::vector<double> x{i / 100.0, j / 100.0};
      ids.insert(tile_index_hypercube<double>(x, 2));
    }
  CHECK(ids.size() == 16);
}

TEST_CASE("tile_index_two_cube tile count") {
  std::set<std::pair<std::uint64_t, std::uint64_t>> ids;
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      std::vector<double> x{i / 200.0, j / 200.0};
      auto t = tile_index_two_cube<double>(x, 2);
      ids.insert({t.a_id, t.b_id});
    }
  CHECK(ids.size() == 10);

  for (std::uint64_t n = 1; n <= 3; ++n) {
    std::set<std::pair<std::uint64_t, std::uint64_t>> ids3;
    const int g = 48;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k) {
          std::vector<double> x{(i + 0.5) / g, (j + 0.5) / g, (k + 0.5) / g};
          auto t = tile_index_two_cube<double>(x, n);
          ids3.insert({t.a_id, t.b_id});
        }
    CHECK(ids3.size() <= prop1_q_bounds(4, n).two_cube);
  }
}

TEST_CASE("tile_index_two_cube places a point in its tile") {
  std::vector<double> x{0.1, 0.1};
  auto t = tile_index_two_cube<double>(x, 2);
  CHECK_FALSE(t.upper);
  CHECK(t.b_id == 0);
  CHECK(t.a_offsets == std::vector<std::int64_t>{0});
  auto o = two_cube_origin(t, 2, 2);
  std::vector<double> r{x[0] - o[0], x[1] - o[1]};
  CHECK(two_cube_membership(r, 2));

  CounterRng rng(3, 0);
  for (int i = 0; i < 20000; ++i) {
    std::size_t dim = 1 + i % 4;
    std::uint64_t n = 1 + i % 3;
    std::vector<double> p(dim);
    for (auto& v : p) v = rng.uniform();
    auto tt = tile_index_two_cube<double>(p, n);
    auto org = two_cube_origin(tt, dim, n);
    std::vector<double> res(dim);
    for (std::size_t k = 0; k < dim; ++k) res[k] = p[k] - org[k];
    CHECK(two_cube_membership(res, n));
  }
}

TEST_CASE("two-cube tiling on an interval has N pieces") {
  std::set<std::uint64_t> ids;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x{i / 1000.0};
    ids.insert(tile_index_two_cube<double>(x, 4).b_id);
  }
  CHECK(ids.size() == 4);
  CHECK(tile_index_two_cube({0.25}, 4).b_id == 1);
  CHECK(tile_index_two_cube({0.2499}, 4).b_id == 0);
}

TEST_CASE("tile_T_membership examples") {
  CHECK(tile_T_membership({0.0, 0.0}, 1));
  CHECK_FALSE(tile_T_membership({0.25, 0.0}, 2));
  CHECK(tile_T_membership({-0.25, -0.25}, 2));
  CHECK_FALSE(tile_T_membership({-0.25, 0.0}, 2));
  CHECK_FALSE(tile_T_membership({0.4, -0.4}, 1));
  CHECK(tile_T_membership({0.4, 0.0}, 1));
}

TEST_CASE("tile_decompose_T examples") {
  auto z = tile_decompose_T({0.0, 0.0, 0.0}, 2);
  CHECK(z.n == std::vector<std::int64_t>{0, 0, 0});

  for (std::uint64_t n = 1; n <= 3; ++n) {
    const double s = 1.0 / static_cast<double>(2 * n);
    std::vector<double> v1{2 * s, s, s};
    auto d = tile_decompose_T<double>(v1, n);
    CHECK(d.n == std::vector<std::int64_t>{1, 0, 0});
    std::vector<double> v3{s, s, 2 * s};
    CHECK(tile_decompose_T<double>(v3, n).n == std::vector<std::int64_t>{0, 0, 1});
  }
}

TEST_CASE("T tiling is a partition") {
  for (std::size_t dim : {2u, 3u, 4u})
    for (std::uint64_t n = 1; n <= 3; ++n) {
      for (std::uint64_t i = 0; i < 5000; ++i) {
        CounterRng rng(100 + dim * 10 + n, i);
        std::vector<double> x(dim);
        for (auto& v : x) v = rng.uniform(-2, 2);
        auto dec = tile_decompose_T<double>(x, n);
        auto res = tile_T_residual<double>(x, dec.n, n);
        REQUIRE(tile_T_membership<double>(res, n));
        auto again = tile_decompose_T<double>(res, n);
        CHECK(std::all_of(again.n.begin(), again.n.end(), [](auto v) { return v == 0; }));
        for (std::size_t k = 0; k < dim; ++k)
          for (int sgn : {-1, 1}) {
            auto m = dec.n;
            m[k] += sgn;
            CHECK_FALSE(tile_T_membership<double>(tile_T_residual<double>(x, m, n), n));
          }
      }
    }
}

TEST_CASE("T tiling is a partition in exact arithmetic") {
  for (std::uint64_t i = 0; i < 500; ++i) {
    CounterRng rng(77, i);
    std::size_t dim = 2 + i % 3;
    std::uint64_t n = 1 + i % 3;
    std::vector<Rational> x(dim);
    // Coarse grid to hit boundaries and lattice points often.
    for (auto& v : x) v = make_rational(static_cast<std::int64_t>(rng.uniform(-24, 24)), 12);
    auto dec = tile_decompose_T<Rational>(x, n);
    auto res = tile_T_residual<Rational>(x, dec.n, n);
    CHECK(tile_T_membership<Rational>(res, n));
    for (std::size_t k = 0; k < dim; ++k)
      for (int sgn : {-1, 1}) {
        auto m = dec.n;
        m[k] += sgn;
        CHECK_FALSE(tile_T_membership<Rational>(tile_T_residual<Rational>(x, m, n), n));
      }
  }
}

TEST_CASE("T tiles meeting the unit cube stay within the count bound") {
  for (std::uint64_t n = 1; n <= 3; ++n) {
    std::set<std::vector<std::int64_t>> tiles;
    const int g = 120;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        std::vector<double> x{(i + 0.5) / g, (j + 0.5) / g};
        tiles.insert(tile_decompose_T<double>(x, n).n);
      }
    CHECK(tiles.size() <= prop1_q_bounds(3, n).simplex_hull);
  }
}

TEST_CASE("two points in one tile satisfy the difference bounds") {
  for (std::size_t dim : {1u, 2u, 3u, 4u})
    for (std::uint64_t n = 1; n <= 4; ++n) {
      const double h = 1.0 / static_cast<double>(2 * n);
      for (std::uint64_t i = 0; i < 10000; ++i) {
        CounterRng rng(dim * 1000 + n, i);
        // Hypercube: a common cell.
        {
          std::vector<double> y(dim), z(dim);
          for (std::size_t k = 0; k < dim; ++k) {
            double cell = std::floor(rng.uniform(0, 2.0 * n));
            y[k] = (cell + rng.uniform()) * h;
            z[k] = (cell + rng.uniform()) * h;
          }
          REQUIRE(tile_index_hypercube<double>(y, n) == tile_index_hypercube<double>(z, n));
          CHECK(two_point_property(y, z, n));
        }
        // Two-cube: each point in either cube of the same translated P.
        {
          std::vector<double> y(dim), z(dim);
          if (dim == 1) {
            double b = std::floor(rng.uniform(0, static_cast<double>(n)));
            y[0] = (b + rng.uniform()) / n;
            z[0] = (b + rng.uniform()) / n;
          } else {
            std::vector<double> org(dim);
            for (std::size_t k = 0; k + 1 < dim; ++k) org[k] = (std::floor(rng.uniform(0, 2.0 * n + 1)) - 1) * h;
            org[dim - 1] = std::floor(rng.uniform(0, static_cast<double>(n))) / n;
            double uy = rng.uniform() < 0.5 ? 0 : h;
            double uz = rng.uniform() < 0.5 ? 0 : h;
            for (std::size_t k = 0; k < dim; ++k) {
              y[k] = org[k] + uy + rng.uniform() * h;
              z[k] = org[k] + uz + rng.uniform() * h;
            }
          }
          CHECK(two_point_property(y, z, n));
        }
        // T: two points of T, translated by a common lattice vector.
        if (dim >= 2) {
          auto y = sample_in_T(dim, n, rng);
          auto z = sample_in_T(dim, n, rng);
          CHECK(two_point_property(y, z, n));
        }
      }
    }
}

TEST_CASE("volume_T examples") {
  CHECK(volume_T(3, 1) == make_rational(3, 4));
  CHECK(volume_T(2, 1) == make_rational(1, 1));
  CHECK(volume_T(4, 2) == make_rational(1, 16));
  CHECK_THROWS_AS(volume_T(1, 1), PreconditionError);
}

TEST_CASE("diff_approx examples") {
  auto a = diff_approx({0.0, 1.0}, 7, TileMethod::simplex_hull, IntegerPair{1, 0});
  CHECK(a.q == 1);
  CHECK(a.l == std::vector<std::int64_t>{0, 1});
  CHECK(a.max_pair_error == 0);
  CHECK(a.reduced);

  std::vector<double> al{0.0, std::numbers::sqrt2, 1.0};
  auto b = diff_approx(al, 5, TileMethod::simplex_hull, IntegerPair{2, 0});
  CHECK(b.q_bound == 6);
  CHECK(b.q <= 6);
  CHECK(b.l[2] - b.l[0] == static_cast<std::int64_t>(b.q));
  check_strict_pairs(al, b);
  auto brute = brute_min_q(al, 5, 6);
  REQUIRE(brute);
  CHECK(brute->q <= b.q);

  std::vector<double> c_al{0.0, 0.3, 0.7};
  auto c = diff_approx(c_al, 4, TileMethod::hypercube);
  CHECK(c.q_bound == 64);
  CHECK(c.q <= 64);
  check_strict_pairs(c_al, c);
}

TEST_CASE("diff_approx frozen outputs") {
  // Regression values from the sequential pigeonhole.
  auto a = diff_approx({0.1, 0.37, 0.71}, 5, TileMethod::simplex_hull);
  CHECK(a.q == 15);
  CHECK(a.l == std::vector<std::int64_t>{0, 4, 9});
  CHECK(a.collision_step == 17);
}

TEST_CASE("diff_approx preconditions") {
  CHECK_THROWS_AS(diff_approx({0.5}, 3, TileMethod::hypercube), PreconditionError);
  CHECK_THROWS_AS(diff_approx({0.0, 0.5}, 0, TileMethod::hypercube), PreconditionError);
  CHECK_THROWS_AS(diff_approx({0.0, 0.5, 0.7}, 3, TileMethod::hypercube, IntegerPair{1, 0}), PreconditionError);
  CHECK_THROWS_AS(diff_approx({0.0, 0.5, 0.7}, 3, TileMethod::hypercube, IntegerPair{5, 0}), PreconditionError);
}

TEST_CASE("exact rational inputs stay exact") {
  std::vector<Rational> al{make_rational(0, 1), make_rational(1, 7), make_rational(3, 11), make_rational(1, 1)};
  for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
    auto r = diff_approx(std::span<const Rational>(al), 6, m, IntegerPair{3, 0}, Precision::rational);
    CHECK(r.precision_used == Precision::rational);
    CHECK(r.q <= r.q_bound);
    auto e = detail::verify_differences(al, r.q, r.l, 6);
    CHECK(e.has_value());
  }
}

TEST_CASE("every starting precision gives a valid certificate") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    CounterRng rng(55, i);
    std::vector<double> al(4);
    for (auto& v : al) v = rng.uniform(-3, 3);
    for (int p = 0; p <= 3; ++p) {
      auto r = diff_approx(al, 3, TileMethod::simplex_hull, std::nullopt, static_cast<Precision>(p));
      CHECK(static_cast<int>(r.precision_used) >= p);
      check_strict_pairs(al, r);
    }
  }
}

TEST_CASE("pigeonhole soundness on random inputs") {
  for (std::size_t d = 2; d <= 5; ++d)
    for (std::uint64_t n = 1; n <= 5; ++n)
      for (std::uint64_t i = 0; i < 10; ++i) {
        CounterRng rng(d * 100 + n, i);
        std::vector<double> al(d);
        for (auto& v : al) v = rng.uniform(-2, 2);
        for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
          auto r = diff_approx(al, n, m);
          CHECK(r.q >= 1);
          CHECK(r.q <= r.q_bound);
          CHECK_FALSE(r.bound_exceeded);
          CHECK(r.max_pair_error < 1.0 / static_cast<double>(n * r.q));
          check_strict_pairs(al, r);
          auto b = brute_min_q(al, n, r.q);
          REQUIRE(b);
          CHECK(b->q <= r.q);
        }
      }
}

TEST_CASE("dirichlet_simultaneous examples") {
  auto a = dirichlet_simultaneous({0.5}, 2);
  CHECK(a.q == 2);
  CHECK(a.l == std::vector<std::int64_t>{1});
  CHECK(a.max_error == 0);

  auto b = dirichlet_simultaneous({3.0, -2.0}, 5);
  CHECK(b.q == 1);
  CHECK(b.l == std::vector<std::int64_t>{3, -2});
  CHECK(b.max_error == 0);

  const double phi = 1.6180339887;
  auto c = dirichlet_simultaneous({phi}, 3);
  CHECK(c.q <= 3);
  CHECK(std::abs(phi - static_cast<double>(c.l[0]) / c.q) <= 1.0 / (3.0 * c.q));
  // Exhaustive scan: some q in 1..3 works.
  bool any = false;
  for (int q = 1; q <= 3; ++q) any |= std::abs(phi * q - std::round(phi * q)) <= 1.0 / 3;
  CHECK(any);
}

TEST_CASE("dirichlet_simultaneous bounds on random inputs") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(91, i);
    std::size_t d = 1 + i % 4;
    std::uint64_t n = 1 + i % 6;
    std::vector<double> al(d);
    for (auto& v : al) v = rng.uniform(-5, 5);
    auto r = dirichlet_simultaneous(al, n);
    CHECK(r.q <= r.q_bound);
    for (std::size_t k = 0; k < d; ++k) {
      Rational err = to_rational(al[k]) - Rational(BigInt(r.l[k]), BigInt(r.q));
      if (err < 0) err = -err;
      CHECK(err <= Rational(BigInt(1), BigInt(r.q) * BigInt(n)));
    }
  }
}

TEST_CASE("tile method names round-trip") {
  for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull})
    CHECK(tile_method_from_string(to_string(m)) == m);
  CHECK(tile_method_from_string("two-cube") == TileMethod::two_cube);
  CHECK(tile_method_from_string("simplex-hull") == TileMethod::simplex_hull);
  CHECK_THROWS_AS(tile_method_from_string("lattice"), PreconditionError);
}

TEST_CASE("lag search finds the same collision as the tile table") {
  for (std::size_t dim = 1; dim <= 4; ++dim)
    for (std::uint64_t n = 1; n <= 6; ++n)
      for (std::uint64_t i = 0; i < 20; ++i)
        for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
          CounterRng rng(dim * 100 + n, i);
          std::vector<long double> diffs(dim);
          for (auto& v : diffs) v = rng.uniform(0, 1);
          auto cap = detail::tile_count_cap(m, dim, n);
          auto a = detail::pigeonhole_table(diffs, n, m, cap);
          auto b = detail::pigeonhole_lags(diffs, n, m, cap);
          CHECK(a.q == b.q);
          CHECK(a.step == b.step);
          CHECK(a.l == b.l);
        }
}
