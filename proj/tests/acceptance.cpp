// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "recur/recur.hpp"

using namespace recur;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& what) {
  if (o.ok) o.detail = what;
  o.ok = false;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

TileMethod method_for(Theorem th) {
  switch (th) {
    case Theorem::T1:
    case Theorem::T2: return TileMethod::hypercube;
    case Theorem::T3a:
    case Theorem::T4a: return TileMethod::two_cube;
    default: return TileMethod::simplex_hull;
  }
}

// 1. Qubit exactness.
Outcome qubit() {
  Outcome o;
  auto s = make_spectrum({0.0, 1.0}, TimeMode::continuous);
  auto c = find_recurrence_constructive(s, 0.3);
  if (std::abs(c.recurrence_time - 2 * pi) > 1e-12) fail(o, fmt("t_r = %.17g", c.recurrence_time));
  if (!(c.worst_case_at_tr < 1e-12)) fail(o, fmt("worst case at t_r = %.3g", c.worst_case_at_tr));
  if (std::abs(c.witness_time - pi) > 1e-12) fail(o, fmt("witness time = %.17g", c.witness_time));
  if (std::abs(c.witness_distance - 1) > 1e-12) fail(o, fmt("witness distance = %.17g", c.witness_distance));
  if (!verify_certificate(c, s).ok) fail(o, "certificate does not verify");
  if (o.ok) o.detail = fmt("t_r=%.17g worst=%.3g", c.recurrence_time, c.worst_case_at_tr);
  return o;
}

// 2. Soundness of the difference approximation against exact arithmetic and brute force.
Outcome soundness() {
  Outcome o;
  std::uint64_t runs = 0;
  for (std::size_t d = 2; d <= 6; ++d)
    for (std::uint64_t n = 1; n <= 8; ++n)
      for (std::uint64_t trial = 0; trial < 100; ++trial) {
        CounterRng rng(2000 + 10 * d + n, trial);
        std::vector<Rational> alphas(d);
        std::vector<double> dbl(d);
        for (std::size_t i = 0; i < d; ++i) {
          dbl[i] = rng.uniform();
          alphas[i] = to_rational(dbl[i]);
        }
        std::uint64_t qmin = ~0ULL;
        for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
          auto a = diff_approx(std::span<const Rational>(alphas), n, m);
          ++runs;
          if (!detail::verify_differences(alphas, a.q, a.l, n))
            fail(o, fmt("strict bound violated at d=%g N=%g trial=%g", double(d), double(n), double(trial)));
          if (a.q > a.q_bound) fail(o, fmt("q above its bound at d=%g N=%g trial=%g", double(d), double(n), double(trial)));
          qmin = std::min(qmin, a.q);
        }
        auto b = brute_min_q(dbl, n, qmin);
        if (!b || b->q > qmin) fail(o, fmt("brute force found no q <= %g at d=%g N=%g", double(qmin), double(d), double(n)));
      }
  if (o.ok) o.detail = std::to_string(runs) + " certificates";
  return o;
}

// 3. Tiling partition: decomposition round trip and uniqueness of the tile.
Outcome partition() {
  Outcome o;
  std::uint64_t points = 0;
  for (std::size_t dim = 2; dim <= 4; ++dim)
    for (std::uint64_t n = 1; n <= 3; ++n)
      for (std::uint64_t i = 0; i < 100000; ++i) {
        CounterRng rng(3000 + 10 * dim + n, i);
        std::vector<double> x(dim);
        for (auto& v : x) v = rng.uniform(-2, 2);
        auto dec = tile_decompose_T(std::span<const double>(x), n);
        ++points;
        auto r = tile_T_residual<double>(x, dec.n, n);
        if (!tile_T_membership<double>(r, n)) fail(o, "residual outside T");
        auto again = tile_decompose_T(std::span<const double>(r), n);
        for (auto v : again.n)
          if (v != 0) fail(o, "decomposition of a residual is not the zero translate");
        // Round trip: x = sum (n_i + beta_i) v^(i) / (2N).
        double total = 0;
        for (std::size_t k = 0; k < dim; ++k) total += static_cast<double>(dec.n[k]) + dec.beta[k];
        for (std::size_t k = 0; k < dim; ++k) {
          double back = (total + static_cast<double>(dec.n[k]) + dec.beta[k]) / static_cast<double>(2 * n);
          if (std::abs(back - x[k]) > 1e-12) fail(o, "decomposition does not reconstruct the point");
        }
        auto trial = dec.n;
        for (std::size_t k = 0; k < dim; ++k)
          for (int step : {-1, 1}) {
            trial[k] += step;
            if (tile_T_membership<double>(tile_T_residual<double>(x, trial, n), n))
              fail(o, "a neighbouring translate also contains the point");
            trial[k] -= step;
          }
      }
  if (o.ok) o.detail = std::to_string(points) + " points";
  return o;
}

// 4. Monte Carlo volume of T.
Outcome volume() {
  Outcome o;
  auto a = mc_volume_T(3, 1, 1000000, 42);
  auto b = mc_volume_T(4, 2, 1000000, 42);
  if (std::abs(a.estimate - 0.75) > 3 * a.std_error) fail(o, fmt("(3,1): %.6f +- %.6f", a.estimate, a.std_error));
  if (std::abs(b.estimate - 1.0 / 16) > 3 * b.std_error) fail(o, fmt("(4,2): %.6f +- %.6f", b.estimate, b.std_error));
  if (o.ok) o.detail = fmt("(3,1)=%.5f (4,2)=%.5f seed=42", a.estimate, b.estimate);
  return o;
}

// 5. Certificates never exceed the smallest applicable theorem bound.
Outcome dominance() {
  Outcome o;
  const double eps_values[] = {0.5, 0.2, 0.05};
  std::uint64_t count = 0;
  for (auto mode : {TimeMode::continuous, TimeMode::discrete})
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      CounterRng rng(mode == TimeMode::continuous ? 5001 : 5002, trial);
      const std::size_t d = 2 + trial % 5;
      const double eps = eps_values[(trial / 5) % 3];
      std::vector<double> v(d);
      for (auto& x : v) x = mode == TimeMode::continuous ? rng.uniform(-3, 3) : rng.uniform(0, 2 * pi);
      auto s = make_spectrum(v, mode);
      if (s.d() < 2) continue;
      auto [th, bound] = min_theorem_bound(s, eps);
      auto c = find_recurrence_constructive(s, eps, method_for(th));
      ++count;
      if (c.recurrence_time > bound) fail(o, fmt("t_r=%.6g above bound %.6g (trial %g)", c.recurrence_time, bound, double(trial)));
      if (!verify_certificate(c, s).ok) fail(o, fmt("certificate %g does not verify", double(trial)));

      const Epsilon e(eps);
      if (e.ceil_pi_over() >= 10 && s.d() >= 3) {
        if (mode == TimeMode::continuous) {
          double t1 = theorem_bound(s, e, Theorem::T1).first;
          double t3b = theorem_bound(s, e, Theorem::T3b).first;
          if (!(t3b < t1)) fail(o, fmt("T3b %.6g not below T1 %.6g", t3b, t1));
        } else {
          double t2 = theorem_bound(s, e, Theorem::T2).first;
          double t4b = theorem_bound(s, e, Theorem::T4b).first;
          if (!(t4b < t2)) fail(o, fmt("T4b %.6g not below T2 %.6g", t4b, t2));
        }
      }
    }
  if (o.ok) o.detail = std::to_string(count) + " spectra";
  return o;
}

// 6. Sampled states never beat the exact worst case; pairs attain it off the origin.
Outcome worst_case_oracle() {
  Outcome o;
  std::uint64_t edge_cases = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    CounterRng rng(6000, k);
    auto mode = k % 2 ? TimeMode::discrete : TimeMode::continuous;
    std::vector<double> v(2 + k % 6);
    for (auto& x : v) x = rng.uniform(0, mode == TimeMode::discrete ? 2 * pi : 4.0);
    auto s = make_spectrum(v, mode);
    for (std::uint64_t j = 0; j < 20; ++j) {
      double t = mode == TimeMode::discrete ? std::floor(rng.uniform(0, 100)) : rng.uniform(0, 30);
      double exact = worst_case_trace_distance(s, t);
      double sampled = sample_states_sup(s, t, 500, 100 * k + j);
      if (sampled > exact + 1e-9) fail(o, fmt("sampled %.17g above exact %.17g", sampled, exact));
      // With at least two points on the unit circle and the origin outside
      // their hull, the nearest hull point is a chord midpoint.
      if (s.d() >= 2 && exact < 1 - 1e-9) {
        ++edge_cases;
        double pairs = sample_states_sup(s, t, 1, 0);
        if (std::abs(pairs - exact) > 1e-6) fail(o, fmt("pair optimum %.12g vs exact %.12g", pairs, exact));
      }
    }
  }
  if (o.ok) o.detail = std::to_string(edge_cases) + " edge cases of 1000";
  return o;
}

// 7. Mixed-state distance is at most the worst pure component.
Outcome convexity() {
  Outcome o;
  for (std::uint64_t k = 0; k < 200; ++k) {
    CounterRng rng(7000, k);
    const std::size_t dim = 2 + k % 7;
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform(-3, 3);
    auto s = make_spectrum(v, TimeMode::continuous);
    std::vector<MixedEnsemble::Component> cs;
    for (std::size_t c = 0; c < 1 + k % 4; ++c) cs.push_back({rng.uniform(0.05, 1.0), random_pure_state(dim, rng)});
    MixedEnsemble ens(cs);
    for (int j = 0; j < 10; ++j) {
      double t = rng.uniform(0, 30);
      double worst = 0;
      for (const auto& c : ens.components()) worst = std::max(worst, trace_distance_pure(c.state, s, t));
      double mixed = trace_distance_mixed(ens, s, t);
      if (mixed > worst + 1e-9) fail(o, fmt("mixed %.12g above %.12g", mixed, worst));
    }
  }
  if (o.ok) o.detail = "200 ensembles";
  return o;
}

// 8. Spread at most 2 eps keeps the squared distance below eps^2.
Outcome variance_chain() {
  Outcome o;
  double worst_gap = -1;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    CounterRng rng(8000, k);
    const std::size_t dim = 2 + k % 7;
    double eps = rng.uniform(0.01, 0.99);
    double base = rng.uniform(-10, 10);
    std::vector<double> theta(dim);
    for (auto& th : theta) th = base + rng.uniform(0, 2 * eps);
    auto s = make_spectrum(theta, TimeMode::continuous);
    auto psi = random_pure_state(dim, rng);
    double dist = trace_distance_pure(psi, s, 1.0);
    worst_gap = std::max(worst_gap, dist * dist - eps * eps);
    if (dist * dist > eps * eps + 1e-12) fail(o, fmt("T^2=%.12g eps^2=%.12g", dist * dist, eps * eps));
  }
  if (o.ok) o.detail = fmt("max T^2-eps^2 = %.3g", worst_gap);
  return o;
}

// 9. Dirichlet baseline.
Outcome dirichlet() {
  Outcome o;
  for (std::uint64_t k = 0; k < 100; ++k) {
    CounterRng rng(9000, k);
    const std::size_t d = 1 + k % 4;
    const std::uint64_t n = 2 + k % 9;
    std::vector<Rational> a(d);
    for (auto& x : a) x = to_rational(rng.uniform());
    auto r = dirichlet_simultaneous(std::span<const Rational>(a), n);
    BigInt cap = ipow(BigInt(n), static_cast<int>(d));
    if (BigInt(r.q) > cap || r.q < 1) fail(o, "q above N^d");
    Rational limit(BigInt(1), BigInt(r.q) * BigInt(n));
    for (std::size_t i = 0; i < d; ++i) {
      Rational err = a[i] - Rational(BigInt(r.l[i]), BigInt(r.q));
      if (err < 0) err = -err;
      if (err > limit) fail(o, "component error above 1/(qN)");
    }
  }
  if (o.ok) o.detail = "100 inputs";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"qubit exactness", 1, qubit},
      {"difference approximation soundness", 120, soundness},
      {"tiling partition", 30, partition},
      {"volume of T", 30, volume},
      {"bound dominance", 300, dominance},
      {"worst-case oracle agreement", 60, worst_case_oracle},
      {"mixed-state convexity", 60, convexity},
      {"variance chain", 10, variance_chain},
      {"Dirichlet baseline", 10, dirichlet},
  };
  int failures = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = o.ok && secs <= all[i].limit_s;
    if (o.ok && !ok) o.detail += " (over time limit)";
    if (!ok) ++failures;
    std::printf("%s %zu %s [%.2fs / %.0fs] %s\n", ok ? "PASS" : "FAIL", i + 1, all[i].name, secs, all[i].limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
