// recur: certified recurrence times for finite quantum systems.
//
// Exit codes: 0 success, 2 bad input or precondition, 3 verification or
// property failure, 4 file I/O.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recur/recur.hpp"

using namespace recur;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitVerification = 3;
constexpr int kExitIo = 4;

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string precision = "extended";
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed, recorded in every output")->capture_default_str();
  sub->add_option("--precision", c.precision, "Starting precision: float|extended|float50|rational")
      ->capture_default_str();
  sub->add_option("--out", c.out, "Output file (default: standard output)");
}

json header(const std::string& command, const Common& c, json config) {
  json j;
  j["tool"] = "recur";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  j["seed"] = c.seed;
  j["precision"] = c.precision;
  return j;
}

// Comment lines carrying the same metadata at the top of a CSV file.
std::string csv_preamble(const json& meta) {
  return "# " + meta.dump() + "\n";
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(c.out, text);
  }
}

std::optional<TileMethod> parse_method(const std::string& s) {
  if (s == "best") return std::nullopt;
  return tile_method_from_string(s);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    auto item = text.substr(pos, next - pos);
    out.push_back(parse_real(json(item)));
    pos = next + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string mode = "continuous";
  std::size_t d = 2;
  std::string epsilon;
  double span = 1;
  std::optional<double> max_r;
};

int run_bounds(const BoundsArgs& a, const Common& c) {
  const auto mode = time_mode_from_string(a.mode);
  const auto eps = Epsilon::parse(a.epsilon);
  std::vector<BoundReport> rows;
  json cfg{{"mode", a.mode}, {"d", a.d}, {"epsilon", a.epsilon}};
  if (mode == TimeMode::continuous) {
    cfg["span"] = a.span;
    rows.push_back(bound_T1(a.span, 0, a.d, eps));
    auto p = bound_T3(a.span, 0, a.d, eps);
    if (a.d >= 3) rows.push_back(p.first);
    rows.push_back(p.second);
  } else {
    const double max_r = a.max_r.value_or(std::numbers::pi);
    cfg["max_r"] = max_r;
    rows.push_back(bound_T2(max_r, a.d, eps));
    auto p = bound_T4(max_r, a.d, eps);
    rows.push_back(p.first);
    rows.push_back(p.second);
  }
  std::string text = csv_preamble(header("bounds", c, cfg)) + bounds_csv_header() + "\n";
  for (const auto& r : rows) text += bounds_csv_row(r) + "\n";
  emit(c, text);
  return 0;
}

// ---------------------------------------------------------------------------

struct RecurArgs {
  std::string spectrum;
  std::string epsilon;
  std::string method = "simplex-hull";
};

int run_recur(const RecurArgs& a, const Common& c) {
  auto s = spectrum_from_json(read_json_file(a.spectrum));
  s.require_recurrence_ready();
  const auto eps = Epsilon::parse(a.epsilon);
  const auto start = precision_from_string(c.precision);
  auto method = parse_method(a.method);
  auto cert = method ? find_recurrence_constructive(s, eps, *method, start) : find_recurrence_best(s, eps, start);
  auto check = verify_certificate(cert, s);

  auto out = header("recur", c, {{"spectrum", a.spectrum}, {"epsilon", a.epsilon}, {"method", a.method}});
  out["certificate"] = certificate_to_json(cert);
  out["verification"]["ok"] = check.ok;
  out["verification"]["violations"] = json::array();
  for (const auto& v : check.violations)
    out["verification"]["violations"].push_back({{"clause", to_string(v.clause)}, {"detail", v.detail}});
  emit(c, out.dump(2) + "\n");

  std::cerr << to_string(cert.mode) << " d=" << s.d() << " eps=" << format_shortest(cert.epsilon)
            << " N=" << cert.n_used << " method=" << to_string(cert.method) << ": q=" << cert.multiplier
            << " t_r=" << format_shortest(cert.recurrence_time) << " (bound " << to_string(cert.bound_used) << " "
            << format_shortest(cert.bound_value) << "), witness t'=" << format_shortest(cert.witness_time)
            << " distance " << format_shortest(cert.witness_distance) << ", "
            << (check.ok ? "verified" : "VERIFICATION FAILED") << "\n";
  if (!check.ok) throw VerificationFailure("certificate failed verification");
  return 0;
}

// ---------------------------------------------------------------------------

struct ApproxArgs {
  std::string input;
  std::string alphas;
  std::optional<std::uint64_t> n;
  std::optional<std::string> method;
  bool oracle = false;
};

int run_approx(const ApproxArgs& a, const Common& c) {
  ApproxRequest req;
  json cfg;
  if (!a.input.empty()) {
    req = approx_request_from_json(read_json_file(a.input));
    cfg["input"] = a.input;
  } else {
    if (a.alphas.empty()) throw PreconditionError("approx needs --input or --alphas");
    for (double v : parse_list(a.alphas)) req.alphas.push_back(to_rational(v));
    cfg["alphas"] = a.alphas;
  }
  if (a.n) req.n = *a.n;
  if (req.n < 1) throw PreconditionError("N must be >= 1");
  if (a.method) req.method = tile_method_from_string(*a.method);
  cfg["N"] = req.n;
  cfg["method"] = to_string(req.method);
  cfg["oracle"] = a.oracle;

  auto res = diff_approx(std::span<const Rational>(req.alphas), req.n, req.method, req.pair,
                         precision_from_string(c.precision));
  auto out = header("approx", c, cfg);
  out["result"] = diff_approx_to_json(res);
  if (a.oracle) {
    std::vector<double> dbl;
    for (const auto& r : req.alphas) dbl.push_back(to_double(r));
    auto b = brute_min_q(dbl, req.n, res.q);
    if (!b) throw VerificationFailure("brute-force scan found no q at or below the returned q");
    out["oracle"] = {{"q_min", b->q}, {"l", b->l}};
  }
  emit(c, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
  std::string spectrum;
  std::string epsilon;
  double step = 0.01;
  double t_max = 10;
  std::string summary;
};

int run_scan(const ScanArgs& a, const Common& c) {
  auto s = spectrum_from_json(read_json_file(a.spectrum));
  const double eps = Epsilon::parse(a.epsilon).value();
  auto r = scan_first_recurrence(s, eps, a.step, a.t_max);
  auto meta = header("scan", c,
                     {{"spectrum", a.spectrum}, {"epsilon", a.epsilon}, {"step", a.step}, {"t_max", a.t_max}});
  emit(c, csv_preamble(meta) + scan_csv(r));
  meta["summary"] = scan_summary_json(r);
  const auto summary = meta.dump(2) + "\n";
  if (a.summary.empty())
    std::cerr << summary;
  else
    write_text_file(a.summary, summary);
  return 0;
}

// ---------------------------------------------------------------------------

struct VolumeArgs {
  std::size_t d = 3;
  std::uint64_t n = 1;
  std::uint64_t samples = 1000000;
};

int run_volume(const VolumeArgs& a, const Common& c) {
  auto v = mc_volume_T(a.d, a.n, a.samples, c.seed);
  const Rational exact = volume_T(a.d, a.n);
  auto out = header("volume", c, {{"d", a.d}, {"N", a.n}, {"samples", a.samples}});
  out["estimate"] = v.estimate;
  out["std_error"] = v.std_error;
  out["exact"] = rational_to_json(exact);
  out["exact_value"] = to_double(exact);
  out["sigma_distance"] = v.std_error > 0 ? std::abs(v.estimate - to_double(exact)) / v.std_error : 0.0;
  emit(c, out.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------

struct TilesArgs {
  std::size_t d = 3;
  std::uint64_t n = 1;
  std::uint64_t points = 10000;
};

bool two_point_ok(const std::vector<double>& y, const std::vector<double>& z, std::uint64_t n) {
  const double lim = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double di = z[i] - y[i];
    if (!(std::abs(di) < lim)) return false;
    for (std::size_t j = i + 1; j < y.size(); ++j)
      if (!(std::abs(di - (z[j] - y[j])) < lim)) return false;
  }
  return true;
}

int run_tiles(const TilesArgs& a, const Common& c) {
  if (a.d < 2) throw PreconditionError("tiles needs d >= 2");
  if (a.n < 1) throw PreconditionError("N must be >= 1");
  const std::size_t dim = a.d - 1;
  std::uint64_t round_trip_fail = 0, neighbour_fail = 0;
  json pairs = json::object();
  for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull})
    pairs[to_string(m)] = {{"same_tile", 0}, {"failures", 0}};

  for (std::uint64_t i = 0; i < a.points; ++i) {
    CounterRng rng(c.seed, i);
    std::vector<double> x(dim), z(dim);
    for (auto& v : x) v = rng.uniform(-2, 2);
    auto dec = tile_decompose_T(std::span<const double>(x), a.n);
    auto r = tile_T_residual<double>(x, dec.n, a.n);
    bool ok = tile_T_membership<double>(r, a.n);
    for (auto v : tile_decompose_T(std::span<const double>(r), a.n).n) ok = ok && v == 0;
    if (!ok) ++round_trip_fail;
    auto trial = dec.n;
    for (std::size_t k = 0; k < dim; ++k)
      for (int step : {-1, 1}) {
        trial[k] += step;
        if (tile_T_membership<double>(tile_T_residual<double>(x, trial, a.n), a.n)) ++neighbour_fail;
        trial[k] -= step;
      }

    // A nearby point in [0,1)^dim; when both land in one tile the pair must
    // satisfy the difference bounds.
    const double spread = 1.0 / static_cast<double>(a.n);
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = rng.uniform();
      z[k] = x[k] + rng.uniform(-spread, spread);
      z[k] -= std::floor(z[k]);
    }
    for (auto m : {TileMethod::hypercube, TileMethod::two_cube, TileMethod::simplex_hull}) {
      if (detail::tile_key<double>(m, x, a.n) != detail::tile_key<double>(m, z, a.n)) continue;
      auto& slot = pairs[to_string(m)];
      slot["same_tile"] = slot["same_tile"].get<std::uint64_t>() + 1;
      if (!two_point_ok(x, z, a.n)) slot["failures"] = slot["failures"].get<std::uint64_t>() + 1;
    }
  }

  std::uint64_t pair_fail = 0;
  for (auto& [k, v] : pairs.items()) pair_fail += v["failures"].get<std::uint64_t>();
  auto out = header("tiles", c, {{"d", a.d}, {"N", a.n}, {"points", a.points}});
  out["round_trip"] = {{"passed", a.points - round_trip_fail}, {"failed", round_trip_fail}};
  out["neighbour_translates"] = {{"checked", a.points * 2 * dim}, {"failed", neighbour_fail}};
  out["two_point"] = pairs;
  const bool all_ok = round_trip_fail == 0 && neighbour_fail == 0 && pair_fail == 0;
  out["ok"] = all_ok;
  emit(c, out.dump(2) + "\n");
  if (!all_ok) throw VerificationFailure("tile properties failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified epsilon-recurrence times for finite quantum systems"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Closed-form recurrence-time bounds as CSV");
  bounds->add_option("--mode", ba.mode, "continuous|discrete")->capture_default_str();
  bounds->add_option("--d", ba.d, "Number of distinct spectral values")->required();
  bounds->add_option("--epsilon", ba.epsilon, "Epsilon, e.g. 0.1, 1/8, pi/16")->required();
  bounds->add_option("--span", ba.span, "E_max - E_min (continuous)")->capture_default_str();
  bounds->add_option("--max-r", ba.max_r, "Largest circle distance between eigenphases (discrete, default pi)");
  add_common(bounds, common);

  RecurArgs ra;
  auto* recur_cmd = app.add_subcommand("recur", "Construct and verify a recurrence certificate");
  recur_cmd->add_option("--spectrum", ra.spectrum, "Spectrum JSON file")->required();
  recur_cmd->add_option("--epsilon", ra.epsilon, "Epsilon")->required();
  recur_cmd->add_option("--method", ra.method, "hypercube|two-cube|simplex-hull|best")->capture_default_str();
  add_common(recur_cmd, common);

  ApproxArgs aa;
  auto* approx = app.add_subcommand("approx", "Simultaneous difference approximation");
  approx->add_option("--input", aa.input, "Approximation request JSON file");
  approx->add_option("--alphas", aa.alphas, "Comma-separated reals (instead of --input)");
  approx->add_option("--N", aa.n, "Approximation parameter N");
  approx->add_option("--method", aa.method, "hypercube|two-cube|simplex-hull");
  approx->add_flag("--oracle", aa.oracle, "Also report the brute-force minimal q");
  add_common(approx, common);

  ScanArgs sa;
  auto* scan = app.add_subcommand("scan", "Worst-case distance on a time grid");
  scan->add_option("--spectrum", sa.spectrum, "Spectrum JSON file")->required();
  scan->add_option("--epsilon", sa.epsilon, "Epsilon")->required();
  scan->add_option("--step", sa.step, "Grid step (1 in discrete time)")->capture_default_str();
  scan->add_option("--t-max", sa.t_max, "Last grid time")->capture_default_str();
  scan->add_option("--summary", sa.summary, "JSON summary file (default: standard error)");
  add_common(scan, common);

  VolumeArgs va;
  auto* volume = app.add_subcommand("volume", "Monte Carlo volume of the polytope T");
  volume->add_option("--d", va.d, "d (T lives in d-1 dimensions)")->capture_default_str();
  volume->add_option("--N", va.n, "N")->capture_default_str();
  volume->add_option("--samples", va.samples, "Sample count")->capture_default_str();
  add_common(volume, common);

  TilesArgs ta;
  auto* tiles = app.add_subcommand("tiles", "Tiling round-trip and two-point checks");
  tiles->add_option("--d", ta.d, "d (points live in d-1 dimensions)")->capture_default_str();
  tiles->add_option("--N", ta.n, "N")->capture_default_str();
  tiles->add_option("--points", ta.points, "Random points")->capture_default_str();
  add_common(tiles, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }

  try {
    precision_from_string(common.precision);
    if (*bounds) return run_bounds(ba, common);
    if (*recur_cmd) return run_recur(ra, common);
    if (*approx) return run_approx(aa, common);
    if (*scan) return run_scan(sa, common);
    if (*volume) return run_volume(va, common);
    if (*tiles) return run_tiles(ta, common);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const InternalError& e) {
    std::cerr << "verification error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
