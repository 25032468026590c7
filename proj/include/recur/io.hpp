#pragma once

// JSON and CSV encodings for spectra, certificates, approximations, and scan
// reports. Reals use the shortest decimal that reads back as the same double;
// certificates store them as strings so JSON readers cannot round them.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "recur/bounds.hpp"
#include "recur/diophantine.hpp"
#include "recur/errors.hpp"
#include "recur/oracle.hpp"
#include "recur/recurrence.hpp"
#include "recur/spectrum.hpp"

namespace recur {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.3.0";

/// Shortest decimal that reads back as the same double.
inline std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw InternalError("failed to format double");
  return std::string(buf, res.ptr);
}

inline std::string format_17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw PreconditionError("cannot parse real '" + s + "'");
    return v;
  }
  throw PreconditionError("expected a real number (number or decimal string)");
}

inline Rational parse_rational_pair(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw PreconditionError("rationals are written as [numerator, denominator]");
  return make_rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

inline json rational_to_json(const Rational& r) {
  return json::array({to_int64(BigInt(boost::multiprecision::numerator(r))),
                      to_int64(BigInt(boost::multiprecision::denominator(r)))});
}

// ---------------------------------------------------------------------------
// Spectrum document:
// { "mode": "continuous"|"discrete", "values": [...],
//   "rational_values": [[num, den], ...], "scale": real }

inline Spectrum spectrum_from_json(const json& j) {
  if (!j.is_object()) throw PreconditionError("spectrum document must be a JSON object");
  TimeMode mode = time_mode_from_string(j.value("mode", std::string("continuous")));
  std::optional<double> scale;
  if (j.contains("scale")) scale = parse_real(j.at("scale"));
  if (j.contains("rational_values")) {
    std::vector<Rational> vals;
    for (const auto& r : j.at("rational_values")) vals.push_back(parse_rational_pair(r));
    return make_spectrum_exact(vals, mode, scale);
  }
  if (!j.contains("values") || !j.at("values").is_array())
    throw PreconditionError("spectrum document needs 'values' or 'rational_values'");
  std::vector<double> vals;
  for (const auto& v : j.at("values")) vals.push_back(parse_real(v) * scale.value_or(1.0));
  return make_spectrum(vals, mode);
}

inline json spectrum_to_json(const Spectrum& s) {
  json j;
  j["mode"] = to_string(s.mode());
  j["values"] = json::array();
  for (double v : s.raw_values()) j["values"].push_back(v);
  if (s.has_exact()) {
    // Exact values are per distinct value; expand through the degeneracy map.
    j["rational_values"] = json::array();
    for (std::size_t idx : s.degeneracy_map()) j["rational_values"].push_back(rational_to_json(s.exact_distinct()[idx]));
    if (s.scale()) j["scale"] = *s.scale();
  }
  return j;
}

// ---------------------------------------------------------------------------
// Certificate

inline json certificate_to_json(const RecurrenceCertificate& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["recurrence_time"] = format_shortest(c.recurrence_time);
  j["base_time"] = format_shortest(c.base_time);
  j["multiplier"] = c.multiplier;
  j["phase_integers"] = c.phase_integers;
  j["epsilon"] = format_shortest(c.epsilon);
  j["N"] = c.n_used;
  j["worst_case_at_tr"] = format_shortest(c.worst_case_at_tr);
  j["witness_state"] = json::array();
  for (const auto& a : c.witness_state.amplitudes())
    j["witness_state"].push_back(json::array({format_shortest(a.real()), format_shortest(a.imag())}));
  j["witness_time"] = format_shortest(c.witness_time);
  j["witness_distance"] = format_shortest(c.witness_distance);
  j["bound_used"] = to_string(c.bound_used);
  j["bound_value"] = format_shortest(c.bound_value);
  if (c.bound_value_literal) j["bound_value_literal"] = format_shortest(*c.bound_value_literal);
  j["method"] = to_string(c.method);
  j["q_bound"] = c.q_bound;
  j["max_phase_error"] = format_shortest(c.max_phase_error);
  j["bound_exceeded"] = c.bound_exceeded;
  j["precision"] = to_string(c.precision_used);
  return j;
}

inline RecurrenceCertificate certificate_from_json(const json& j) {
  try {
    RecurrenceCertificate c;
    c.mode = time_mode_from_string(j.at("mode").get<std::string>());
    c.recurrence_time = parse_real(j.at("recurrence_time"));
    c.base_time = parse_real(j.at("base_time"));
    c.multiplier = j.at("multiplier").get<std::uint64_t>();
    c.phase_integers = j.at("phase_integers").get<std::vector<std::int64_t>>();
    c.epsilon = parse_real(j.at("epsilon"));
    c.n_used = j.at("N").get<std::uint64_t>();
    c.worst_case_at_tr = parse_real(j.at("worst_case_at_tr"));
    std::vector<Complex> amps;
    for (const auto& a : j.at("witness_state")) amps.emplace_back(parse_real(a.at(0)), parse_real(a.at(1)));
    c.witness_state = PureState(std::move(amps));
    c.witness_time = parse_real(j.at("witness_time"));
    c.witness_distance = parse_real(j.at("witness_distance"));
    c.bound_used = theorem_from_string(j.at("bound_used").get<std::string>());
    c.bound_value = parse_real(j.at("bound_value"));
    if (j.contains("bound_value_literal")) c.bound_value_literal = parse_real(j.at("bound_value_literal"));
    c.method = tile_method_from_string(j.at("method").get<std::string>());
    c.q_bound = j.at("q_bound").get<std::uint64_t>();
    c.max_phase_error = parse_real(j.at("max_phase_error"));
    c.bound_exceeded = j.value("bound_exceeded", false);
    c.precision_used = precision_from_string(j.value("precision", std::string("extended")));
    return c;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed certificate: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Difference approximation request and result.
// Request: { "alphas": [...] | "rational_alphas": [[n,d],...], "N": int,
//            "method": "...", "integer_pair": [hi, lo] } with 1-based indices.

struct ApproxRequest {
  std::vector<Rational> alphas;
  bool exact_input = false;
  std::uint64_t n = 1;
  TileMethod method = TileMethod::simplex_hull;
  std::optional<IntegerPair> pair;
};

inline ApproxRequest approx_request_from_json(const json& j) {
  try {
    ApproxRequest r;
    if (j.contains("rational_alphas")) {
      r.exact_input = true;
      for (const auto& a : j.at("rational_alphas")) r.alphas.push_back(parse_rational_pair(a));
    } else {
      for (const auto& a : j.at("alphas")) r.alphas.push_back(to_rational(parse_real(a)));
    }
    auto n = j.at("N").get<std::int64_t>();
    if (n < 1) throw PreconditionError("N must be >= 1");
    r.n = static_cast<std::uint64_t>(n);
    if (j.contains("method")) r.method = tile_method_from_string(j.at("method").get<std::string>());
    if (j.contains("integer_pair")) {
      const auto& p = j.at("integer_pair");
      auto hi = p.at(0).get<std::int64_t>();
      auto lo = p.at(1).get<std::int64_t>();
      if (hi < 1 || lo < 1) throw PreconditionError("integer_pair indices are 1-based");
      r.pair = IntegerPair{static_cast<std::size_t>(hi - 1), static_cast<std::size_t>(lo - 1)};
    }
    return r;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed approximation request: ") + e.what());
  }
}

inline json diff_approx_to_json(const DiffApproximation& a) {
  json j;
  j["q"] = a.q;
  j["l"] = a.l;
  j["N"] = a.N;
  j["method"] = to_string(a.method);
  j["max_pair_error"] = format_shortest(a.max_pair_error);
  j["q_bound"] = a.q_bound;
  j["reduced"] = a.reduced;
  if (a.integer_pair) j["integer_pair"] = json::array({a.integer_pair->hi + 1, a.integer_pair->lo + 1});
  j["bound_exceeded"] = a.bound_exceeded;
  j["precision"] = to_string(a.precision_used);
  j["collision_step"] = a.collision_step;
  return j;
}

// ---------------------------------------------------------------------------
// Bounds table and scan output

inline std::string bounds_csv_header() { return "theorem,value,N_used,d,epsilon,scale_input,ceiling_adjusted,flag"; }

inline std::string bounds_csv_row(const BoundReport& r) {
  std::ostringstream os;
  os << to_string(r.theorem) << ',' << format_shortest(r.value) << ',' << r.n_used << ',' << r.d << ','
     << format_shortest(r.epsilon) << ',' << format_shortest(r.scale_input) << ','
     << (r.ceiling_adjusted ? format_shortest(*r.ceiling_adjusted) : std::string()) << ','
     << (r.flag ? "\"" + *r.flag + "\"" : std::string());
  return os.str();
}

inline std::string scan_csv(const ScanReport& r) {
  std::ostringstream os;
  os << "time,worst_case\n";
  for (const auto& s : r.samples) os << format_shortest(s.time) << ',' << format_shortest(s.worst_case) << '\n';
  return os.str();
}

inline json scan_summary_json(const ScanReport& r) {
  json j;
  j["grid_step"] = r.grid_step;
  j["t_max"] = r.t_max;
  j["epsilon"] = r.epsilon;
  j["excursion_seen"] = r.excursion_seen;
  j["first_excursion"] = r.first_excursion ? json(*r.first_excursion) : json(nullptr);
  j["first_recurrence"] = r.first_recurrence ? json(*r.first_recurrence) : json(nullptr);
  j["samples"] = r.samples.size();
  return j;
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json_file(const std::string& path) {
  auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

}  // namespace recur
