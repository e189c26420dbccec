#pragma once

// File formats shared by the command-line tool and the tests.
//
//  * Pulse file: one JSON document with the design parameters, the time
//    sequence as s_re / s_im arrays and the metrics block.
//  * Scene file: JSON {"m": M, "sigma_d_sq": opt, "targets": [{cell, re, im}]}.
//  * Everything tabular is CSV preceded by a single "# {json}" line holding
//    the tool version and every parameter needed to replay the run.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "ofdm_radar/analysis.hpp"
#include "ofdm_radar/pulse_design.hpp"
#include "ofdm_radar/range_model.hpp"
#include "ofdm_radar/reconstruction.hpp"
#include "ofdm_radar/version.hpp"

namespace ofdm_radar::io {

using json = nlohmann::json;

/// 17 significant digits: enough for any double to round-trip exactly.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_real(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

inline json header_object(std::string_view command, json params) {
  return json{{"tool", std::string(kToolName) + " " + std::string(kVersion)},
              {"command", std::string(command)},
              {"params", std::move(params)}};
}

inline std::string header_line(const json& header) { return "# " + header.dump() + "\n"; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// --- pulse -------------------------------------------------------------------

inline json config_to_json(const DesignConfig& c) {
  return json{{"n", c.n}, {"m", c.m}, {"l", c.l}, {"q", c.q}, {"papr_d_db", c.papr_d_db}, {"g_f", c.g_f}, {"seed", c.seed}};
}

inline std::string json_number(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

/// Hand-emitted so every real carries 17 significant digits; the result is
/// plain JSON and parses with any reader.
inline std::string pulse_to_text(const OfdmPulse& p) {
  const auto& c = p.config;
  std::string out = "{\n";
  out += "  \"format\": \"ofdm-radar-pulse\",\n";
  out += "  \"tool\": \"" + std::string(kToolName) + " " + std::string(kVersion) + "\",\n";
  out += "  \"n\": " + std::to_string(c.n) + ",\n";
  out += "  \"m\": " + std::to_string(c.m) + ",\n";
  out += "  \"l\": " + std::to_string(c.l) + ",\n";
  out += "  \"q\": " + std::to_string(c.q) + ",\n";
  out += "  \"papr_d_db\": " + json_number(c.papr_d_db) + ",\n";
  out += "  \"g_f\": " + json_number(c.g_f) + ",\n";
  out += "  \"seed\": " + std::to_string(c.seed) + ",\n";
  auto array = [&](const char* key, auto part) {
    out += std::string("  \"") + key + "\": [";
    for (std::size_t i = 0; i < p.s.size(); ++i) out += (i ? ", " : "") + json_number(part(p.s[i]));
    out += "],\n";
  };
  array("s_re", [](const cplx& v) { return v.real(); });
  array("s_im", [](const cplx& v) { return v.imag(); });
  const auto& m = p.metrics;
  out += "  \"metrics\": {\"papr_db\": " + json_number(m.papr_db) + ", \"xi_db\": " + json_number(m.xi_db) +
         ", \"s_min_norm\": " + json_number(m.s_min_norm) + ", \"oob_energy\": " + json_number(m.oob_energy) +
         ", \"usable\": " + (m.usable ? "true" : "false") + "}\n";
  out += "}\n";
  return out;
}

namespace detail {

inline double json_real(const json& v) {
  if (v.is_string()) return parse_real(v.get<std::string>());
  return v.get<double>();
}

}  // namespace detail

/// Rebuilds a pulse; the zero head and unit energy are re-verified and the
/// weights and metrics recomputed from the stored sequence.
inline OfdmPulse pulse_from_json(const json& doc) {
  DesignConfig cfg;
  cfg.n = doc.at("n").get<std::size_t>();
  cfg.m = doc.at("m").get<std::size_t>();
  cfg.l = doc.at("l").get<std::size_t>();
  cfg.q = doc.at("q").get<std::size_t>();
  cfg.papr_d_db = detail::json_real(doc.at("papr_d_db"));
  cfg.g_f = detail::json_real(doc.at("g_f"));
  cfg.seed = doc.at("seed").get<std::uint64_t>();

  const auto& re = doc.at("s_re");
  const auto& im = doc.at("s_im");
  if (re.size() != cfg.n || im.size() != cfg.n) throw std::runtime_error("pulse file: s_re/s_im length differs from n");
  std::vector<cplx> s(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) s[i] = {detail::json_real(re[i]), detail::json_real(im[i])};
  return pulse_from_sequence(TimeSequence(std::move(s)), cfg);
}

inline void write_pulse_file(const std::string& path, const OfdmPulse& p) { write_text(path, pulse_to_text(p)); }

inline OfdmPulse read_pulse_file(const std::string& path) { return pulse_from_json(json::parse(read_text(path))); }

// --- scene -------------------------------------------------------------------

inline std::string scene_to_text(const SwathScene& scene) {
  std::string out = "{\n  \"m\": " + std::to_string(scene.cells()) + ",\n";
  if (scene.sigma_d_sq()) out += "  \"sigma_d_sq\": " + json_number(*scene.sigma_d_sq()) + ",\n";
  out += "  \"targets\": [";
  bool first = true;
  for (std::size_t m = 0; m < scene.cells(); ++m) {
    if (scene[m] == cplx{}) continue;
    out += std::string(first ? "\n" : ",\n") + "    {\"cell\": " + std::to_string(m) +
           ", \"re\": " + json_number(scene[m].real()) + ", \"im\": " + json_number(scene[m].imag()) + "}";
    first = false;
  }
  out += first ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

inline SwathScene scene_from_json(const json& doc) {
  const auto m = doc.at("m").get<std::size_t>();
  std::vector<Target> targets;
  for (const auto& t : doc.at("targets")) {
    targets.push_back({t.at("cell").get<std::size_t>(), {detail::json_real(t.at("re")), detail::json_real(t.at("im"))}});
  }
  auto scene = sparse_scene(m, targets);
  if (doc.contains("sigma_d_sq")) {
    return SwathScene({scene.coefficients().begin(), scene.coefficients().end()}, detail::json_real(doc["sigma_d_sq"]));
  }
  return scene;
}

inline void write_scene_file(const std::string& path, const SwathScene& scene) {
  write_text(path, scene_to_text(scene));
}

inline SwathScene read_scene_file(const std::string& path) { return scene_from_json(json::parse(read_text(path))); }

// --- CSV ---------------------------------------------------------------------

struct CsvTable {
  json header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

inline std::string to_csv(const CsvTable& t) {
  std::string out = header_line(t.header);
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      t.header = json::parse(line.substr(2));
      continue;
    }
    if (!have_columns) {
      t.columns = split_csv_line(line);
      have_columns = true;
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  return t;
}

/// Received samples as n,re,im rows.
inline std::string received_to_csv(const TimeSequence& u, json header) {
  CsvTable t{std::move(header), {"n", "re", "im"}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) t.rows.push_back({std::to_string(i), format_real(u[i].real()), format_real(u[i].imag())});
  return to_csv(t);
}

inline TimeSequence received_from_csv(const std::string& text) {
  const auto t = parse_csv(text);
  if (t.columns != std::vector<std::string>{"n", "re", "im"}) throw std::runtime_error("received file: expected columns n,re,im");
  std::vector<cplx> u;
  for (const auto& row : t.rows) {
    if (row.size() != 3) throw std::runtime_error("received file: malformed row");
    u.emplace_back(parse_real(row[1]), parse_real(row[2]));
  }
  return TimeSequence(std::move(u));
}

/// One row per cell; magnitudes divided by the line maximum, which is
/// recorded in the header as "normalization" (1 for an all-zero line).
inline std::string estimates_to_csv(const RangeEstimate& est, double cell_size_m, json header) {
  double peak = 0.0;
  for (const auto& v : est.d_hat) peak = std::max(peak, std::abs(v));
  const double norm = peak > 0.0 ? peak : 1.0;
  header["normalization"] = format_real(norm);
  CsvTable t{std::move(header), {"cell", "range_m", "re", "im", "magnitude"}, {}};
  for (std::size_t m = 0; m < est.d_hat.size(); ++m) {
    const auto& v = est.d_hat[m];
    t.rows.push_back({std::to_string(m), format_real(static_cast<double>(m) * cell_size_m), format_real(v.real()),
                      format_real(v.imag()), format_real(std::abs(v) / norm)});
  }
  return to_csv(t);
}

inline std::string cdf_to_csv(const std::vector<CdfPoint>& cdf, json header) {
  CsvTable t{std::move(header), {"value_db", "cumulative_fraction"}, {}};
  for (const auto& p : cdf) t.rows.push_back({format_real(p.value), format_real(p.fraction)});
  return to_csv(t);
}

/// The PAPR x ξ grid followed by the S_min grid; unused bound columns are empty.
inline std::string thresholds_to_csv(const MonteCarloSummary& s, json header) {
  header["trials"] = s.trials;
  header["degenerate"] = s.degenerate;
  CsvTable t{std::move(header), {"table", "papr_le_db", "xi_ge_db", "s_min_ge_norm", "count", "fraction"}, {}};
  const double total = static_cast<double>(s.trials);
  for (std::size_t a = 0; a < kPaprGridDb.size(); ++a) {
    for (std::size_t b = 0; b < kXiGridDb.size(); ++b) {
      const auto c = s.papr_xi_counts[a][b];
      t.rows.push_back({"papr_xi", format_real(kPaprGridDb[a]), format_real(kXiGridDb[b]), "", std::to_string(c),
                        format_real(static_cast<double>(c) / total)});
    }
  }
  for (std::size_t k = 0; k < kSminGridNorm.size(); ++k) {
    const auto c = s.s_min_counts[k];
    t.rows.push_back({"s_min", "", "", format_real(kSminGridNorm[k]), std::to_string(c),
                      format_real(static_cast<double>(c) / total)});
  }
  return to_csv(t);
}

inline std::string trials_to_csv(const std::vector<DesignTrialRecord>& records, json header) {
  CsvTable t{std::move(header), {"seed", "papr_db", "xi_db", "s_min_norm", "degenerate"}, {}};
  for (const auto& r : records) {
    t.rows.push_back({std::to_string(r.seed), format_real(r.papr_db), format_real(r.xi_db), format_real(r.s_min_norm),
                      r.degenerate ? "1" : "0"});
  }
  return to_csv(t);
}

inline std::string sinr_curve_to_csv(const SinrCurve& c, json header) {
  CsvTable t{std::move(header), {"snr_in_db", "lfm_sinr_db", "ofdm_bound_db", "ofdm_true_db"}, {}};
  for (std::size_t i = 0; i < c.snr_in_db.size(); ++i) {
    t.rows.push_back({format_real(c.snr_in_db[i]), format_real(c.lfm_sinr_db[i]), format_real(c.ofdm_bound_db[i]),
                      format_real(c.ofdm_true_db[i])});
  }
  return to_csv(t);
}

}  // namespace ofdm_radar::io
