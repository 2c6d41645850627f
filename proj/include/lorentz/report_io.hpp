#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "lorentz/config.hpp"
#include "lorentz/report.hpp"

namespace lorentz {

// JSON report layout (keys sorted):
//
//   config       embedded RunConfig (optional)
//   experiment   "empirical" | "pmb" | "clt" | "lln" | "intersect" | ...
//   params       {q, p, n, normalization}
//   scalars      experiment-specific inputs (r, t, k, replications, ...)
//   seed, stream
//   statistics   named values
//   tolerances   [{statistic, relation, threshold}]
//   verdict      "pass" | "fail"
//   timestamp    {utc, wall_time}: the only run-dependent field
//
// Non-finite numbers are written as the strings "inf", "-inf", "nan".

inline nlohmann::json params_to_json(const BallParams& p) {
  return {{"q", detail::json_number(p.q.value())},
          {"p", p.p},
          {"n", p.n},
          {"normalization", to_string(p.normalization)}};
}

inline BallParams params_from_json(const nlohmann::json& j) {
  BallParams p;
  const double q = detail::json_to_double(j.at("q"));
  p.q = std::isinf(q) ? QIndex::infinity() : QIndex::finite(q);
  p.p = j.at("p").get<double>();
  p.n = j.at("n").get<std::size_t>();
  p.normalization = parse_normalization(j.at("normalization").get<std::string>());
  return p;
}

inline nlohmann::json report_to_json(const GofReport& r, const std::optional<RunConfig>& config = std::nullopt) {
  nlohmann::json j;
  if (config) j["config"] = config_to_json(*config);
  j["experiment"] = to_string(r.experiment);
  j["params"] = params_to_json(r.params);
  j["scalars"] = nlohmann::json::object();
  for (const auto& [k, v] : r.scalars) j["scalars"][k] = detail::json_number(v);
  j["seed"] = r.rng.master_seed;
  j["stream"] = r.rng.stream_id;
  j["statistics"] = nlohmann::json::object();
  for (const auto& [k, v] : r.statistics) j["statistics"][k] = detail::json_number(v);
  j["tolerances"] = nlohmann::json::array();
  for (const auto& t : r.tolerances)
    j["tolerances"].push_back({{"statistic", t.statistic},
                               {"relation", to_string(t.relation)},
                               {"threshold", detail::json_number(t.threshold)},
                               {"passed", r.check_passes(t)}});
  j["verdict"] = r.verdict() ? "pass" : "fail";
  j["timestamp"] = {{"utc", r.timestamp}, {"wall_time", r.wall_time}};
  return j;
}

struct ParsedReport {
  GofReport report;
  std::optional<RunConfig> config;
};

inline ParsedReport report_from_json(const nlohmann::json& j) {
  ParsedReport out;
  GofReport& r = out.report;
  r.experiment = parse_experiment(j.at("experiment").get<std::string>());
  r.params = params_from_json(j.at("params"));
  for (const auto& [k, v] : j.at("scalars").items()) r.scalars[k] = detail::json_to_double(v);
  r.rng = {j.at("seed").get<std::uint64_t>(), j.at("stream").get<std::uint64_t>()};
  for (const auto& [k, v] : j.at("statistics").items()) r.statistics[k] = detail::json_to_double(v);
  for (const auto& t : j.at("tolerances"))
    r.require(t.at("statistic").get<std::string>(), parse_relation(t.at("relation").get<std::string>()),
              detail::json_to_double(t.at("threshold")));
  if (j.contains("timestamp")) {
    r.timestamp = j["timestamp"].at("utc").get<std::string>();
    r.wall_time = j["timestamp"].at("wall_time").get<double>();
  }
  if (j.contains("config")) out.config = config_from_json(j["config"]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV run log: one report per line, fixed columns.

inline constexpr std::string_view kRunLogHeader =
    "timestamp,experiment,q,p,n,normalization,seed,stream,verdict,scalars,statistics";

namespace detail {

inline std::string join_map(const std::map<std::string, double>& m) {
  std::string s;
  for (const auto& [k, v] : m) {
    if (!s.empty()) s += ';';
    s += k + '=' + format_double(v);
  }
  return s;
}

}  // namespace detail

inline std::string run_log_row(const GofReport& r) {
  std::ostringstream o;
  o << r.timestamp << " wall_time=" << detail::format_double(r.wall_time) << ',' << to_string(r.experiment)
    << ',' << r.params.q.to_string() << ',' << detail::format_double(r.params.p) << ',' << r.params.n << ','
    << to_string(r.params.normalization) << ',' << r.rng.master_seed << ',' << r.rng.stream_id << ','
    << (r.verdict() ? "pass" : "fail") << ',' << detail::join_map(r.scalars) << ','
    << detail::join_map(r.statistics);
  return o.str();
}

inline void write_report_csv(std::ostream& out, const GofReport& r) {
  out << kRunLogHeader << '\n' << run_log_row(r) << '\n';
}

/// Appends one row, writing the header first when the file is new or empty.
inline void append_run_log(const std::filesystem::path& path, const GofReport& r) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open run log " + path.string());
  if (fresh) out << kRunLogHeader << '\n';
  out << run_log_row(r) << '\n';
  if (!out) throw std::runtime_error("failed writing run log " + path.string());
}

}  // namespace lorentz
