#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lorentz/experiments.hpp"
#include "lorentz/extended_real.hpp"
#include "lorentz/sampler.hpp"
#include "lorentz/volume.hpp"

namespace lorentz {

enum class Subcommand { Sample, Volume, Empirical, Pmb, Clt, Lln, Intersect, Ode, Selftest };

inline constexpr Subcommand kAllSubcommands[] = {
    Subcommand::Sample, Subcommand::Volume,    Subcommand::Empirical,
    Subcommand::Pmb,    Subcommand::Clt,       Subcommand::Lln,
    Subcommand::Intersect, Subcommand::Ode,    Subcommand::Selftest};

inline std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Sample: return "sample";
    case Subcommand::Volume: return "volume";
    case Subcommand::Empirical: return "empirical";
    case Subcommand::Pmb: return "pmb";
    case Subcommand::Clt: return "clt";
    case Subcommand::Lln: return "lln";
    case Subcommand::Intersect: return "intersect";
    case Subcommand::Ode: return "ode";
    case Subcommand::Selftest: return "selftest";
  }
  return "selftest";
}

inline Subcommand parse_subcommand(std::string_view s) {
  for (auto c : kAllSubcommands)
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown subcommand '" + std::string(s) + "'");
}

enum class OutputFormat { Csv, Json, Binary };

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Binary: return "binary";
  }
  return "json";
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "binary") return OutputFormat::Binary;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

inline std::string_view to_string(ToleranceProfile p) {
  return p == ToleranceProfile::Strict ? "strict" : "default";
}

inline ToleranceProfile parse_tolerance_profile(std::string_view s) {
  if (s == "default") return ToleranceProfile::Default;
  if (s == "strict") return ToleranceProfile::Strict;
  throw std::invalid_argument("unknown tolerance profile '" + std::string(s) + "'");
}

enum class CompareLaw { Default, Laplace };

/// Everything that determines the content of a run's artifacts. Output
/// paths and the worker count are execution details: they do not change the
/// results and are not embedded in the artifacts.
struct RunConfig {
  Subcommand subcommand = Subcommand::Selftest;
  QIndex q = QIndex::finite(2.0);
  double p = 1.0;
  std::size_t n = 1000;
  ExtendedReal r = ExtendedReal::finite(2.0);
  double t = 1.0;
  std::size_t k = 2;
  std::size_t count = 10'000;
  std::size_t replications = 2000;
  std::vector<double> slopes;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  OutputFormat format = OutputFormat::Json;
  ToleranceProfile tolerance_profile = ToleranceProfile::Default;
  Normalization normalization = Normalization::Unit;
  Generator generator = Generator::Exact;
  CompareLaw compare = CompareLaw::Default;

  // Execution details.
  std::string out;
  std::optional<std::string> plot;
  unsigned workers = default_workers();

  RngStreamSpec rng() const { return {seed, stream}; }

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.subcommand == b.subcommand && a.q == b.q && a.p == b.p && a.n == b.n && a.r == b.r &&
           a.t == b.t && a.k == b.k && a.count == b.count && a.replications == b.replications &&
           a.slopes == b.slopes && a.seed == b.seed && a.stream == b.stream && a.format == b.format &&
           a.tolerance_profile == b.tolerance_profile && a.normalization == b.normalization &&
           a.generator == b.generator && a.compare == b.compare;
  }
};

namespace detail {

// +-inf and NaN have no JSON number form; they travel as strings.
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double json_to_double(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw std::invalid_argument("expected a number, got " + j.dump());
}

}  // namespace detail

inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["subcommand"] = to_string(c.subcommand);
  j["q"] = detail::json_number(c.q.value());
  j["p"] = c.p;
  j["n"] = c.n;
  j["r"] = detail::json_number(c.r.value());
  j["t"] = c.t;
  j["k"] = c.k;
  j["count"] = c.count;
  j["replications"] = c.replications;
  j["slopes"] = c.slopes;
  j["seed"] = c.seed;
  j["stream"] = c.stream;
  j["format"] = to_string(c.format);
  j["tolerance_profile"] = to_string(c.tolerance_profile);
  j["normalization"] = to_string(c.normalization);
  j["generator"] = to_string(c.generator);
  j["compare"] = c.compare == CompareLaw::Laplace ? "laplace" : "default";
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.subcommand = parse_subcommand(j.at("subcommand").get<std::string>());
  const double q = detail::json_to_double(j.at("q"));
  c.q = std::isinf(q) ? QIndex::infinity() : QIndex::finite(q);
  c.p = j.at("p").get<double>();
  c.n = j.at("n").get<std::size_t>();
  const double r = detail::json_to_double(j.at("r"));
  c.r = std::isinf(r) ? ExtendedReal::infinity() : ExtendedReal::finite(r);
  c.t = j.at("t").get<double>();
  c.k = j.at("k").get<std::size_t>();
  c.count = j.at("count").get<std::size_t>();
  c.replications = j.at("replications").get<std::size_t>();
  c.slopes = j.at("slopes").get<std::vector<double>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.stream = j.at("stream").get<std::uint64_t>();
  c.format = parse_format(j.at("format").get<std::string>());
  c.tolerance_profile = parse_tolerance_profile(j.at("tolerance_profile").get<std::string>());
  c.normalization = parse_normalization(j.at("normalization").get<std::string>());
  c.generator = parse_generator(j.at("generator").get<std::string>());
  c.compare = j.at("compare").get<std::string>() == "laplace" ? CompareLaw::Laplace : CompareLaw::Default;
  return c;
}

}  // namespace lorentz
