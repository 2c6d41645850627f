#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lorentz/ks.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/volume.hpp"

namespace lorentz {

enum class Experiment { Empirical, PMB, CltMax, LlnNorm, Intersection, SeriesRq, OrderProfile };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Empirical: return "empirical";
    case Experiment::PMB: return "pmb";
    case Experiment::CltMax: return "clt";
    case Experiment::LlnNorm: return "lln";
    case Experiment::Intersection: return "intersect";
    case Experiment::SeriesRq: return "series_rq";
    case Experiment::OrderProfile: return "profile";
  }
  return "empirical";
}

inline Experiment parse_experiment(std::string_view s) {
  for (auto e : {Experiment::Empirical, Experiment::PMB, Experiment::CltMax, Experiment::LlnNorm,
                 Experiment::Intersection, Experiment::SeriesRq, Experiment::OrderProfile})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown experiment '" + std::string(s) + "'");
}

enum class Relation { Less, LessEqual, Greater, GreaterEqual };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Greater: return ">";
    case Relation::GreaterEqual: return ">=";
  }
  return "<";
}

inline Relation parse_relation(std::string_view s) {
  for (auto r : {Relation::Less, Relation::LessEqual, Relation::Greater, Relation::GreaterEqual})
    if (to_string(r) == s) return r;
  throw std::invalid_argument("unknown relation '" + std::string(s) + "'");
}

// A declared tolerance: statistics[statistic] <relation> threshold.
struct Tolerance {
  std::string statistic;
  Relation relation = Relation::Less;
  double threshold = 0.0;

  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

inline bool holds(double value, Relation r, double threshold) {
  if (!std::isfinite(value)) return false;
  switch (r) {
    case Relation::Less: return value < threshold;
    case Relation::LessEqual: return value <= threshold;
    case Relation::Greater: return value > threshold;
    case Relation::GreaterEqual: return value >= threshold;
  }
  return false;
}

/// Goodness-of-fit summary of one experiment run.
struct GofReport {
  Experiment experiment = Experiment::Empirical;
  BallParams params;
  // Experiment-specific scalars (r, t, k, replications, ...); +inf allowed.
  std::map<std::string, double> scalars;
  std::map<std::string, double> statistics;
  std::vector<Tolerance> tolerances;
  RngStreamSpec rng;
  double wall_time = 0.0;  // seconds
  std::string timestamp;   // ISO-8601 UTC
  // Raw per-replication values kept for plotting; never serialized.
  std::vector<double> samples;
  std::optional<ComparisonLaw> reference_law;

  void require(std::string statistic, Relation relation, double threshold) {
    tolerances.push_back({std::move(statistic), relation, threshold});
  }

  bool check_passes(const Tolerance& t) const {
    const auto it = statistics.find(t.statistic);
    return it != statistics.end() && holds(it->second, t.relation, t.threshold);
  }

  // Pure function of statistics and tolerances.
  bool verdict() const {
    for (const auto& t : tolerances)
      if (!check_passes(t)) return false;
    return true;
  }
};

inline std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Stamps wall time and timestamp when it goes out of scope.
class ReportTimer {
 public:
  explicit ReportTimer(GofReport& r) : report_(r), start_(std::chrono::steady_clock::now()) {}
  ~ReportTimer() {
    report_.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    report_.timestamp = iso8601_utc_now();
  }
  ReportTimer(const ReportTimer&) = delete;
  ReportTimer& operator=(const ReportTimer&) = delete;

 private:
  GofReport& report_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lorentz
