#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lorentz/batch_io.hpp"
#include "lorentz/config.hpp"
#include "lorentz/constants.hpp"
#include "lorentz/experiments.hpp"
#include "lorentz/ode.hpp"
#include "lorentz/report_io.hpp"
#include "lorentz/svg.hpp"
#include "lorentz/volume.hpp"

namespace lorentz {

/// Thrown for well-formed requests the chosen subcommand cannot honour
/// (for example a binary report).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything one run produces, rendered in memory before touching disk.
struct Artifact {
  std::string bytes;               // main output in the requested format
  std::optional<std::string> svg;  // optional plot
  bool pass = true;
  std::string summary;             // one line for the terminal
};

namespace detail {

inline void require_format(const RunConfig& c, std::initializer_list<OutputFormat> allowed) {
  for (auto f : allowed)
    if (c.format == f) return;
  throw UsageError("format '" + std::string(to_string(c.format)) + "' is not available for '" +
                   std::string(to_string(c.subcommand)) + "'");
}

inline void forbid_plot(const RunConfig& c) {
  if (c.plot) throw UsageError("--plot is not available for '" + std::string(to_string(c.subcommand)) + "'");
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string summarize(const GofReport& r) {
  std::ostringstream o;
  o << to_string(r.experiment) << ' ' << (r.verdict() ? "PASS" : "FAIL");
  for (const auto& t : r.tolerances) {
    const auto it = r.statistics.find(t.statistic);
    o << "  " << t.statistic << '=' << (it == r.statistics.end() ? std::string("missing") : format_double(it->second))
      << ' ' << to_string(t.relation) << ' ' << format_double(t.threshold);
  }
  return o.str();
}

inline std::string density_overlay(const GofReport& r, const std::string& title, const std::string& xlabel) {
  svg::Plot plot(title, xlabel, "density");
  auto bars = svg::histogram(r.samples, 60);
  plot.add(bars);
  if (r.reference_law) {
    const auto& law = *r.reference_law;
    if (law.kind() == ComparisonLaw::Kind::Empirical) {
      auto ref = svg::histogram(*law.reference(), 60);
      svg::Series s{{}, "reference draws", svg::palette(1), true, false};
      for (std::size_t i = 0; i < ref.heights.size(); ++i) s.points.push_back({ref.edges[i], ref.heights[i]});
      if (!ref.heights.empty()) s.points.push_back({ref.edges.back(), ref.heights.back()});
      plot.add(std::move(s));
    } else {
      svg::Series s{{}, law.describe(), svg::palette(1), false, false};
      const double lo = bars.edges.front(), hi = bars.edges.back();
      for (int i = 0; i <= 400; ++i) {
        const double x = lo + (hi - lo) * i / 400.0;
        s.points.push_back({x, law.density(x)});
      }
      plot.add(std::move(s));
    }
  }
  std::ostringstream o;
  plot.render(o);
  return o.str();
}

inline Artifact finish_report(const RunConfig& c, GofReport r) {
  Artifact a;
  detail::require_format(c, {OutputFormat::Json, OutputFormat::Csv});
  if (c.format == OutputFormat::Json) {
    a.bytes = dump(report_to_json(r, c));
  } else {
    std::ostringstream o;
    write_report_csv(o, r);
    a.bytes = o.str();
  }
  a.pass = r.verdict();
  a.summary = summarize(r);
  return a;
}

inline nlohmann::json solution_to_json(const OdeSolution& s) {
  nlohmann::json j;
  j["initial_slope"] = s.initial_slope;
  j["classification"] = to_string(s.classification);
  j["termination"] = to_string(s.termination);
  j["support_radius"] = json_number(s.support_radius);
  j["terminal_slope"] = json_number(s.terminal_slope);
  std::vector<double> x, g, dg;
  for (const auto& pt : s.grid) {
    x.push_back(pt.x);
    g.push_back(pt.g);
    dg.push_back(pt.dg);
  }
  j["grid"] = {{"x", x}, {"G", g}, {"dG", dg}};
  return j;
}

inline Artifact render_sample(const RunConfig& c) {
  forbid_plot(c);
  const BallParams params{c.q, c.p, c.n, c.normalization};
  SampleBatch batch;
  switch (c.generator) {
    case Generator::Exact: batch = sample_exact(params, c.count, c.rng(), c.workers); break;
    case Generator::WeylChamber: batch = sample_weyl_chamber(params, c.count, c.rng(), c.workers); break;
    case Generator::Rejection: batch = sample_rejection_oracle(params, c.count, c.rng(), c.workers); break;
  }
  Artifact a;
  std::ostringstream o;
  switch (c.format) {
    case OutputFormat::Csv: write_batch_csv(o, batch); break;
    case OutputFormat::Binary: write_batch_binary(o, batch); break;
    case OutputFormat::Json: {
      nlohmann::json j;
      j["config"] = config_to_json(c);
      j["batch"] = {{"q", json_number(batch.params.q.value())},
                    {"p", batch.params.p},
                    {"n", batch.params.n},
                    {"normalization", to_string(batch.params.normalization)},
                    {"generator", to_string(batch.generator)},
                    {"count", batch.count},
                    {"seed", batch.rng.master_seed},
                    {"stream", batch.rng.stream_id},
                    {"scale", batch.scale}};
      if (batch.acceptance_rate) j["batch"]["acceptance_rate"] = *batch.acceptance_rate;
      auto rows = nlohmann::json::array();
      for (std::size_t i = 0; i < batch.count; ++i) {
        const auto row = batch.row(i);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
      }
      j["batch"]["rows"] = std::move(rows);
      o << dump(j);
      break;
    }
  }
  a.bytes = o.str();
  a.summary = "sample: " + std::to_string(batch.count) + " x " + std::to_string(batch.params.n) + " draws, scale " +
              format_double(batch.scale);
  return a;
}

inline Artifact render_volume(const RunConfig& c) {
  forbid_plot(c);
  require_format(c, {OutputFormat::Json, OutputFormat::Csv});
  const BallVolume v = ball_volume(c.q, c.n);
  const double radius = volume_radius(c.q, c.n);
  Artifact a;
  if (c.format == OutputFormat::Json) {
    nlohmann::json j;
    j["config"] = config_to_json(c);
    j["q"] = json_number(c.q.value());
    j["n"] = c.n;
    j["log_volume"] = v.log_volume;
    j["volume"] = v.volume ? nlohmann::json(*v.volume) : nlohmann::json(nullptr);
    j["volume_radius"] = radius;
    a.bytes = dump(j);
  } else {
    a.bytes = "q,n,log_volume,volume,volume_radius\n" + c.q.to_string() + ',' + std::to_string(c.n) + ',' +
              format_double(v.log_volume) + ',' + (v.volume ? format_double(*v.volume) : std::string("")) + ',' +
              format_double(radius) + "\n";
  }
  a.summary = "log_volume=" + format_double(v.log_volume) +
              " volume=" + (v.volume ? format_double(*v.volume) : std::string("out-of-range")) +
              " volume_radius=" + format_double(radius);
  return a;
}

inline Artifact render_ode(const RunConfig& c) {
  require_format(c, {OutputFormat::Json, OutputFormat::Csv});
  if (c.q.is_infinite()) throw std::domain_error("ode requires finite q");
  const double q = c.q.value();
  std::vector<FamilyMember> family;
  std::optional<double> critical;
  if (c.slopes.empty()) {
    auto cs = find_critical_slope(c.p, q);
    critical = cs.c_pq;
    family.push_back({cs.c_pq, std::move(cs.solution), {}});
  } else {
    family = figure1_family(c.p, q, c.slopes, {}, c.workers);
  }
  Artifact a;
  if (c.format == OutputFormat::Json) {
    nlohmann::json j;
    j["config"] = config_to_json(c);
    j["p"] = c.p;
    j["q"] = q;
    if (critical) j["critical_slope"] = *critical;
    auto traj = nlohmann::json::array();
    for (const auto& m : family) {
      if (m.solution) traj.push_back(solution_to_json(*m.solution));
      else traj.push_back({{"initial_slope", m.slope}, {"error", m.error}});
    }
    j["trajectories"] = std::move(traj);
    a.bytes = dump(j);
  } else {
    std::ostringstream o;
    write_family_csv(o, c.p, q, family);
    a.bytes = o.str();
  }
  std::ostringstream s;
  s << "ode p=" << format_double(c.p) << " q=" << format_double(q);
  if (critical) s << " critical_slope=" << format_double(*critical);
  for (const auto& m : family) {
    s << "  s=" << format_double(m.slope) << ':';
    if (m.solution) {
      s << to_string(m.solution->classification);
    } else {
      s << "error";
      a.pass = false;
    }
  }
  a.summary = s.str();
  if (c.plot) {
    svg::Plot plot("G for p=" + format_double(c.p) + ", q=" + format_double(q), "x", "G(x)");
    std::size_t i = 0;
    for (const auto& m : family) {
      if (!m.solution) continue;
      svg::Series ser{{}, "s=" + format_double(m.slope) + " (" + std::string(to_string(m.solution->classification)) + ")",
                      svg::palette(i++), false, false};
      const double xcap = std::min(m.solution->back().x, 8.0);
      for (const auto& pt : m.solution->grid)
        if (pt.x <= xcap) ser.points.push_back({pt.x, pt.g});
      plot.add(std::move(ser));
    }
    plot.add(svg::HLine{1.0, "G = 1"});
    std::ostringstream o;
    plot.render(o);
    a.svg = o.str();
  }
  return a;
}

}  // namespace detail

/// Runs every subcommand except selftest and renders its artifacts.
inline Artifact render_artifact(const RunConfig& c) {
  ExperimentContext ctx{c.rng(), c.workers, Tolerances::for_profile(c.tolerance_profile)};
  switch (c.subcommand) {
    case Subcommand::Sample: return detail::render_sample(c);
    case Subcommand::Volume: return detail::render_volume(c);
    case Subcommand::Ode: return detail::render_ode(c);
    case Subcommand::Empirical: {
      std::optional<ComparisonLaw> law;
      if (c.compare == CompareLaw::Laplace) law = ComparisonLaw::laplace();
      auto r = run_empirical_convergence(c.q, c.n, ctx, law);
      auto a = detail::finish_report(c, r);
      if (c.plot)
        a.svg = detail::density_overlay(r, "coordinates of one sample, q=" + c.q.to_string() + ", n=" + std::to_string(c.n),
                                        "x");
      return a;
    }
    case Subcommand::Pmb: {
      detail::forbid_plot(c);
      return detail::finish_report(c, run_pmb(c.q, c.n, c.k, c.replications, ctx));
    }
    case Subcommand::Clt: {
      if (c.q.is_infinite()) throw std::domain_error("clt: regime undefined for q = inf");
      auto r = run_clt_max(c.q, c.n, c.replications, ctx);
      auto a = detail::finish_report(c, r);
      if (c.plot)
        a.svg = detail::density_overlay(r, "scaled maximum, q=" + c.q.to_string() + ", n=" + std::to_string(c.n),
                                        "z");
      return a;
    }
    case Subcommand::Lln: {
      detail::forbid_plot(c);
      return detail::finish_report(c, run_lln_norm(c.q, c.r, c.n, c.replications, ctx));
    }
    case Subcommand::Intersect: {
      auto a = detail::finish_report(c, run_intersection(c.q, c.r, c.t, c.n, c.replications, ctx));
      if (c.plot) {
        const double inv_a = 1.0 / intersection_threshold(c.q, c.r);
        std::vector<double> ts;
        for (int i = 0; i <= 80; ++i) ts.push_back(inv_a * (0.5 + i / 80.0));
        const auto est = intersection_sweep(c.q, c.r, ts, c.n, c.replications, ctx);
        svg::Plot plot("intersection volume, q=" + c.q.to_string() + ", r=" + c.r.to_string(), "t", "estimate");
        svg::Series s{{}, "n=" + std::to_string(c.n), svg::palette(0), true, false};
        for (std::size_t i = 0; i < ts.size(); ++i) s.points.push_back({ts[i], est[i]});
        plot.add(std::move(s));
        plot.add(svg::Series{{{inv_a, 0.0}, {inv_a, 1.0}}, "t = 1/A", svg::palette(1), false, true});
        std::ostringstream o;
        plot.render(o);
        a.svg = o.str();
      }
      return a;
    }
    case Subcommand::Selftest: break;
  }
  throw UsageError("selftest has no artifact");
}

/// Bytes with the run-dependent timestamp field removed, for
/// reproducibility comparisons.
inline std::string strip_timestamp(const std::string& bytes, OutputFormat format) {
  if (format == OutputFormat::Json) {
    auto j = nlohmann::json::parse(bytes);
    j.erase("timestamp");
    return j.dump();
  }
  if (format == OutputFormat::Csv && bytes.rfind(kRunLogHeader, 0) == 0) {
    std::istringstream in(bytes);
    std::string line, out;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      out += (line.rfind("timestamp", 0) == 0 || comma == std::string::npos) ? line : line.substr(comma);
      out += '\n';
    }
    return out;
  }
  return bytes;
}

}  // namespace lorentz
