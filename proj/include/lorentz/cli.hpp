#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "lorentz/acceptance.hpp"
#include "lorentz/artifacts.hpp"
#include "lorentz/config.hpp"
#include "lorentz/ode.hpp"

namespace lorentz::cli {

enum ExitCode : int { kPass = 0, kVerdictFail = 1, kUsage = 2, kDomain = 3, kIo = 4 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --help: carries the rendered help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParsedArgs {
  RunConfig config;
  std::vector<int> criteria;  // selftest subset
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(lorentz::detail::parse_double(item));
  return out;
}

inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw UsageError(m); };
  if (c.n == 0) fail("--n must be >= 1");
  if (c.count == 0) fail("--count must be >= 1");
  if (c.replications == 0) fail("--replications must be >= 1");
  if (!(c.p >= 1.0)) fail("--p must satisfy p >= 1");
  if (c.q.is_finite() && c.p > c.q.value()) fail("--p must satisfy p <= q");
  if (!(c.t > 0.0)) fail("--t must be positive");
  const bool needs_q_gt_1 = c.subcommand == Subcommand::Empirical || c.subcommand == Subcommand::Pmb ||
                            c.subcommand == Subcommand::Lln || c.subcommand == Subcommand::Intersect;
  if (needs_q_gt_1 && c.q.is_finite() && !(c.q.value() > 1.0)) fail("this experiment requires q > 1");
  switch (c.subcommand) {
    case Subcommand::Clt:
      if (c.q.is_infinite()) fail("clt: regime undefined for q = inf");
      if (c.n < 2) fail("clt requires n >= 2");
      break;
    case Subcommand::Pmb:
      if (c.k == 0 || c.k > c.n) fail("--k must satisfy 1 <= k <= n");
      break;
    case Subcommand::Sample:
      if (c.p != 1.0) fail("sampling is only available for p = 1");
      if (c.generator == Generator::Rejection && c.n > kRejectionMaxDim)
        fail("rejection generator supports n <= " + std::to_string(kRejectionMaxDim));
      break;
    case Subcommand::Ode:
      if (c.q.is_infinite()) fail("ode requires finite q");
      for (double s : c.slopes)
        if (!(s > 0.0)) fail("--slopes must be positive");
      break;
    default: break;
  }
}

}  // namespace detail

/// Parses argv into a validated configuration. Throws HelpRequested for
/// --help and UsageError for anything malformed or out of domain.
inline ParsedArgs parse_args(int argc, const char* const* argv) {
  CLI::App app{"Exact sampling, volumes and limit laws of Lorentz balls", "lorentz_lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string q = "2", r = "2", slopes, format = "json", profile = "default", normalization = "unit",
              generator = "exact", compare = "default", criteria, plot;
  ParsedArgs parsed;
  RunConfig& c = parsed.config;

  app.add_option("--q", q, "Lorentz index q in [1, inf]; 'inf' accepted");
  app.add_option("--p", c.p, "secondary index p (ode; p = 1 elsewhere)");
  app.add_option("--n", c.n, "dimension");
  app.add_option("--r", r, "l_r exponent; 'inf' accepted");
  app.add_option("--t", c.t, "dilation of the l_r ball (intersect)");
  app.add_option("--k", c.k, "number of leading coordinates (pmb)");
  app.add_option("--count", c.count, "number of draws (sample)");
  app.add_option("--replications", c.replications, "replications m (pmb, clt, lln, intersect)");
  app.add_option("--slopes", slopes, "comma-separated initial slopes (ode)");
  app.add_option("--seed", c.seed, "master seed");
  app.add_option("--stream", c.stream, "stream id");
  app.add_option("--out", c.out, "output path (stdout when omitted)");
  app.add_option("--format", format, "csv | json | binary");
  app.add_option("--plot", plot, "SVG output path");
  app.add_option("--workers", c.workers, "worker threads (LORENTZ_LAB_WORKERS overrides)");
  app.add_option("--tolerance-profile", profile, "default | strict");
  app.add_option("--normalization", normalization, "unit | tilde | vol (sample)");
  app.add_option("--generator", generator, "exact | weyl | rejection (sample)");
  app.add_option("--compare", compare, "default | laplace (empirical)");
  app.add_option("--criteria", criteria, "comma-separated criterion ids (selftest)");

  std::vector<CLI::App*> subs;
  for (auto s : kAllSubcommands) subs.push_back(app.add_subcommand(std::string(to_string(s))));
  subs[static_cast<int>(Subcommand::Sample)]->description("draw uniform points from the ball");
  subs[static_cast<int>(Subcommand::Volume)]->description("exact volume and volume radius");
  subs[static_cast<int>(Subcommand::Empirical)]->description("coordinates of one sample vs nu_{q,1}");
  subs[static_cast<int>(Subcommand::Pmb)]->description("first k coordinates across replications");
  subs[static_cast<int>(Subcommand::Clt)]->description("fluctuations of the maximum norm");
  subs[static_cast<int>(Subcommand::Lln)]->description("l_r norms of the volume-normalized ball");
  subs[static_cast<int>(Subcommand::Intersect)]->description("volume of the intersection with t D_r");
  subs[static_cast<int>(Subcommand::Ode)]->description("shooting solver for the profile ODE");
  subs[static_cast<int>(Subcommand::Selftest)]->description("run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, ignored;
    const int code = app.exit(e, o, ignored);
    if (code == 0) throw HelpRequested(o.str());
    throw UsageError(e.what());
  }

  for (std::size_t i = 0; i < subs.size(); ++i)
    if (subs[i]->parsed()) c.subcommand = kAllSubcommands[i];

  try {
    c.q = QIndex::parse(q);
    c.r = ExtendedReal::parse(r);
    c.format = parse_format(format);
    c.tolerance_profile = parse_tolerance_profile(profile);
    c.normalization = parse_normalization(normalization);
    c.generator = parse_generator(generator);
    if (compare == "laplace") c.compare = CompareLaw::Laplace;
    else if (compare != "default") throw std::invalid_argument("unknown comparison law '" + compare + "'");
    if (!slopes.empty()) c.slopes = detail::parse_list(slopes);
    for (double v : detail::parse_list(criteria)) parsed.criteria.push_back(static_cast<int>(v));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!plot.empty()) c.plot = plot;
  if (const char* env = std::getenv("LORENTZ_LAB_WORKERS"); env && *env) {
    try {
      c.workers = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw UsageError("LORENTZ_LAB_WORKERS must be a non-negative integer");
    }
  }
  if (c.workers == 0) c.workers = default_workers();
  detail::validate(c);
  return parsed;
}

namespace detail {

// Writes every file to a sibling temporary first; renames only once all
// writes succeeded, and removes the temporaries otherwise.
class AtomicFiles {
 public:
  void stage(const std::string& path, const std::string& bytes) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    staged_.push_back({target, tmp});
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw IoError("failed writing " + tmp.string());
  }

  void commit() {
    for (const auto& [target, tmp] : staged_) {
      std::error_code ec;
      std::filesystem::rename(tmp, target, ec);
      if (ec) throw IoError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
    }
    staged_.clear();
  }

  ~AtomicFiles() {
    for (const auto& [target, tmp] : staged_) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
    }
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

}  // namespace detail

/// Runs a parsed configuration. Returns the process exit status.
inline int execute(const ParsedArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig& c = args.config;
  try {
    if (c.subcommand == Subcommand::Selftest) {
      std::ostringstream log;
      struct Tee : std::streambuf {
        std::streambuf *a, *b;
        Tee(std::streambuf* x, std::streambuf* y) : a(x), b(y) {}
        int overflow(int ch) override {
          if (ch == EOF) return 0;
          a->sputc(static_cast<char>(ch));
          b->sputc(static_cast<char>(ch));
          return ch;
        }
        int sync() override { return a->pubsync() | b->pubsync(); }
      } tee(out.rdbuf(), log.rdbuf());
      std::ostream both(&tee);
      const bool ok = acceptance::run_all(both, {c.seed, c.workers}, args.criteria);
      both << (ok ? "selftest: all criteria passed" : "selftest: some criteria failed") << std::endl;
      if (!c.out.empty()) {
        detail::AtomicFiles files;
        files.stage(c.out, log.str());
        files.commit();
      }
      return ok ? kPass : kVerdictFail;
    }
    const Artifact a = render_artifact(c);
    detail::AtomicFiles files;
    if (!c.out.empty()) files.stage(c.out, a.bytes);
    if (c.plot && a.svg) files.stage(*c.plot, *a.svg);
    files.commit();
    if (c.out.empty()) {
      out << a.bytes;
      out.flush();
      if (c.format != OutputFormat::Binary) err << a.summary << '\n';
    } else {
      out << a.summary << '\n';
    }
    return a.pass ? kPass : kVerdictFail;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  ParsedArgs args;
  try {
    args = parse_args(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kPass;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return execute(args, out, err);
}

}  // namespace lorentz::cli
