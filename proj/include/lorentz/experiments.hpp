#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lorentz/constants.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/ks.hpp"
#include "lorentz/limit_law.hpp"
#include "lorentz/norms.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/report.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/sampler.hpp"
#include "lorentz/summation.hpp"
#include "lorentz/volume.hpp"

namespace lorentz {

enum class ToleranceProfile { Default, Strict };

/// Pass/fail bands for the finite-n experiments.
struct Tolerances {
  double empirical_ks = 0.01;
  double pmb_ks = 0.02;
  double pmb_abs_corr = 0.05;
  double pmb_signed_corr_sigmas = 4.0;
  double pmb_chi2_alpha = 0.001;
  double clt_ks_normal = 0.05;
  double clt_ks_lognormal = 0.07;
  double clt_ks_gumbel = 0.05;
  double clt_series_alpha = 0.01;
  double lln_relative = 0.01;
  double intersect_high = 0.95;
  double intersect_low = 0.05;
  double profile_pass_fraction = 0.99;
  double rq_mean_sigmas = 4.0;
  double rq_ks_gumbel = 0.05;

  // Strict halves every distance band and raises p-value floors to 0.05.
  static Tolerances for_profile(ToleranceProfile p) {
    Tolerances t;
    if (p == ToleranceProfile::Strict) {
      t.empirical_ks *= 0.5;
      t.pmb_ks *= 0.5;
      t.pmb_abs_corr *= 0.5;
      t.pmb_signed_corr_sigmas = 3.0;
      t.pmb_chi2_alpha = 0.05;
      t.clt_ks_normal *= 0.5;
      t.clt_ks_lognormal *= 0.5;
      t.clt_ks_gumbel *= 0.5;
      t.clt_series_alpha = 0.05;
      t.lln_relative *= 0.5;
      t.intersect_high = 0.99;
      t.intersect_low = 0.01;
      t.profile_pass_fraction = 1.0;
      t.rq_mean_sigmas = 3.0;
      t.rq_ks_gumbel *= 0.5;
    }
    return t;
  }
};

/// Seed, parallelism and tolerance bands shared by all experiment drivers.
struct ExperimentContext {
  RngStreamSpec rng;
  unsigned workers = default_workers();
  Tolerances tolerances;
};

namespace detail {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

inline Moments moments(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s += x;
  const double n = static_cast<double>(xs.size());
  Moments m{s.value() / n, 0.0};
  if (xs.size() > 1) {
    CompensatedSum v;
    for (double x : xs) v += (x - m.mean) * (x - m.mean);
    m.variance = v.value() / (n - 1.0);
  }
  return m;
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  const auto ma = moments(a), mb = moments(b);
  CompensatedSum c;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma.mean) * (b[i] - mb.mean);
  const double cov = c.value() / (static_cast<double>(a.size()) - 1.0);
  return cov / std::sqrt(ma.variance * mb.variance);
}

inline BallParams tilde(QIndex q, std::size_t n) { return {q, 1.0, n, Normalization::Tilde}; }

inline void require_q_above_one(QIndex q) {
  if (q.is_finite() && !(q.value() > 1.0)) throw std::domain_error("experiment requires q > 1");
}

inline void require_positive(std::size_t v, const char* what) {
  if (v == 0) throw std::domain_error(std::string(what) + " must be >= 1");
}

// Standard normal variate via Box-Muller (two uniforms, cosine branch only).
inline double standard_normal(StreamRng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0,1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Empirical distribution of the coordinates of one sample

/// Draws one tilde-normalized point and compares the empirical law of its n
/// coordinates with nu_{q,1} (or `law`, when given).
inline GofReport run_empirical_convergence(QIndex q, std::size_t n, const ExperimentContext& ctx,
                                           const std::optional<ComparisonLaw>& law = std::nullopt) {
  detail::require_q_above_one(q);
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::Empirical;
    report.params = detail::tilde(q, n);
    report.rng = ctx.rng;
    const ComparisonLaw reference = law ? *law : ComparisonLaw::nu_q1(q);
    const SampleBatch batch = sample_exact(report.params, 1, ctx.rng, ctx.workers);
    const auto ks = ks_one_sample(batch.row(0), reference);
    const auto m = detail::moments(batch.row(0));
    report.statistics = {{"ks_statistic", ks.statistic},
                         {"p_value", ks.p_value},
                         {"mean", m.mean},
                         {"variance", m.variance}};
    report.scalars["law_is_laplace"] = reference.kind() == ComparisonLaw::Kind::Laplace ? 1.0 : 0.0;
    report.samples.assign(batch.row(0).begin(), batch.row(0).end());
    report.reference_law = reference;
    report.require("ks_statistic", Relation::Less, ctx.tolerances.empirical_ks);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Finitely many coordinates (Poincare-Maxwell-Borel)

/// First k coordinates of m independent tilde-normalized samples, tested for
/// nu_{q,1} marginals and for independence of the first pair.
inline GofReport run_pmb(QIndex q, std::size_t n, std::size_t k, std::size_t m,
                         const ExperimentContext& ctx) {
  detail::require_q_above_one(q);
  detail::require_positive(k, "k");
  detail::require_positive(m, "replications");
  if (k > n) throw std::domain_error("k must satisfy k <= n");
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::PMB;
    report.params = detail::tilde(q, n);
    report.rng = ctx.rng;
    report.scalars = {{"k", static_cast<double>(k)}, {"replications", static_cast<double>(m)}};

    const KappaTable table(q, n);
    const RowSampler sampler(report.params, table);
    std::vector<double> coords(m * k);  // coords[j * m + i]: coordinate j of replication i
    parallel_for(m, ctx.workers, [&](std::size_t begin, std::size_t end) {
      std::vector<double> row(n), suffix;
      std::vector<std::uint32_t> perm;
      for (std::size_t i = begin; i < end; ++i) {
        StreamRng gen(ctx.rng, i);
        sampler.exact_row(gen, row, suffix, perm);
        for (std::size_t j = 0; j < k; ++j) coords[j * m + i] = row[j];
      }
    });

    const auto law = ComparisonLaw::nu_q1(q);
    double ks_max = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto ks = ks_one_sample(std::span<const double>(coords).subspan(j * m, m), law);
      report.statistics["ks_coord_" + std::to_string(j + 1)] = ks.statistic;
      ks_max = std::max(ks_max, ks.statistic);
    }
    report.statistics["ks_max"] = ks_max;
    report.require("ks_max", Relation::Less, ctx.tolerances.pmb_ks);

    if (k >= 2 && m >= 3) {
      const std::span<const double> x1(coords.data(), m), x2(coords.data() + m, m);
      std::vector<double> a1(m), a2(m);
      for (std::size_t i = 0; i < m; ++i) {
        a1[i] = std::abs(x1[i]);
        a2[i] = std::abs(x2[i]);
      }
      const double corr = detail::correlation(x1, x2);
      const double corr_abs = detail::correlation(a1, a2);
      report.statistics["corr_x1_x2"] = corr;
      report.statistics["abs_corr_x1_x2"] = std::abs(corr);
      report.statistics["corr_abs"] = corr_abs;
      report.statistics["abs_corr_abs"] = std::abs(corr_abs);

      // 5x5 grid of equiprobable cells under nu_{q,1} x nu_{q,1}.
      const LimitLaw nu(q);
      const std::array<double, 4> edges{nu.quantile(0.2), nu.quantile(0.4), nu.quantile(0.6),
                                        nu.quantile(0.8)};
      std::array<double, 25> counts{};
      for (std::size_t i = 0; i < m; ++i) {
        const auto c1 = std::upper_bound(edges.begin(), edges.end(), x1[i]) - edges.begin();
        const auto c2 = std::upper_bound(edges.begin(), edges.end(), x2[i]) - edges.begin();
        counts[static_cast<std::size_t>(c1 * 5 + c2)] += 1.0;
      }
      const double expected = static_cast<double>(m) / 25.0;
      double chi2 = 0.0;
      for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
      report.statistics["chi2_grid"] = chi2;
      report.statistics["chi2_p_value"] = chi_square_survival(chi2, 24.0);

      report.require("abs_corr_x1_x2", Relation::Less,
                     ctx.tolerances.pmb_signed_corr_sigmas / std::sqrt(static_cast<double>(m)));
      report.require("abs_corr_abs", Relation::Less, ctx.tolerances.pmb_abs_corr);
      report.require("chi2_p_value", Relation::Greater, ctx.tolerances.pmb_chi2_alpha);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Fluctuations of the largest coordinate

struct RqDraws {
  std::vector<double> values;
  // Leading-order estimate of sum_{j > truncation} kappa_q(j)^{-2}, the
  // variance dropped by truncating the series.
  double tail_variance = 0.0;
  // sum_{j <= truncation} kappa_q(j)^{-2}, the variance of each draw.
  double truncated_variance = 0.0;
};

/// m draws of the truncated series sum_{j <= truncation} (E_j - 1) / kappa_q(j)
/// for q in [1, 2). With gaussian_tail the neglected tail is replaced by an
/// independent N(0, tail_variance) term.
inline RqDraws simulate_rq(double q, std::size_t truncation, std::size_t m, const RngStreamSpec& rng,
                           unsigned workers = default_workers(), bool gaussian_tail = false) {
  if (!(q >= 1.0 && q < 2.0)) throw std::domain_error("R_q series needs 1 <= q < 2");
  detail::require_positive(truncation, "truncation");
  detail::require_positive(m, "replications");
  const KappaTable table(QIndex::finite(q), truncation);
  std::vector<double> inv(truncation);
  CompensatedSum var;
  for (std::size_t j = 0; j < truncation; ++j) {
    inv[j] = 1.0 / table.values()[j];
    var += inv[j] * inv[j];
  }
  RqDraws out;
  out.truncated_variance = var.value();
  const double t = static_cast<double>(truncation);
  out.tail_variance = std::pow(t, 1.0 - 2.0 / q) / (q * (2.0 - q));
  out.values.resize(m);
  parallel_for(m, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng gen(rng, i);
      double s = 0.0;
      for (std::size_t j = 0; j < truncation; ++j) s += (gen.exponential() - 1.0) * inv[j];
      if (gaussian_tail) s += std::sqrt(out.tail_variance) * detail::standard_normal(gen);
      out.values[i] = s;
    }
  });
  return out;
}

struct CltOptions {
  std::size_t rq_truncation = 1'000'000;
  std::size_t rq_replications = 0;  // 0: same as m
};

/// Scaled, centred maximum norm of m tilde-normalized samples compared with
/// the regime's limit law.
inline GofReport run_clt_max(QIndex q, std::size_t n, std::size_t m, const ExperimentContext& ctx,
                             const CltOptions& opts = {}) {
  if (q.is_infinite()) throw std::domain_error("max-norm fluctuations are not defined for q = inf");
  detail::require_positive(m, "replications");
  if (n < 2) throw std::domain_error("clt experiment needs n >= 2");
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::CltMax;
    report.params = detail::tilde(q, n);
    report.rng = ctx.rng;
    report.scalars = {{"replications", static_cast<double>(m)}};

    const double qv = q.value();
    const double nd = static_cast<double>(n);
    const KappaTable table(q, n);
    const CltConstants c = clt_constants(table);
    const double rate = qv < 2.0 ? std::pow(nd, 1.0 - 1.0 / qv)
                                 : (qv == 2.0 ? std::sqrt(nd / std::log(nd)) : std::sqrt(nd));
    const RowSampler sampler(report.params, table);
    std::vector<double> z(m);
    parallel_for(m, ctx.workers, [&](std::size_t begin, std::size_t end) {
      std::vector<double> row(n);
      for (std::size_t i = begin; i < end; ++i) {
        // Ordered representative; its first entry is the maximum.
        StreamRng gen(ctx.rng, i);
        sampler.ordered_row(gen, row);
        z[i] = rate * (row[0] - c.mu_qn);
      }
    });
    const auto mom = detail::moments(z);
    report.statistics = {{"mu_qn", c.mu_qn}, {"mean", mom.mean}, {"variance", mom.variance}};
    if (c.sigma_q2) report.statistics["limit_variance"] = *c.sigma_q2;

    if (qv == 1.0) {
      report.reference_law = ComparisonLaw::gumbel(-kEulerGamma);
      const auto ks = ks_one_sample(z, *report.reference_law);
      report.statistics["ks_statistic"] = ks.statistic;
      report.statistics["p_value"] = ks.p_value;
      report.require("ks_statistic", Relation::Less, ctx.tolerances.clt_ks_gumbel);
    } else if (qv < 2.0) {
      RngStreamSpec ref_rng = ctx.rng;
      ref_rng.stream_id += 1;
      const std::size_t mref = opts.rq_replications ? opts.rq_replications : m;
      const RqDraws ref = simulate_rq(qv, opts.rq_truncation, mref, ref_rng, ctx.workers);
      report.reference_law = ComparisonLaw::empirical(ref.values);
      const auto ks = ks_two_sample(z, ref.values);
      report.scalars["rq_truncation"] = static_cast<double>(opts.rq_truncation);
      report.scalars["rq_replications"] = static_cast<double>(mref);
      report.statistics["ks_statistic"] = ks.statistic;
      report.statistics["p_value"] = ks.p_value;
      report.statistics["rq_tail_variance"] = ref.tail_variance;
      report.require("p_value", Relation::Greater, ctx.tolerances.clt_series_alpha);
    } else {
      report.reference_law = ComparisonLaw::gaussian(0.0, *c.sigma_q2);
      const auto ks = ks_one_sample(z, *report.reference_law);
      report.statistics["ks_statistic"] = ks.statistic;
      report.statistics["p_value"] = ks.p_value;
      report.require("ks_statistic", Relation::Less,
                     qv == 2.0 ? ctx.tolerances.clt_ks_lognormal : ctx.tolerances.clt_ks_normal);
    }
    report.samples = std::move(z);
  }
  return report;
}

/// Sanity report on the truncated R_q series itself.
inline GofReport run_series_rq(double q, std::size_t truncation, std::size_t m,
                               const ExperimentContext& ctx) {
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::SeriesRq;
    report.params = {QIndex::finite(q), 1.0, truncation, Normalization::Unit};
    report.rng = ctx.rng;
    report.scalars = {{"replications", static_cast<double>(m)},
                      {"truncation", static_cast<double>(truncation)}};
    const RqDraws d = simulate_rq(q, truncation, m, ctx.rng, ctx.workers);
    const auto mom = detail::moments(d.values);
    const double se = std::sqrt(d.truncated_variance / static_cast<double>(m));
    report.statistics = {{"mean", mom.mean},
                         {"variance", mom.variance},
                         {"expected_variance", d.truncated_variance},
                         {"tail_variance", d.tail_variance},
                         {"mean_in_se", std::abs(mom.mean) / se}};
    report.require("mean_in_se", Relation::Less, ctx.tolerances.rq_mean_sigmas);
    if (q == 1.0) {
      const auto ks = ks_one_sample(d.values, ComparisonLaw::gumbel(-kEulerGamma));
      report.statistics["ks_gumbel"] = ks.statistic;
      report.require("ks_gumbel", Relation::Less, ctx.tolerances.rq_ks_gumbel);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// l_r norms on the volume-normalized ball

namespace detail {

// n^{-1/r} ||x||_r of m volume-normalized samples (ordered representatives;
// the l_r norm ignores signs and order).
inline std::vector<double> scaled_lr_norms(QIndex q, ExtendedReal r, std::size_t n, std::size_t m,
                                           const ExperimentContext& ctx, bool scale_by_n = true) {
  const BallParams params{q, 1.0, n, Normalization::VolNorm};
  const KappaTable table(q, n);
  const RowSampler sampler(params, table);
  const double factor = (scale_by_n && r.is_finite()) ? std::pow(static_cast<double>(n), -1.0 / r.value()) : 1.0;
  std::vector<double> out(m);
  parallel_for(m, ctx.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(n);
    for (std::size_t i = begin; i < end; ++i) {
      StreamRng gen(ctx.rng, i);
      sampler.ordered_row(gen, row);
      out[i] = factor * (r.is_infinite() ? row[0] : lr_norm(row, r));
    }
  });
  return out;
}

}  // namespace detail

/// Law of large numbers for n^{-1/r} ||X||_r on the volume-normalized ball.
inline GofReport run_lln_norm(QIndex q, ExtendedReal r, std::size_t n, std::size_t m,
                              const ExperimentContext& ctx) {
  detail::require_q_above_one(q);
  detail::require_positive(m, "replications");
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::LlnNorm;
    report.params = {q, 1.0, n, Normalization::VolNorm};
    report.rng = ctx.rng;
    report.scalars = {{"r", r.value()}, {"replications", static_cast<double>(m)}};
    const auto values = detail::scaled_lr_norms(q, r, n, m, ctx);
    const auto mom = detail::moments(values);
    const double target = lln_constant(q, r);
    report.statistics = {{"mean", mom.mean},
                         {"std_dev", std::sqrt(mom.variance)},
                         {"m_qr", target},
                         {"relative_deviation", std::abs(mom.mean - target) / target}};
    report.require("relative_deviation", Relation::Less, ctx.tolerances.lln_relative);
  }
  return report;
}

/// Fraction of m samples of the volume-normalized Lorentz ball inside t times
/// the volume-normalized l_r ball, for each t (same samples for every t).
inline std::vector<double> intersection_sweep(QIndex q, ExtendedReal r, std::span<const double> ts,
                                              std::size_t n, std::size_t m, const ExperimentContext& ctx) {
  detail::require_q_above_one(q);
  detail::require_positive(m, "replications");
  auto norms = detail::scaled_lr_norms(q, r, n, m, ctx, /*scale_by_n=*/false);
  std::sort(norms.begin(), norms.end());
  const double radius = lr_ball_volume_radius(r, n);
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (!(t > 0.0)) throw std::domain_error("t must be positive");
    const double cap = t / radius;
    const auto inside = std::upper_bound(norms.begin(), norms.end(), cap) - norms.begin();
    out.push_back(static_cast<double>(inside) / static_cast<double>(m));
  }
  return out;
}

/// Monte Carlo volume of D_{q,1}^n intersected with t D_r^n.
inline GofReport run_intersection(QIndex q, ExtendedReal r, double t, std::size_t n, std::size_t m,
                                  const ExperimentContext& ctx) {
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::Intersection;
    report.params = {q, 1.0, n, Normalization::VolNorm};
    report.rng = ctx.rng;
    report.scalars = {{"r", r.value()}, {"t", t}, {"replications", static_cast<double>(m)}};
    const double a = intersection_threshold(q, r);
    const double est = intersection_sweep(q, r, std::span<const double>(&t, 1), n, m, ctx).front();
    report.statistics = {{"estimate", est},
                         {"threshold_A", a},
                         {"t_times_A", t * a},
                         {"lr_volume_radius", lr_ball_volume_radius(r, n)}};
    if (t * a > 1.0)
      report.require("estimate", Relation::GreaterEqual, ctx.tolerances.intersect_high);
    else if (t * a < 1.0)
      report.require("estimate", Relation::LessEqual, ctx.tolerances.intersect_low);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Ordered coordinates against the G_q profile

struct ProfileOptions {
  // Band a_n * delta_n; by default a_n = log n and delta_n the profile rate.
  std::optional<double> band;
};

/// Largest deviation sup_i |x*_i - G_q((i-1)/n)| of an ordered tilde row.
inline double profile_deviation(QIndex q, std::span<const double> ordered_row) {
  const std::size_t n = ordered_row.size();
  double dev = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    dev = std::max(dev, std::abs(ordered_row[i] -
                                 g_profile(q, static_cast<double>(i) / static_cast<double>(n))));
  return dev;
}

inline GofReport order_statistic_profile(QIndex q, std::size_t n, std::size_t rows,
                                         const ExperimentContext& ctx, const ProfileOptions& opts = {}) {
  detail::require_q_above_one(q);
  detail::require_positive(rows, "rows");
  if (n < 2) throw std::domain_error("profile experiment needs n >= 2");
  GofReport report;
  {
    ReportTimer timer(report);
    report.experiment = Experiment::OrderProfile;
    report.params = detail::tilde(q, n);
    report.rng = ctx.rng;
    report.scalars = {{"rows", static_cast<double>(rows)}};
    const double nd = static_cast<double>(n);
    const double band = opts.band ? *opts.band : std::log(nd) * profile_error_rate(q, n);

    const KappaTable table(q, n);
    const RowSampler sampler(report.params, table);
    std::vector<double> dev(rows);
    parallel_for(rows, ctx.workers, [&](std::size_t begin, std::size_t end) {
      std::vector<double> row(n);
      for (std::size_t i = begin; i < end; ++i) {
        StreamRng gen(ctx.rng, i);
        sampler.ordered_row(gen, row);
        dev[i] = profile_deviation(q, row);
      }
    });
    const auto passed = std::count_if(dev.begin(), dev.end(), [&](double d) { return d < band; });
    report.statistics = {{"band", band},
                         {"max_deviation", *std::max_element(dev.begin(), dev.end())},
                         {"pass_count", static_cast<double>(passed)},
                         {"pass_fraction", static_cast<double>(passed) / static_cast<double>(rows)}};
    report.require("pass_fraction", Relation::GreaterEqual, ctx.tolerances.profile_pass_fraction);
  }
  return report;
}

}  // namespace lorentz
