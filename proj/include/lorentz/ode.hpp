#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lorentz/extended_real.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/sampler.hpp"

namespace lorentz {

// Boundary-value problem for the limiting profile of the (q,p) Lorentz ball:
//
//   G''(x) = -G'(x) (1 - G(x))^{p/q - 1} x^{p - 1},   G(0) = 0,
//
// solved by shooting on the initial slope G'(0).

enum class Classification { Subcritical, Critical, Supercritical };

inline std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Subcritical: return "subcritical";
    case Classification::Critical: return "critical";
    case Classification::Supercritical: return "supercritical";
  }
  return "subcritical";
}

enum class Termination { ReachedOne, Plateau, XMax };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ReachedOne: return "reached_one";
    case Termination::Plateau: return "plateau";
    case Termination::XMax: return "x_max";
  }
  return "plateau";
}

struct StepControl {
  double atol = 1e-12;
  double rtol = 1e-12;
  double eps_g = 1e-10;       // stop when 1 - G < eps_g
  double eps_slope = 1e-12;   // stop when G' < eps_slope
  double x_max = 50.0;
  double eta = 0.1;           // G may close at most this fraction of 1 - G per step
  double initial_step = 1e-3;
  std::size_t max_steps = 5'000'000;
  // Critical reporting window.
  double critical_slope = 1e-4;
  double critical_gap = 1e-6;
};

struct OdePoint {
  double x;
  double g;
  double dg;
};

struct OdeSolution {
  double p = 1.0;
  double q = 2.0;
  double initial_slope = 0.0;
  std::vector<OdePoint> grid;
  Classification classification = Classification::Subcritical;
  Termination termination = Termination::Plateau;
  double support_radius = std::numeric_limits<double>::infinity();
  // Slope extrapolated to G = 1 (reached trajectories) or the final G'.
  double terminal_slope = 0.0;
  std::size_t rejected_steps = 0;

  const OdePoint& back() const { return grid.back(); }
};

/// Thrown when the integrator cannot produce a finite state.
class OdeNonFiniteError : public std::runtime_error {
 public:
  OdeNonFiniteError(double x, const std::string& what) : std::runtime_error(what), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

namespace detail {

inline void check_ode_domain(double p, double q) {
  if (!std::isfinite(p) || !std::isfinite(q)) throw std::domain_error("ode requires finite p and q");
  if (!(p >= 1.0)) throw std::domain_error("ode requires p >= 1");
  if (!(q >= p)) throw std::domain_error("ode requires q >= p");
}

struct OdeRhs {
  double alpha;
  double pm1;

  // NaN past G = 1.
  std::array<double, 2> operator()(double x, double g, double dg) const {
    const double u = 1.0 - g;
    if (!(u > 0.0)) return {dg, std::numeric_limits<double>::quiet_NaN()};
    const double xp = pm1 == 0.0 ? 1.0 : std::pow(x, pm1);
    const double up = alpha == 0.0 ? 1.0 : std::pow(u, alpha);
    return {dg, -dg * up * xp};
  }
};

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct StepResult {
  double g, dg, error;
};

inline StepResult dp45_step(const OdeRhs& f, double x, double g, double dg, double h,
                            const std::array<double, 2>& k1, const StepControl& ctl) {
  using T = DormandPrince;
  const auto k2 = f(x + T::c2 * h, g + h * T::a21 * k1[0], dg + h * T::a21 * k1[1]);
  const auto k3 = f(x + T::c3 * h, g + h * (T::a31 * k1[0] + T::a32 * k2[0]),
                    dg + h * (T::a31 * k1[1] + T::a32 * k2[1]));
  const auto k4 = f(x + T::c4 * h, g + h * (T::a41 * k1[0] + T::a42 * k2[0] + T::a43 * k3[0]),
                    dg + h * (T::a41 * k1[1] + T::a42 * k2[1] + T::a43 * k3[1]));
  const auto k5 = f(x + T::c5 * h,
                    g + h * (T::a51 * k1[0] + T::a52 * k2[0] + T::a53 * k3[0] + T::a54 * k4[0]),
                    dg + h * (T::a51 * k1[1] + T::a52 * k2[1] + T::a53 * k3[1] + T::a54 * k4[1]));
  const auto k6 = f(x + h,
                    g + h * (T::a61 * k1[0] + T::a62 * k2[0] + T::a63 * k3[0] + T::a64 * k4[0] +
                             T::a65 * k5[0]),
                    dg + h * (T::a61 * k1[1] + T::a62 * k2[1] + T::a63 * k3[1] + T::a64 * k4[1] +
                              T::a65 * k5[1]));
  StepResult r;
  r.g = g + h * (T::b1 * k1[0] + T::b3 * k3[0] + T::b4 * k4[0] + T::b5 * k5[0] + T::b6 * k6[0]);
  r.dg = dg + h * (T::b1 * k1[1] + T::b3 * k3[1] + T::b4 * k4[1] + T::b5 * k5[1] + T::b6 * k6[1]);
  const auto k7 = f(x + h, r.g, r.dg);
  double err = 0.0;
  const std::array<double, 2> y0{g, dg}, y1{r.g, r.dg};
  for (int i = 0; i < 2; ++i) {
    const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                          T::e6 * k6[i] + T::e7 * k7[i]);
    const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    err = std::max(err, std::abs(e) / sc);
  }
  r.error = err;
  if (!std::isfinite(r.g) || !std::isfinite(r.dg) || !std::isfinite(k7[1]) || r.g > 1.0)
    r.error = std::numeric_limits<double>::infinity();
  return r;
}

struct EndpointFit {
  double a;      // G' at G = 1
  double gamma;  // G' - a ~ b (1 - G)^gamma
};

// Fits G' = a + b (1 - G)^gamma through three tail points whose gaps 1 - G
// are roughly a decade apart.
inline EndpointFit fit_endpoint(std::span<const OdePoint> grid) {
  const std::size_t i3 = grid.size() - 1;
  const double u3 = 1.0 - grid[i3].g;
  const double g3 = grid[i3].dg;
  auto back_to = [&](std::size_t from, double u_min) -> std::optional<std::size_t> {
    for (std::size_t i = from; i-- > 0;)
      if (1.0 - grid[i].g >= u_min) return i;
    return std::nullopt;
  };
  const auto i2 = back_to(i3, 8.0 * u3);
  if (!i2) return {g3, 0.0};
  const double u2 = 1.0 - grid[*i2].g;
  const auto i1 = back_to(*i2, 8.0 * u2);
  if (!i1) return {g3, 0.0};
  const double u1 = 1.0 - grid[*i1].g;
  const double g1 = grid[*i1].dg, g2 = grid[*i2].dg;
  const double d12 = g1 - g2, d23 = g2 - g3;
  if (!(d12 > 0.0) || !(d23 > 0.0)) return {g3, 0.0};
  const double t1 = u1 / u3, t2 = u2 / u3;
  const double target = d12 / d23;
  auto ratio = [&](double gm) { return (std::pow(t1, gm) - std::pow(t2, gm)) / (std::pow(t2, gm) - 1.0); };
  double lo = 1e-4, hi = 4.0;
  if (!(ratio(lo) <= target && ratio(hi) >= target)) {
    const double b = d23 / (u2 - u3);
    return {g3 - b * u3, 1.0};
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  const double gm = 0.5 * (lo + hi);
  const double b = d23 / (std::pow(u2, gm) - std::pow(u3, gm));
  return {g3 - b * std::pow(u3, gm), gm};
}

}  // namespace detail

/// Integrates the profile ODE from x = 0 with G'(0) = initial_slope.
inline OdeSolution integrate_g(double p, double q, double initial_slope, const StepControl& ctl = {}) {
  detail::check_ode_domain(p, q);
  if (!(initial_slope > 0.0) || !std::isfinite(initial_slope))
    throw std::domain_error("initial slope must be positive");
  const detail::OdeRhs f{p / q - 1.0, p - 1.0};

  OdeSolution sol;
  sol.p = p;
  sol.q = q;
  sol.initial_slope = initial_slope;
  sol.grid.push_back({0.0, 0.0, initial_slope});

  double x = 0.0, g = 0.0, dg = initial_slope;
  double h = ctl.initial_step;
  std::optional<Termination> done;
  for (std::size_t step = 0; !done; ++step) {
    if (step >= ctl.max_steps) throw OdeNonFiniteError(x, "ode step budget exhausted at x = " + detail::format_double(x));
    const double u = 1.0 - g;
    if (dg > 0.0) h = std::min(h, ctl.eta * u / dg);
    h = std::min(h, ctl.x_max - x);
    const auto k1 = f(x, g, dg);
    if (!std::isfinite(k1[1]))
      throw OdeNonFiniteError(x, "non-finite ode state at x = " + detail::format_double(x));
    const auto r = detail::dp45_step(f, x, g, dg, h, k1, ctl);
    if (!(r.error <= 1.0)) {
      ++sol.rejected_steps;
      h *= std::isfinite(r.error) ? std::max(0.2, 0.9 * std::pow(r.error, -0.2)) : 0.25;
      if (h < 1e-15 * std::max(1.0, x))
        throw OdeNonFiniteError(x, "non-finite ode state at x = " + detail::format_double(x));
      continue;
    }
    x += h;
    g = r.g;
    dg = r.dg;
    sol.grid.push_back({x, g, dg});
    h *= r.error > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(r.error, -0.2))) : 5.0;
    if (1.0 - g < ctl.eps_g) done = Termination::ReachedOne;
    else if (dg < ctl.eps_slope) done = Termination::Plateau;
    else if (x >= ctl.x_max) done = Termination::XMax;
  }
  sol.termination = *done;

  const OdePoint& last = sol.grid.back();
  const double gap = 1.0 - last.g;
  if (sol.termination == Termination::ReachedOne) {
    const auto fit = detail::fit_endpoint(sol.grid);
    sol.terminal_slope = fit.a;
    const double eff = std::clamp(fit.gamma * (last.dg - std::max(fit.a, 0.0)) / last.dg, 0.0, 0.9);
    sol.support_radius = last.x + gap / ((1.0 - eff) * last.dg);
    if (std::abs(fit.a) < ctl.critical_slope) sol.classification = Classification::Critical;
    else sol.classification = fit.a > 0.0 ? Classification::Supercritical : Classification::Subcritical;
  } else {
    sol.terminal_slope = last.dg;
    sol.classification = (gap < ctl.critical_gap && last.dg < ctl.critical_slope) ? Classification::Critical
                                                                                 : Classification::Subcritical;
  }
  return sol;
}

/// Bisection predicate: G reaches 1 with a positive extrapolated end slope.
inline bool overshoots(const OdeSolution& s) {
  return s.termination == Termination::ReachedOne && s.terminal_slope > 0.0;
}

struct CriticalSlope {
  double c_pq;
  OdeSolution solution;
  std::size_t bisection_steps = 0;
};

/// Shooting: bisection on the initial slope between a non-overshooting and
/// an overshooting trajectory. The bracket is widened by halving lo and
/// doubling hi, at most 60 times each.
inline CriticalSlope find_critical_slope(double p, double q, double lo = 0.5, double hi = 4.0,
                                         double tol = 1e-8, const StepControl& ctl = {}) {
  detail::check_ode_domain(p, q);
  if (!(lo > 0.0 && hi > lo)) throw std::domain_error("bracket must satisfy 0 < lo < hi");
  int widen = 0;
  while (overshoots(integrate_g(p, q, lo, ctl))) {
    if (++widen > 60) throw std::runtime_error("invalid bracket: lower slope overshoots");
    lo *= 0.5;
  }
  widen = 0;
  while (!overshoots(integrate_g(p, q, hi, ctl))) {
    if (++widen > 60) throw std::runtime_error("invalid bracket: upper slope never reaches 1");
    lo = hi;
    hi *= 2.0;
  }
  std::size_t steps = 0;
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    (overshoots(integrate_g(p, q, mid, ctl)) ? hi : lo) = mid;
    ++steps;
  }
  const double c = 0.5 * (lo + hi);
  return {c, integrate_g(p, q, c, ctl), steps};
}

/// Symmetric density x -> G'(|x|)/2 from a trajectory, as a monotone
/// piecewise cubic Hermite interpolant; zero beyond the last grid point.
class ConjectureDensity {
 public:
  explicit ConjectureDensity(const OdeSolution& sol) {
    const detail::OdeRhs f{sol.p / sol.q - 1.0, sol.p - 1.0};
    const std::size_t m = sol.grid.size();
    x_.reserve(m);
    y_.reserve(m);
    d_.reserve(m);
    for (const auto& pt : sol.grid) {
      x_.push_back(pt.x);
      y_.push_back(0.5 * pt.dg);
      const double slope = 0.5 * f(pt.x, std::min(pt.g, std::nextafter(1.0, 0.0)), pt.dg)[1];
      d_.push_back(std::isfinite(slope) ? slope : 0.0);
    }
    // Fritsch-Carlson limiter keeps each cubic piece monotone.
    for (std::size_t i = 0; i + 1 < m; ++i) {
      const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
      if (delta == 0.0) {
        d_[i] = d_[i + 1] = 0.0;
        continue;
      }
      double a = d_[i] / delta, b = d_[i + 1] / delta;
      if (a < 0.0) d_[i] = a = 0.0;
      if (b < 0.0) d_[i + 1] = b = 0.0;
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        d_[i] = tau * a * delta;
        d_[i + 1] = tau * b * delta;
      }
    }
  }

  double operator()(double x) const {
    const double a = std::abs(x);
    if (a > x_.back()) return 0.0;
    const auto it = std::upper_bound(x_.begin(), x_.end(), a);
    const std::size_t i = it == x_.end() ? x_.size() - 2 : static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (a - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
           (t3 - t2) * h * d_[i + 1];
  }

  // Exact integral of the interpolant over the real line.
  double total_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double h = x_[i + 1] - x_[i];
      s += 0.5 * h * (y_[i] + y_[i + 1]) + h * h / 12.0 * (d_[i] - d_[i + 1]);
    }
    return 2.0 * s;
  }

  double support() const noexcept { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

inline ConjectureDensity conjecture_density(double p, double q, const StepControl& ctl = {}) {
  return ConjectureDensity(find_critical_slope(p, q, 0.5, 4.0, 1e-8, ctl).solution);
}

/// int_0^r x^p (1-G)^{p/q-1} G' dx - 1, integrated in w = (1-G)^{p/q}/(p/q)
/// where the integrand x^p is bounded.
inline double energy_constraint_residual(const OdeSolution& sol) {
  const double alpha = sol.p / sol.q - 1.0;
  const double beta = alpha + 1.0;
  const auto& grid = sol.grid;
  auto w = [&](const OdePoint& pt) { return std::pow(std::max(1.0 - pt.g, 0.0), beta) / beta; };
  // d(x^p)/dw = -p x^{p-1} / ((1-G)^alpha G')
  auto dfdw = [&](const OdePoint& pt) {
    const double u = 1.0 - pt.g;
    const double den = std::pow(u, alpha) * pt.dg;
    return den > 0.0 ? -sol.p * std::pow(pt.x, sol.p - 1.0) / den : 0.0;
  };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double wa = w(grid[i]), wb = w(grid[i + 1]);
    const double fa = std::pow(grid[i].x, sol.p), fb = std::pow(grid[i + 1].x, sol.p);
    const double dw = wa - wb;
    s += 0.5 * dw * (fa + fb) + dw * dw / 12.0 * (dfdw(grid[i + 1]) - dfdw(grid[i]));
  }
  if (sol.termination == Termination::ReachedOne && std::isfinite(sol.support_radius)) {
    const auto& last = grid.back();
    s += w(last) * 0.5 * (std::pow(last.x, sol.p) + std::pow(sol.support_radius, sol.p));
  }
  return s - 1.0;
}

struct QuantileConstraint {
  double max_value = 0.0;        // max over rows of the quantile-form constraint
  double max_discrepancy = 0.0;  // max |quantile form - rearrangement form|
};

/// Evaluates (1/n) sum_i (i/n)^{p/q-1} (x*_i)^p per row of a tilde batch and
/// compares it with n^{-p/q} sum_i i^{p/q-1} (x*_i)^p.
inline QuantileConstraint quantile_constraint_check(const SampleBatch& batch, double p, QIndex q) {
  if (q.is_infinite()) throw std::domain_error("quantile constraint requires finite q");
  if (batch.params.normalization != Normalization::Tilde || batch.params.p != 1.0)
    throw std::domain_error("quantile constraint expects a tilde-normalized p = 1 batch");
  if (!(p >= 1.0)) throw std::domain_error("quantile constraint requires p >= 1");
  const std::size_t n = batch.params.n;
  const double nd = static_cast<double>(n);
  const double e = p / q.value() - 1.0;
  std::vector<double> jw(n), kw(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double id = static_cast<double>(i + 1);
    jw[i] = std::pow(id / nd, e) / nd;
    kw[i] = std::pow(id, e);
  }
  const double nscale = std::pow(nd, -p / q.value());
  QuantileConstraint out;
  for (std::size_t r = 0; r < batch.count; ++r) {
    const auto xs = decreasing_rearrangement(batch.row(r));
    CompensatedSum a, b;
    for (std::size_t i = 0; i < n; ++i) {
      const double xp = std::pow(xs[i], p);
      a += jw[i] * xp;
      b += kw[i] * xp;
    }
    const double quantile_form = a.value();
    const double direct = nscale * b.value();
    out.max_value = std::max(out.max_value, quantile_form);
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(quantile_form - direct));
  }
  return out;
}

struct FamilyMember {
  double slope;
  std::optional<OdeSolution> solution;
  std::string error;
};

/// One trajectory per slope, integrated in parallel. Failures are recorded
/// per member.
inline std::vector<FamilyMember> figure1_family(double p, double q, std::span<const double> slopes,
                                                const StepControl& ctl = {},
                                                unsigned workers = default_workers()) {
  std::vector<FamilyMember> out(slopes.size());
  parallel_for(slopes.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i].slope = slopes[i];
      try {
        out[i].solution = integrate_g(p, q, slopes[i], ctl);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  });
  return out;
}

/// CSV export: comment header per trajectory, then slope,classification,x,G,dG.
inline void write_family_csv(std::ostream& out, double p, double q, std::span<const FamilyMember> family) {
  out << "# p=" << detail::format_double(p) << " q=" << detail::format_double(q) << '\n';
  for (const auto& m : family) {
    out << "# slope=" << detail::format_double(m.slope);
    if (m.solution)
      out << " classification=" << to_string(m.solution->classification)
          << " termination=" << to_string(m.solution->termination)
          << " support_radius=" << detail::format_double(m.solution->support_radius)
          << " terminal_slope=" << detail::format_double(m.solution->terminal_slope);
    else
      out << " error=\"" << m.error << '"';
    out << '\n';
  }
  out << "slope,classification,x,G,dG\n";
  for (const auto& m : family) {
    if (!m.solution) continue;
    for (const auto& pt : m.solution->grid)
      out << detail::format_double(m.slope) << ',' << to_string(m.solution->classification) << ','
          << detail::format_double(pt.x) << ',' << detail::format_double(pt.g) << ','
          << detail::format_double(pt.dg) << '\n';
  }
}

}  // namespace lorentz
