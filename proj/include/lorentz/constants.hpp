#pragma once

#include <cmath>
#include <numbers>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "lorentz/extended_real.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/special.hpp"
#include "lorentz/summation.hpp"

namespace lorentz {

// Fluctuation regime of the maximum coordinate.
enum class CltRegime { Series, LogNormal, Normal };

inline std::string_view to_string(CltRegime r) {
  switch (r) {
    case CltRegime::Series: return "series";
    case CltRegime::LogNormal: return "lognormal";
    case CltRegime::Normal: return "normal";
  }
  return "series";
}

struct CltConstants {
  double mu_qn;                    // centring (1/n) sum_j n^{1/q} / kappa_q(j)
  std::optional<double> sigma_q2;  // limit variance: 1/4 for q = 2, 1/(q(q-1)^2(q-2)) for q > 2
  CltRegime regime;
};

inline CltConstants clt_constants(const KappaTable& table) {
  const QIndex q = table.q();
  if (q.is_infinite()) throw std::domain_error("max-norm fluctuations are not defined for q = inf");
  const double qv = q.value();
  const double nd = static_cast<double>(table.size());
  const double scale = std::pow(nd, 1.0 / qv);
  CompensatedSum s;
  for (double k : table.values()) s += scale / k;
  CltConstants out{s.value() / nd, std::nullopt, CltRegime::Series};
  if (qv == 2.0) {
    out.regime = CltRegime::LogNormal;
    out.sigma_q2 = 0.25;
  } else if (qv > 2.0) {
    out.regime = CltRegime::Normal;
    out.sigma_q2 = 1.0 / (qv * (qv - 1.0) * (qv - 1.0) * (qv - 2.0));
  }
  return out;
}

inline CltConstants clt_constants(QIndex q, std::size_t n) {
  if (q.is_infinite()) throw std::domain_error("max-norm fluctuations are not defined for q = inf");
  return clt_constants(KappaTable(q, n));
}

namespace detail {

inline void check_lln_domain(QIndex q, ExtendedReal r) {
  if (q.is_finite() && !(q.value() > 1.0)) throw std::domain_error("requires q > 1");
  (void)r;  // ExtendedReal is positive by construction
}

// log of (Gamma(r+1) Gamma(1+a) / Gamma(r+1+a)) with a = q/(q-1).
inline double log_beta_moment(double qv, double rv) {
  const double a = qv / (qv - 1.0);
  return std::lgamma(rv + 1.0) - log_gamma_ratio(1.0 + a, rv);
}

}  // namespace detail

/// Limit m_{q,r} of n^{-1/r} ||X||_r for X uniform on the volume-normalized ball.
///
/// Valid for q > 1 and any r > 0 (both possibly infinite).
inline double lln_constant(QIndex q, ExtendedReal r) {
  detail::check_lln_domain(q, r);
  if (q.is_infinite()) {
    if (r.is_infinite()) return 0.5;
    const double rv = r.value();
    return 0.5 * std::pow(1.0 / (rv + 1.0), 1.0 / rv);
  }
  const double qv = q.value();
  const double front = 0.5 * std::exp(-1.0 / qv) * qv / (qv - 1.0);
  if (r.is_infinite()) return front;
  const double rv = r.value();
  return front * std::exp(detail::log_beta_moment(qv, rv) / rv);
}

/// c_{q,r} = lim 1 / (n^{1/r} vol_n(B_r^n)^{1/n}); independent of q.
inline double lr_radius_limit(ExtendedReal r) {
  if (r.is_infinite()) return 0.5;
  const double rv = r.value();
  return 1.0 / (2.0 * std::pow(std::numbers::e * rv, 1.0 / rv) * std::tgamma(1.0 + 1.0 / rv));
}

/// Threshold A_{q,r} from its closed form, all four finiteness branches.
inline double intersection_threshold(QIndex q, ExtendedReal r) {
  detail::check_lln_domain(q, r);
  if (r.is_infinite()) {
    if (q.is_infinite()) return 1.0;
    const double qv = q.value();
    return std::exp(1.0 / qv) * (qv - 1.0) / qv;
  }
  const double rv = r.value();
  const double g = std::tgamma(1.0 + 1.0 / rv);
  if (q.is_infinite()) return std::pow((rv + 1.0) / (rv * std::numbers::e), 1.0 / rv) / g;
  const double qv = q.value();
  const double front = std::exp(1.0 / qv - 1.0 / rv) * (qv - 1.0) / qv / (g * std::pow(rv, 1.0 / rv));
  return front * std::exp(-detail::log_beta_moment(qv, rv) / rv);
}

// The same threshold assembled as c_{q,r} / m_{q,r}.
inline double intersection_threshold_from_ratio(QIndex q, ExtendedReal r) {
  return lr_radius_limit(r) / lln_constant(q, r);
}

/// lim_{q -> 1} A_{q,r} = e^{1-1/r} / (Gamma(1+1/r) Gamma(r+1)^{1/r} r^{1/r}), finite r.
inline double intersection_threshold_q1_limit(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::domain_error("needs finite r > 0");
  return std::exp(1.0 - 1.0 / r) /
         (std::tgamma(1.0 + 1.0 / r) * std::exp(std::lgamma(r + 1.0) / r) * std::pow(r, 1.0 / r));
}

}  // namespace lorentz
