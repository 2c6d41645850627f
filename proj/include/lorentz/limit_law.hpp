#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lorentz/extended_real.hpp"

namespace lorentz {

/// Limit law nu_{q,1} of a single coordinate of the tilde-normalized ball.
///
/// Density f(x) = (q/2) (1 - (q-1)|x|)^{1/(q-1)} on |x| <= 1/(q-1), and the
/// uniform density 1/2 on [-1, 1] for q = inf. Defined for q > 1 only.
class LimitLaw {
 public:
  explicit LimitLaw(QIndex q) : q_(q) {
    if (q.is_finite() && !(q.value() > 1.0))
      throw std::domain_error("limit law requires q > 1");
  }

  QIndex q() const noexcept { return q_; }

  double support() const noexcept { return q_.is_infinite() ? 1.0 : 1.0 / (q_.value() - 1.0); }

  double density(double x) const noexcept {
    const double a = std::abs(x);
    if (a > support()) return 0.0;
    if (q_.is_infinite()) return 0.5;
    const double q = q_.value();
    return 0.5 * q * std::pow(1.0 - (q - 1.0) * a, 1.0 / (q - 1.0));
  }

  double cdf(double x) const noexcept {
    const double a = std::abs(x);
    // mass of [|x|, support] on one side
    double tail;
    if (a >= support()) {
      tail = 0.0;
    } else if (q_.is_infinite()) {
      tail = 0.5 * (1.0 - a);
    } else {
      const double q = q_.value();
      tail = 0.5 * std::pow(1.0 - (q - 1.0) * a, q / (q - 1.0));
    }
    return x >= 0.0 ? 1.0 - tail : tail;
  }

  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile needs u in (0,1)");
    const double tail = u >= 0.5 ? 1.0 - u : u;  // one-sided tail mass
    double a;
    if (q_.is_infinite()) {
      a = 1.0 - 2.0 * tail;
    } else {
      const double q = q_.value();
      a = (1.0 - std::pow(2.0 * tail, (q - 1.0) / q)) / (q - 1.0);
    }
    return u >= 0.5 ? a : -a;
  }

 private:
  QIndex q_;
};

inline LimitLaw limit_law(QIndex q) { return LimitLaw(q); }

/// Limit profile of the ordered coordinates:
/// G_q(t) = (1 - t^{1-1/q}) / (q-1), G_inf(t) = 1 - t, t in [0,1].
inline double g_profile(QIndex q, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("g_profile needs t in [0,1]");
  if (q.is_infinite()) return 1.0 - t;
  const double qv = q.value();
  if (!(qv > 1.0)) throw std::domain_error("g_profile requires q > 1");
  return (1.0 - std::pow(t, 1.0 - 1.0 / qv)) / (qv - 1.0);
}

/// Rate delta_n for the uniform approximation of the ordered coordinates by
/// the G_q profile.
inline double profile_error_rate(QIndex q, std::size_t n) {
  if (n < 2) throw std::domain_error("profile_error_rate needs n >= 2");
  const double nd = static_cast<double>(n);
  if (q.is_infinite()) return 1.0 / std::log(nd);
  const double qv = q.value();
  if (!(qv > 1.0)) throw std::domain_error("profile_error_rate requires q > 1");
  if (qv < 2.0) return std::pow(nd, -(1.0 - 1.0 / qv));
  if (qv == 2.0) return std::log(nd) / std::sqrt(nd);
  return std::pow(nd, -1.0 / qv);
}

}  // namespace lorentz
