#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace lorentz {

inline constexpr double kEulerGamma = 0.5772156649015329;

namespace detail {

// Tail of Stirling's series for log Gamma(z), z >= 20.
inline double stirling_tail(double z) {
  const double z2 = z * z;
  return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z;
}

}  // namespace detail

/// log Gamma(x + a) - log Gamma(x) for x > 0, x + a > 0.
/// Uses a direct Stirling expansion of the difference once both arguments
/// reach 20.
inline double log_gamma_ratio(double x, double a) {
  if (!(x > 0.0) || !(x + a > 0.0)) throw std::domain_error("log_gamma_ratio: arguments must be positive");
  if (x < 20.0 || x + a < 20.0) return std::lgamma(x + a) - std::lgamma(x);
  return (x - 0.5) * std::log1p(a / x) + a * std::log(x + a) - a +
         detail::stirling_tail(x + a) - detail::stirling_tail(x);
}

inline double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

/// P[K > lambda] for the Kolmogorov limit distribution.
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series for the CDF converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * c);
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  const double p = 2.0 * sum;
  return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

/// Upper tail of the chi-square distribution.
inline double chi_square_survival(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace lorentz
