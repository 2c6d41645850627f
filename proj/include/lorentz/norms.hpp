#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lorentz/extended_real.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/summation.hpp"

namespace lorentz {

// Non-increasing rearrangement of |x|.
inline std::vector<double> decreasing_rearrangement(std::span<const double> x) {
  std::vector<double> a(x.size());
  std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

inline void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::domain_error("vector has non-finite entries");
}

// sum_i w_i x*_i with precomputed weights (w.size() must be >= x.size()).
inline double lorentz_norm(std::span<const double> x, std::span<const double> weights) {
  check_finite(x);
  if (weights.size() < x.size()) throw std::invalid_argument("weight table too short");
  const auto a = decreasing_rearrangement(x);
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s += weights[i] * a[i];
  return s.value();
}

/// The (q,1) Lorentz norm sum_i i^{1/q-1} x*_i; weight 1/i for q = inf.
inline double lorentz_norm(std::span<const double> x, QIndex q) {
  return lorentz_norm(x, lorentz_weights(q, x.size()));
}

/// l_r norm for r in (0, inf]; max |x_i| for r = inf.
inline double lr_norm(std::span<const double> x, ExtendedReal r) {
  check_finite(x);
  if (r.is_infinite()) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  const double rv = r.value();
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  CompensatedSum s;
  for (double v : x) s += std::pow(std::abs(v) / m, rv);
  return m * std::pow(s.value(), 1.0 / rv);
}

}  // namespace lorentz
