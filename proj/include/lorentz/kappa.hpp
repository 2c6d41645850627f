#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "lorentz/extended_real.hpp"
#include "lorentz/summation.hpp"

namespace lorentz {

/// Prefix sums kappa_q(j) = sum_{i<=j} i^{1/q-1}, j = 1..n.
///
/// For q = inf the weights are 1/i and the table holds harmonic numbers. The
/// table is immutable once built and can be shared between threads.
class KappaTable {
 public:
  KappaTable(QIndex q, std::size_t n) : q_(q), values_(n) {
    if (n == 0) throw std::domain_error("kappa table needs n >= 1");
    const double exponent = q.weight_exponent();
    CompensatedSum sum;
    for (std::size_t j = 1; j <= n; ++j) {
      const double w = q.is_infinite() ? 1.0 / static_cast<double>(j)
                                       : std::pow(static_cast<double>(j), exponent);
      sum += w;
      values_[j - 1] = sum.value();
    }
  }

  QIndex q() const noexcept { return q_; }
  std::size_t size() const noexcept { return values_.size(); }

  // 1-based access matching kappa_q(j).
  double operator()(std::size_t j) const { return values_.at(j - 1); }

  // 0-based contiguous view; element k holds kappa_q(k+1).
  std::span<const double> values() const noexcept { return values_; }

 private:
  QIndex q_;
  std::vector<double> values_;
};

inline KappaTable kappa(QIndex q, std::size_t n) { return KappaTable(q, n); }

// Lorentz weights i^{1/q-1}, i = 1..n (0-based storage).
inline std::vector<double> lorentz_weights(QIndex q, std::size_t n) {
  std::vector<double> w(n);
  const double exponent = q.weight_exponent();
  for (std::size_t i = 1; i <= n; ++i)
    w[i - 1] = q.is_infinite() ? 1.0 / static_cast<double>(i)
                               : std::pow(static_cast<double>(i), exponent);
  return w;
}

}  // namespace lorentz
