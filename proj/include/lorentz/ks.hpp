#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorentz/extended_real.hpp"
#include "lorentz/limit_law.hpp"
#include "lorentz/special.hpp"

namespace lorentz {

/// Reference distribution for goodness-of-fit tests.
class ComparisonLaw {
 public:
  enum class Kind { NuQ1, Laplace, Gaussian, Gumbel, Empirical };

  static ComparisonLaw nu_q1(QIndex q) {
    ComparisonLaw law(Kind::NuQ1);
    law.limit_ = std::make_shared<LimitLaw>(q);
    return law;
  }
  // Two-sided exponential density exp(-|x|)/2, the q -> 1 limit of nu_{q,1}.
  static ComparisonLaw laplace() { return ComparisonLaw(Kind::Laplace); }
  static ComparisonLaw gaussian(double mean, double variance) {
    if (!(variance > 0.0)) throw std::domain_error("gaussian variance must be positive");
    ComparisonLaw law(Kind::Gaussian);
    law.a_ = mean;
    law.b_ = variance;
    return law;
  }
  // Gumbel CDF exp(-exp(-(x - shift))).
  static ComparisonLaw gumbel(double shift) {
    ComparisonLaw law(Kind::Gumbel);
    law.a_ = shift;
    return law;
  }
  static ComparisonLaw empirical(std::vector<double> reference) {
    if (reference.empty()) throw std::domain_error("empirical law needs a non-empty reference");
    for (double v : reference)
      if (!std::isfinite(v)) throw std::domain_error("empirical reference has non-finite values");
    std::sort(reference.begin(), reference.end());
    ComparisonLaw law(Kind::Empirical);
    law.reference_ = std::make_shared<const std::vector<double>>(std::move(reference));
    return law;
  }

  Kind kind() const noexcept { return kind_; }

  double cdf(double x) const {
    switch (kind_) {
      case Kind::NuQ1: return limit_->cdf(x);
      case Kind::Laplace: return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
      case Kind::Gaussian: return normal_cdf(x, a_, b_);
      case Kind::Gumbel: return std::exp(-std::exp(-(x - a_)));
      case Kind::Empirical: {
        const auto& r = *reference_;
        return static_cast<double>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) /
               static_cast<double>(r.size());
      }
    }
    return 0.0;
  }

  // Density where one exists in closed form; NaN for empirical laws.
  double density(double x) const {
    switch (kind_) {
      case Kind::NuQ1: return limit_->density(x);
      case Kind::Laplace: return 0.5 * std::exp(-std::abs(x));
      case Kind::Gaussian:
        return std::exp(-0.5 * (x - a_) * (x - a_) / b_) / std::sqrt(2.0 * std::numbers::pi * b_);
      case Kind::Gumbel: {
        const double z = x - a_;
        return std::exp(-z - std::exp(-z));
      }
      case Kind::Empirical: return std::numeric_limits<double>::quiet_NaN();
    }
    return 0.0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::NuQ1: return "nu_q1(q=" + limit_->q().to_string() + ")";
      case Kind::Laplace: return "laplace";
      case Kind::Gaussian: return "gaussian(mean=" + detail::format_double(a_) + ",var=" + detail::format_double(b_) + ")";
      case Kind::Gumbel: return "gumbel(shift=" + detail::format_double(a_) + ")";
      case Kind::Empirical: return "empirical(m=" + std::to_string(reference_->size()) + ")";
    }
    return "";
  }

  const std::vector<double>* reference() const noexcept { return reference_.get(); }

 private:
  explicit ComparisonLaw(Kind k) : kind_(k) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 1.0;
  std::shared_ptr<const LimitLaw> limit_;
  std::shared_ptr<const std::vector<double>> reference_;
};

struct KsResult {
  double statistic;
  double p_value;
};

namespace detail {

inline std::vector<double> sorted_finite_copy(std::span<const double> data) {
  if (data.empty()) throw std::domain_error("KS test needs non-empty data");
  std::vector<double> s(data.begin(), data.end());
  for (double v : s)
    if (!std::isfinite(v)) throw std::domain_error("KS test data has non-finite values");
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value
/// (effective size nm/(n+m)).
inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const auto x = detail::sorted_finite_copy(a);
  const auto y = detail::sorted_finite_copy(b);
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  return {d, kolmogorov_survival(std::sqrt(ne) * d)};
}

/// One-sample KS distance sup |F_n - F| and its asymptotic p-value. An
/// Empirical law turns this into the two-sample test.
inline KsResult ks_one_sample(std::span<const double> data, const ComparisonLaw& law) {
  if (law.kind() == ComparisonLaw::Kind::Empirical) return ks_two_sample(data, *law.reference());
  const auto x = detail::sorted_finite_copy(data);
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = law.cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

}  // namespace lorentz
