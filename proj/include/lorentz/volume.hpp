#pragma once

#include <cmath>
#include <numbers>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lorentz/extended_real.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/special.hpp"
#include "lorentz/summation.hpp"

namespace lorentz {

struct BallVolume {
  double log_volume;
  // exp(log_volume) when it is a normal double, empty on overflow/underflow.
  std::optional<double> volume;
};

/// Exact volume of the unit ball of l_{q,1}^n, 2^n prod_j kappa_q(j)^{-1},
/// evaluated in log space.
inline BallVolume ball_volume(const KappaTable& table) {
  const std::size_t n = table.size();
  CompensatedSum log_sum(static_cast<double>(n) * std::numbers::ln2);
  for (double k : table.values()) log_sum += -std::log(k);
  BallVolume out{log_sum.value(), std::nullopt};
  const double v = std::exp(out.log_volume);
  if (std::isnormal(v)) out.volume = v;
  return out;
}

inline BallVolume ball_volume(QIndex q, std::size_t n) { return ball_volume(KappaTable(q, n)); }

// vol^{1/n} computed from the exact product.
inline double volume_radius(QIndex q, std::size_t n) {
  return std::exp(ball_volume(q, n).log_volume / static_cast<double>(n));
}

/// Leading-order asymptotics of vol_n(B_{q,1}^n)^{1/n}:
/// (2/q) e^{1/q} n^{-1/q} for finite q and 2 / log n for q = inf (needs n >= 2).
inline double volume_radius_asymptotic(QIndex q, std::size_t n) {
  if (n == 0) throw std::domain_error("n must be >= 1");
  const double nd = static_cast<double>(n);
  if (q.is_infinite()) {
    if (n < 2) throw std::domain_error("q = inf asymptotic radius needs n >= 2");
    return 2.0 / std::log(nd);
  }
  const double qv = q.value();
  return (2.0 / qv) * std::exp(1.0 / qv) * std::pow(nd, -1.0 / qv);
}

/// vol_n(B_r^n)^{1/n} = 2 Gamma(1 + 1/r) / Gamma(1 + n/r)^{1/n}; 2 for r = inf.
inline double lr_ball_volume_radius(ExtendedReal r, std::size_t n) {
  if (n == 0) throw std::domain_error("n must be >= 1");
  if (r.is_infinite()) return 2.0;
  const double rv = r.value();
  const double nd = static_cast<double>(n);
  return 2.0 * std::exp(std::lgamma(1.0 + 1.0 / rv) - std::lgamma(1.0 + nd / rv) / nd);
}

enum class Normalization { Unit, Tilde, VolNorm };

inline std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::Unit: return "unit";
    case Normalization::Tilde: return "tilde";
    case Normalization::VolNorm: return "vol";
  }
  return "unit";
}

inline Normalization parse_normalization(std::string_view s) {
  if (s == "unit") return Normalization::Unit;
  if (s == "tilde") return Normalization::Tilde;
  if (s == "vol" || s == "volnorm") return Normalization::VolNorm;
  throw std::invalid_argument("unknown normalization '" + std::string(s) + "'");
}

/// Identifies a (possibly rescaled) Lorentz ball B_{q,p}^n.
struct BallParams {
  QIndex q = QIndex::finite(2.0);
  double p = 1.0;
  std::size_t n = 1;
  Normalization normalization = Normalization::Unit;

  void validate() const {
    if (n == 0) throw std::domain_error("dimension n must be >= 1");
    if (!std::isfinite(p) || p < 1.0) throw std::domain_error("p must satisfy p >= 1");
    if (q.is_finite() && p > q.value()) throw std::domain_error("p must satisfy p <= q");
  }

  friend bool operator==(const BallParams&, const BallParams&) = default;
};

/// Factor s with normalized ball = s * B_{q,1}^n.
inline double normalization_scale(const BallParams& params, const KappaTable* table = nullptr) {
  params.validate();
  const double nd = static_cast<double>(params.n);
  switch (params.normalization) {
    case Normalization::Unit:
      return 1.0;
    case Normalization::Tilde:
      return params.q.is_infinite() ? std::log(nd + 1.0) : std::pow(nd, params.q.reciprocal());
    case Normalization::VolNorm: {
      const BallVolume v = table && table->size() == params.n && table->q() == params.q
                               ? ball_volume(*table)
                               : ball_volume(params.q, params.n);
      return std::exp(-v.log_volume / nd);
    }
  }
  return 1.0;
}

}  // namespace lorentz
