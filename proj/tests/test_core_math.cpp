#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lorentz/constants.hpp"
#include "lorentz/extended_real.hpp"
#include "lorentz/kappa.hpp"
#include "lorentz/limit_law.hpp"
#include "lorentz/norms.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/special.hpp"
#include "lorentz/summation.hpp"
#include "lorentz/volume.hpp"

using namespace lorentz;

namespace {

const QIndex kInfQ = QIndex::infinity();
const ExtendedReal kInfR = ExtendedReal::infinity();

double shoelace(const std::vector<std::pair<double, double>>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto [x0, y0] = poly[i];
    const auto [x1, y1] = poly[(i + 1) % poly.size()];
    a += x0 * y1 - x1 * y0;
  }
  return 0.5 * std::abs(a);
}

}  // namespace

// ---------------------------------------------------------------- ExtendedReal

TEST(ExtendedReal, ParsesInfinityTokens) {
  EXPECT_TRUE(ExtendedReal::parse("inf").is_infinite());
  EXPECT_TRUE(ExtendedReal::parse("INF").is_infinite());
  EXPECT_TRUE(QIndex::parse("Infinity").is_infinite());
  EXPECT_DOUBLE_EQ(QIndex::parse("2.5").value(), 2.5);
  EXPECT_EQ(QIndex::parse("inf").to_string(), "inf");
  EXPECT_EQ(QIndex::parse("1.5").to_string(), "1.5");
}

TEST(ExtendedReal, RejectsOutOfDomain) {
  EXPECT_THROW(QIndex::finite(0.5), std::domain_error);
  EXPECT_THROW(QIndex::parse("abc"), std::invalid_argument);
  EXPECT_THROW(ExtendedReal::finite(0.0), std::domain_error);
  EXPECT_THROW(ExtendedReal::finite(-1.0), std::domain_error);
}

TEST(ExtendedReal, WeightExponentAndReciprocal) {
  EXPECT_DOUBLE_EQ(QIndex::finite(2).weight_exponent(), -0.5);
  EXPECT_DOUBLE_EQ(kInfQ.weight_exponent(), -1.0);
  EXPECT_EQ(kInfQ.reciprocal(), 0.0);
  EXPECT_TRUE(std::isinf(kInfQ.value()));
}

// ---------------------------------------------------------------- summation

TEST(CompensatedSum, RecoversCancellingTerms) {
  CompensatedSum s;
  s += 1.0;
  s += 1e100;
  s += 1.0;
  s += -1e100;
  EXPECT_EQ(s.value(), 2.0);
}

TEST(CompensatedSum, HarmonicSumMatchesHighPrecision) {
  // H_{10^6} to 20 digits.
  CompensatedSum s;
  for (int i = 1; i <= 1'000'000; ++i) s += 1.0 / i;
  EXPECT_NEAR(s.value(), 14.392726722865723631, 1e-13);
}

// ---------------------------------------------------------------- kappa

TEST(Kappa, SmallValues) {
  const KappaTable k2(QIndex::finite(2), 3);
  EXPECT_DOUBLE_EQ(k2(1), 1.0);
  EXPECT_NEAR(k2(2), 1.7071067811865475, 1e-15);
  EXPECT_NEAR(k2(3), 2.2844570503761732, 1e-15);
  const KappaTable kinf(kInfQ, 4);
  EXPECT_NEAR(kinf(4), 25.0 / 12.0, 1e-15);
  const KappaTable k1(QIndex::finite(1), 5);
  for (std::size_t j = 1; j <= 5; ++j) EXPECT_DOUBLE_EQ(k1(j), static_cast<double>(j));
}

TEST(Kappa, RejectsEmptyTable) { EXPECT_THROW(KappaTable(QIndex::finite(2), 0), std::domain_error); }

TEST(Kappa, StrictlyIncreasing) {
  for (QIndex q : {QIndex::finite(1.0), QIndex::finite(1.5), QIndex::finite(4), kInfQ}) {
    const KappaTable t(q, 100'000);
    for (std::size_t j = 1; j < t.size(); ++j) ASSERT_LT(t.values()[j - 1], t.values()[j]);
  }
}

TEST(Kappa, InfiniteQStaysWithinOneOfLog) {
  const KappaTable t(kInfQ, 1'000'000);
  double worst = 0.0;
  for (std::size_t j = 1; j <= t.size(); ++j)
    worst = std::max(worst, std::abs(t(j) - std::log(static_cast<double>(j) + 1.0)));
  EXPECT_LE(worst, 1.0);
}

TEST(Kappa, FiniteQDeviationFromPowerIsBounded) {
  // |kappa_q(j) - q j^{1/q}| stays bounded and its running maximum settles.
  for (double q : {1.5, 2.0, 4.0}) {
    const KappaTable t(QIndex::finite(q), 1'000'000);
    auto dev = [&](std::size_t j) { return std::abs(t(j) - q * std::pow(static_cast<double>(j), 1.0 / q)); };
    double sup_small = 0.0, sup_all = 0.0;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      sup_all = std::max(sup_all, dev(j));
      if (j <= 1000) sup_small = sup_all;
    }
    EXPECT_LT(sup_all, q + 1.0) << "q=" << q;
    // The limit is |zeta(1 - 1/q)| which the tail approaches from below.
    EXPECT_LT(sup_all - sup_small, 0.05) << "q=" << q;
  }
}

TEST(Kappa, PowerSumAsymptoticsHaveStableConstant) {
  for (double alpha : {-0.5, 0.5, 1.5}) {
    std::vector<double> constants;
    for (std::size_t n : {100, 1000, 10000}) {
      CompensatedSum s;
      for (std::size_t i = 1; i <= n; ++i) s += std::pow(static_cast<double>(i), alpha);
      const double nd = static_cast<double>(n);
      const double err = std::abs(s.value() - std::pow(nd, alpha + 1.0) / (alpha + 1.0));
      constants.push_back(err / std::pow(nd, std::max(0.0, alpha)));
    }
    const auto [lo, hi] = std::minmax_element(constants.begin(), constants.end());
    EXPECT_LT(*hi, 2.0) << "alpha=" << alpha;
    EXPECT_LT(*hi - *lo, 0.1) << "alpha=" << alpha;
  }
}

// ---------------------------------------------------------------- norms

TEST(LorentzNorm, KnownValues) {
  const std::vector<double> x{3.0, -4.0, 0.0};
  EXPECT_NEAR(lorentz_norm(x, QIndex::finite(2)), 4.0 + 3.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lorentz_norm(x, kInfQ), 4.0 + 1.5, 1e-15);
  EXPECT_NEAR(lorentz_norm(x, QIndex::finite(1)), 7.0, 1e-15);
  EXPECT_EQ(lr_norm(x, kInfR), 4.0);
  EXPECT_NEAR(lr_norm(x, ExtendedReal::finite(2)), 5.0, 1e-15);
}

TEST(LorentzNorm, RejectsNonFinite) {
  const std::vector<double> x{1.0, std::nan("")};
  EXPECT_THROW(lorentz_norm(x, QIndex::finite(2)), std::domain_error);
}

TEST(LorentzNorm, PermutationAndSignInvariant) {
  StreamRng rng({123, 0}, 0);
  for (QIndex q : {QIndex::finite(1.3), QIndex::finite(3), kInfQ}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(17);
      for (auto& v : x) v = rng.uniform_signed() * 5.0;
      std::vector<double> y = x;
      std::shuffle(y.begin(), y.end(), rng);
      for (auto& v : y)
        if (rng() & 1u) v = -v;
      ASSERT_EQ(lorentz_norm(x, q), lorentz_norm(y, q));
    }
  }
}

TEST(LorentzNorm, NormAxioms) {
  StreamRng rng({7, 1}, 0);
  const QIndex q = QIndex::finite(2.5);
  for (int trial = 0; trial < 10'000; ++trial) {
    std::vector<double> x(8), y(8), s(8);
    for (std::size_t i = 0; i < 8; ++i) {
      x[i] = rng.uniform_signed();
      y[i] = rng.uniform_signed();
      s[i] = x[i] + y[i];
    }
    const double nx = lorentz_norm(x, q), ny = lorentz_norm(y, q);
    ASSERT_GE(nx, 0.0);
    ASSERT_LE(lorentz_norm(s, q), nx + ny + 1e-12);
    const double lambda = -3.7;
    std::vector<double> lx(x);
    for (auto& v : lx) v *= lambda;
    ASSERT_NEAR(lorentz_norm(lx, q), std::abs(lambda) * nx, 1e-12 * std::abs(lambda) * nx + 1e-15);
  }
  const std::vector<double> zero(5, 0.0);
  EXPECT_EQ(lorentz_norm(zero, q), 0.0);
}

// ---------------------------------------------------------------- volume

TEST(Volume, ProductFormulaExample) {
  const auto v = ball_volume(QIndex::finite(2), 3);
  ASSERT_TRUE(v.volume.has_value());
  EXPECT_NEAR(*v.volume, 2.0513808741747038, 1e-13);
  EXPECT_NEAR(v.log_volume, std::log(2.0513808741747038), 1e-13);
}

TEST(Volume, PlanarBallMatchesShoelaceArea) {
  for (QIndex q : {QIndex::finite(1.5), QIndex::finite(2), QIndex::finite(5), kInfQ}) {
    const double a = 1.0 / KappaTable(q, 2)(2);
    const std::vector<std::pair<double, double>> octagon{{1, 0}, {a, a}, {0, 1}, {-a, a},
                                                         {-1, 0}, {-a, -a}, {0, -1}, {a, -a}};
    EXPECT_NEAR(*ball_volume(q, 2).volume, shoelace(octagon), 1e-14);
  }
}

TEST(Volume, UnderflowKeepsLogVolume) {
  const auto v = ball_volume(QIndex::finite(2), 5000);
  EXPECT_FALSE(v.volume.has_value());
  EXPECT_TRUE(std::isfinite(v.log_volume));
  EXPECT_LT(v.log_volume, -700.0);
}

TEST(Volume, RadiusApproachesAsymptotic) {
  for (double q : {1.5, 2.0, 3.0}) {
    const double ratio1 = volume_radius(QIndex::finite(q), 1000) / volume_radius_asymptotic(QIndex::finite(q), 1000);
    const double ratio2 =
        volume_radius(QIndex::finite(q), 100000) / volume_radius_asymptotic(QIndex::finite(q), 100000);
    EXPECT_LT(std::abs(ratio2 - 1.0), std::abs(ratio1 - 1.0)) << "q=" << q;
  }
  EXPECT_THROW(volume_radius_asymptotic(kInfQ, 1), std::domain_error);
}

TEST(Volume, LrBallRadius) {
  EXPECT_NEAR(lr_ball_volume_radius(ExtendedReal::finite(2), 2), std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_NEAR(lr_ball_volume_radius(ExtendedReal::finite(1), 3), std::cbrt(8.0 / 6.0), 1e-14);
  EXPECT_EQ(lr_ball_volume_radius(kInfR, 10), 2.0);
  // 4/3 pi for the Euclidean unit ball in R^3.
  EXPECT_NEAR(std::pow(lr_ball_volume_radius(ExtendedReal::finite(2), 3), 3), 4.0 * std::numbers::pi / 3.0, 1e-13);
}

TEST(Volume, NormalizationScales) {
  BallParams p{QIndex::finite(4), 1.0, 81, Normalization::Tilde};
  EXPECT_NEAR(normalization_scale(p), 3.0, 1e-14);
  p.q = kInfQ;
  EXPECT_NEAR(normalization_scale(p), std::log(82.0), 1e-14);
  p.normalization = Normalization::VolNorm;
  EXPECT_NEAR(normalization_scale(p) * volume_radius(kInfQ, 81), 1.0, 1e-13);
  p.normalization = Normalization::Unit;
  EXPECT_EQ(normalization_scale(p), 1.0);
}

TEST(Volume, ParamsValidation) {
  EXPECT_THROW((BallParams{QIndex::finite(2), 3.0, 5, Normalization::Unit}.validate()), std::domain_error);
  EXPECT_THROW((BallParams{QIndex::finite(2), 1.0, 0, Normalization::Unit}.validate()), std::domain_error);
  EXPECT_NO_THROW((BallParams{kInfQ, 7.0, 5, Normalization::Unit}.validate()));
  EXPECT_EQ(parse_normalization("vol"), Normalization::VolNorm);
  EXPECT_THROW(parse_normalization("other"), std::invalid_argument);
}

// ---------------------------------------------------------------- limit law

TEST(LimitLaw, RejectsQEqualOne) { EXPECT_THROW(LimitLaw(QIndex::finite(1.0)), std::domain_error); }

TEST(LimitLaw, DensityIntegratesToOne) {
  using boost::math::quadrature::gauss_kronrod;
  for (QIndex q : {QIndex::finite(1.2), QIndex::finite(2), QIndex::finite(3.5), kInfQ}) {
    const LimitLaw law(q);
    const double s = law.support();
    const double mass = gauss_kronrod<double, 61>::integrate([&](double x) { return law.density(x); }, -s, s, 15, 1e-13);
    EXPECT_NEAR(mass, 1.0, 1e-9) << q.to_string();
  }
}

TEST(LimitLaw, CdfMonotoneWithLimits) {
  for (QIndex q : {QIndex::finite(1.5), QIndex::finite(2), kInfQ}) {
    const LimitLaw law(q);
    const double s = law.support();
    EXPECT_EQ(law.cdf(-s - 1.0), 0.0);
    EXPECT_EQ(law.cdf(s + 1.0), 1.0);
    EXPECT_DOUBLE_EQ(law.cdf(0.0), 0.5);
    double prev = 0.0;
    for (int i = -1000; i <= 1000; ++i) {
      const double f = law.cdf(1.1 * s * i / 1000.0);
      ASSERT_GE(f, prev);
      prev = f;
    }
  }
}

TEST(LimitLaw, CdfMatchesIntegratedDensity) {
  using boost::math::quadrature::gauss_kronrod;
  const LimitLaw law(QIndex::finite(3));
  for (double x : {-0.4, -0.1, 0.05, 0.3, 0.49}) {
    const double f =
        gauss_kronrod<double, 61>::integrate([&](double t) { return law.density(t); }, -law.support(), x, 15, 1e-13);
    EXPECT_NEAR(law.cdf(x), f, 1e-10);
  }
}

TEST(LimitLaw, QuantileInvertsCdf) {
  for (QIndex q : {QIndex::finite(1.5), QIndex::finite(2), QIndex::finite(6), kInfQ}) {
    const LimitLaw law(q);
    const double lo = law.quantile(1e-6), hi = law.quantile(1.0 - 1e-6);
    for (int i = 0; i <= 1000; ++i) {
      const double x = lo + (hi - lo) * i / 1000.0;
      ASSERT_NEAR(law.quantile(law.cdf(x)), x, 1e-10) << q.to_string() << " x=" << x;
    }
    for (int i = 1; i < 1000; ++i) {
      const double u = i / 1000.0;
      ASSERT_NEAR(law.cdf(law.quantile(u)), u, 1e-14);
    }
  }
  EXPECT_THROW(LimitLaw(QIndex::finite(2)).quantile(0.0), std::domain_error);
}

TEST(LimitLaw, ClosedFormAtQTwo) {
  const LimitLaw law(QIndex::finite(2));
  EXPECT_DOUBLE_EQ(law.density(0.25), 0.75);
  EXPECT_DOUBLE_EQ(law.cdf(0.5), 1.0 - 0.5 * 0.25);
  EXPECT_EQ(law.density(1.5), 0.0);
}

TEST(LimitLaw, ApproachesLaplaceAsQDecreasesToOne) {
  const LimitLaw law(QIndex::finite(1.0 + 1e-4));
  for (double x : {0.0, 0.5, 1.0, 3.0}) EXPECT_NEAR(law.density(x), 0.5 * std::exp(-x), 1e-3);
}

TEST(Profile, EndpointsAndShape) {
  EXPECT_DOUBLE_EQ(g_profile(QIndex::finite(2), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(g_profile(QIndex::finite(3), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(g_profile(kInfQ, 0.25), 0.75);
  EXPECT_NEAR(g_profile(QIndex::finite(2), 0.25), 0.5, 1e-15);
  EXPECT_THROW(g_profile(QIndex::finite(1), 0.5), std::domain_error);
  EXPECT_THROW(g_profile(QIndex::finite(2), 1.5), std::domain_error);
}

TEST(Profile, ErrorRateTable) {
  const std::size_t n = 10'000;
  EXPECT_NEAR(profile_error_rate(QIndex::finite(1.5), n), std::pow(1e4, -1.0 / 3.0), 1e-15);
  EXPECT_NEAR(profile_error_rate(QIndex::finite(2), n), std::log(1e4) / 100.0, 1e-15);
  EXPECT_NEAR(profile_error_rate(QIndex::finite(4), n), 0.1, 1e-15);
  EXPECT_NEAR(profile_error_rate(kInfQ, n), 1.0 / std::log(1e4), 1e-15);
}

// ---------------------------------------------------------------- constants

TEST(Constants, CltCentringAndVariance) {
  const auto c3 = clt_constants(QIndex::finite(3), 1000);
  EXPECT_EQ(c3.regime, CltRegime::Normal);
  EXPECT_NEAR(*c3.sigma_q2, 1.0 / 12.0, 1e-15);
  EXPECT_EQ(*clt_constants(QIndex::finite(2), 10).sigma_q2, 0.25);
  EXPECT_FALSE(clt_constants(QIndex::finite(1.5), 10).sigma_q2.has_value());
  // n = 1: mu = 1 / kappa(1) = 1.
  EXPECT_DOUBLE_EQ(clt_constants(QIndex::finite(2), 1).mu_qn, 1.0);
  // q = 1, n = 2: (2 / 1 + 2 / 2) / 2.
  EXPECT_DOUBLE_EQ(clt_constants(QIndex::finite(1), 2).mu_qn, 1.5);
  EXPECT_THROW(clt_constants(kInfQ, 10), std::domain_error);
}

TEST(Constants, LlnClosedForms) {
  EXPECT_DOUBLE_EQ(lln_constant(kInfQ, kInfR), 0.5);
  EXPECT_DOUBLE_EQ(lln_constant(kInfQ, ExtendedReal::finite(1)), 0.25);
  EXPECT_NEAR(lln_constant(QIndex::finite(2), ExtendedReal::finite(2)), std::exp(-0.5) * std::sqrt(4.0 / 24.0), 1e-15);
  EXPECT_NEAR(lln_constant(QIndex::finite(2), kInfR), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(lln_constant(QIndex::finite(3), ExtendedReal::finite(1.5)), 0.23789055643766048, 1e-14);
  EXPECT_NEAR(lln_constant(kInfQ, ExtendedReal::finite(2)), 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_THROW(lln_constant(QIndex::finite(1), kInfR), std::domain_error);
}

TEST(Constants, ThresholdIdentityAcrossGrid) {
  for (double q : {1.05, 1.5, 2.0, 3.0, 10.0})
    for (double r : {0.5, 1.0, 1.5, 2.0, 3.0, 8.0}) {
      const QIndex qi = QIndex::finite(q);
      const ExtendedReal ri = ExtendedReal::finite(r);
      const double a = intersection_threshold(qi, ri);
      EXPECT_NEAR(a, intersection_threshold_from_ratio(qi, ri), 1e-12 * a) << q << "," << r;
    }
  for (QIndex q : {QIndex::finite(2), kInfQ})
    for (ExtendedReal r : {ExtendedReal::finite(2), kInfR})
      EXPECT_NEAR(intersection_threshold(q, r), intersection_threshold_from_ratio(q, r), 1e-12);
}

TEST(Constants, ThresholdFrozenValues) {
  EXPECT_NEAR(intersection_threshold(QIndex::finite(2), ExtendedReal::finite(2)), 0.97720502380583984, 1e-14);
  EXPECT_NEAR(intersection_threshold(QIndex::finite(2), kInfR), 0.82436063535006407, 1e-14);
  EXPECT_NEAR(intersection_threshold(kInfQ, ExtendedReal::finite(2)), 0.83821117762281715, 1e-14);
  EXPECT_NEAR(intersection_threshold(kInfQ, ExtendedReal::finite(1)), 0.73575888234288464, 1e-14);
  EXPECT_DOUBLE_EQ(intersection_threshold(kInfQ, kInfR), 1.0);
}

TEST(Constants, ThresholdLimitAtQOne) {
  EXPECT_NEAR(intersection_threshold_q1_limit(2.0), 0.93019136710263286, 1e-14);
  for (double r : {0.7, 1.0, 2.0, 5.0}) {
    const double at = intersection_threshold(QIndex::finite(1.0 + 1e-8), ExtendedReal::finite(r));
    EXPECT_NEAR(at, intersection_threshold_q1_limit(r), 1e-6) << "r=" << r;
  }
}

// ---------------------------------------------------------------- special

TEST(Special, LogGammaRatio) {
  for (double x : {0.5, 3.0, 19.0, 25.0, 1e3})
    for (double a : {0.25, 2.0, 7.5})
      EXPECT_NEAR(log_gamma_ratio(x, a), std::lgamma(x + a) - std::lgamma(x), 1e-11 * std::max(1.0, std::abs(std::lgamma(x + a))));
  // Large-argument regime: Gamma(x + 1) / Gamma(x) = x exactly.
  EXPECT_NEAR(log_gamma_ratio(1e8, 1.0), std::log(1e8), 1e-12);
  EXPECT_NEAR(log_gamma_ratio(1e8, 2.0), std::log(1e8) + std::log(1e8 + 1.0), 1e-12);
}

TEST(Special, KolmogorovSurvivalFrozen) {
  const std::pair<double, double> table[] = {{0.3, 0.9999906941986655}, {0.5, 0.9639452436648751},
                                             {0.8, 0.5441424115741981}, {1.0, 0.26999967167735456},
                                             {1.18, 0.1234538094297657}, {1.36, 0.049485876755377876},
                                             {2.0, 0.0006709252557796953}};
  for (auto [lam, p] : table) EXPECT_NEAR(kolmogorov_survival(lam), p, 1e-12) << lam;
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Special, ChiSquareSurvivalFrozen) {
  EXPECT_NEAR(chi_square_survival(18.77, 24), 0.7641416831906638, 1e-12);
  EXPECT_NEAR(chi_square_survival(36.4, 24), 0.05017010230101581, 1e-12);
}

TEST(Special, NormalCdf) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0, 0.0, 1.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.959963984540054, 0.0, 1.0), 0.975, 1e-15);
  EXPECT_NEAR(normal_cdf(0.5, 0.0, 0.25), normal_cdf(1.0, 0.0, 1.0), 1e-15);
}

// ---------------------------------------------------------------- closed-form examples

TEST(Examples, KappaValues) {
  EXPECT_EQ(KappaTable(QIndex::finite(7), 1)(1), 1.0);
  EXPECT_NEAR(KappaTable(kInfQ, 3)(3), 11.0 / 6.0, 1e-15);
}

TEST(Examples, NormValues) {
  for (QIndex q : {QIndex::finite(1.0), QIndex::finite(2), kInfQ}) {
    std::vector<double> e(6, 0.0);
    e[4] = 1.0;
    EXPECT_EQ(lorentz_norm(e, q), 1.0);
  }
  EXPECT_NEAR(lorentz_norm(std::vector<double>{1.0, 1.0}, QIndex::finite(2)), 1.7071067811865475, 1e-15);
  EXPECT_EQ(lr_norm(std::vector<double>{3.0, 4.0}, ExtendedReal::finite(2)), 5.0);
  EXPECT_EQ(lr_norm(std::vector<double>{1.0, -2.0, 0.0}, kInfR), 2.0);
  EXPECT_NEAR(lr_norm(std::vector<double>{1.0, 1.0, 1.0}, ExtendedReal::finite(3)), std::cbrt(3.0), 1e-15);
}

TEST(Examples, VolumeValues) {
  for (QIndex q : {QIndex::finite(1.0), QIndex::finite(3), kInfQ}) EXPECT_DOUBLE_EQ(*ball_volume(q, 1).volume, 2.0);
  EXPECT_NEAR(*ball_volume(QIndex::finite(2), 2).volume, 4.0 / (1.0 + std::sqrt(0.5)), 1e-14);
  EXPECT_NEAR(*ball_volume(kInfQ, 3).volume, 8.0 / 2.75, 1e-14);
}

TEST(Examples, AsymptoticRadius) {
  EXPECT_NEAR(volume_radius_asymptotic(QIndex::finite(1.0), 1'000'000), 2.0 * std::numbers::e * 1e-6, 1e-18);
  EXPECT_NEAR(volume_radius_asymptotic(kInfQ, 1'000'000), 2.0 / std::log(1e6), 1e-15);
  EXPECT_NEAR(volume_radius(QIndex::finite(2), 100'000) / volume_radius_asymptotic(QIndex::finite(2), 100'000), 1.0,
              0.05);
}

TEST(Examples, LimitDensityValues) {
  EXPECT_DOUBLE_EQ(LimitLaw(QIndex::finite(2)).density(0.0), 1.0);
  EXPECT_DOUBLE_EQ(LimitLaw(kInfQ).density(0.5), 0.5);
  EXPECT_EQ(LimitLaw(QIndex::finite(3)).density(0.6), 0.0);
  EXPECT_DOUBLE_EQ(LimitLaw(QIndex::finite(3)).support(), 0.5);
  EXPECT_EQ(g_profile(QIndex::finite(2), 1.0), 0.0);
}

TEST(Examples, CentringAtOneDimension) {
  for (QIndex q : {QIndex::finite(1.0), QIndex::finite(1.5), QIndex::finite(4)})
    EXPECT_DOUBLE_EQ(clt_constants(q, 1).mu_qn, 1.0);
  EXPECT_EQ(clt_constants(QIndex::finite(2), 5).regime, CltRegime::LogNormal);
}

TEST(Examples, ThresholdValues) {
  EXPECT_NEAR(intersection_threshold(QIndex::finite(2), kInfR), 0.5 * std::exp(0.5), 1e-15);
  const double a = std::sqrt(3.0 / (2.0 * std::numbers::e)) / std::tgamma(1.5);
  EXPECT_NEAR(intersection_threshold(kInfQ, ExtendedReal::finite(2)), a, 1e-14);
  EXPECT_NEAR(lr_radius_limit(ExtendedReal::finite(2)), 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::e) * std::tgamma(1.5)),
              1e-15);
}
