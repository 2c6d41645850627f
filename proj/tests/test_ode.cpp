#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "lorentz/limit_law.hpp"
#include "lorentz/ode.hpp"
#include "lorentz/sampler.hpp"

using namespace lorentz;

TEST(Ode, LinearCaseMatchesGaussianProfile) {
  for (double s : {0.3, 0.7978845608028654}) {
    const auto sol = integrate_g(2.0, 2.0, s);
    for (const auto& pt : sol.grid) ASSERT_NEAR(pt.dg, s * std::exp(-0.5 * pt.x * pt.x), 1e-8) << "x=" << pt.x;
  }
}

TEST(Ode, EqualIndicesDecouple) {
  for (double p : {1.5, 3.0}) {
    const auto sol = integrate_g(p, p, 0.5);
    for (const auto& pt : sol.grid) {
      if (pt.x > 10.0) break;
      ASSERT_NEAR(pt.dg, 0.5 * std::exp(-std::pow(pt.x, p) / p), 1e-8) << "p=" << p << " x=" << pt.x;
    }
  }
}

TEST(Ode, CriticalParabolaAtQTwo) {
  const auto sol = integrate_g(1.0, 2.0, 2.0);
  EXPECT_EQ(sol.termination, Termination::ReachedOne);
  EXPECT_EQ(sol.classification, Classification::Critical);
  EXPECT_NEAR(sol.support_radius, 1.0, 1e-6);
  for (const auto& pt : sol.grid) {
    ASSERT_NEAR(pt.g, 1.0 - (1.0 - pt.x) * (1.0 - pt.x), 1e-8);
    ASSERT_NEAR(pt.dg, 2.0 * (1.0 - pt.x), 1e-6);
  }
}

TEST(Ode, SubcriticalPlateau) {
  const auto sol = integrate_g(1.0, 2.0, 1.0);
  EXPECT_EQ(sol.classification, Classification::Subcritical);
  EXPECT_EQ(sol.termination, Termination::Plateau);
  // Closed form: G(inf) = 1 - (1 - s/2)^2 = 3/4 for s = 1.
  EXPECT_NEAR(sol.back().g, 0.75, 1e-8);
  EXPECT_LT(sol.back().g, 1.0);
}

TEST(Ode, SupercriticalOvershoot) {
  const auto sol = integrate_g(1.0, 2.0, 3.0);
  EXPECT_EQ(sol.classification, Classification::Supercritical);
  EXPECT_TRUE(overshoots(sol));
  EXPECT_GT(sol.terminal_slope, 0.0);
}

TEST(Ode, TrajectoriesAreIncreasingAndConcave) {
  for (auto [p, q, s] : {std::tuple{1.0, 2.0, 1.5}, std::tuple{1.5, 3.0, 1.0}, std::tuple{2.0, 4.0, 2.5}}) {
    const auto sol = integrate_g(p, q, s);
    for (std::size_t i = 1; i < sol.grid.size(); ++i) {
      ASSERT_GE(sol.grid[i].g, sol.grid[i - 1].g);
      ASSERT_LE(sol.grid[i].dg, sol.grid[i - 1].dg);
      ASSERT_LE(sol.grid[i].g, 1.0);
    }
  }
}

TEST(Ode, ClassificationMonotoneInSlope) {
  for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{1.5, 3.0}}) {
    const double c = find_critical_slope(p, q).c_pq;
    int previous = -1;
    for (int i = 0; i < 20; ++i) {
      const double s = c / 2.0 + (2.0 * c - c / 2.0) * i / 19.0;
      const int cls = static_cast<int>(integrate_g(p, q, s).classification);
      ASSERT_GE(cls, previous) << "s=" << s;
      previous = cls;
    }
    EXPECT_EQ(integrate_g(p, q, 0.5 * c).classification, Classification::Subcritical);
    EXPECT_EQ(integrate_g(p, q, 2.0 * c).classification, Classification::Supercritical);
  }
}

TEST(Ode, CriticalSlopes) {
  const auto c12 = find_critical_slope(1.0, 2.0);
  EXPECT_NEAR(c12.c_pq, 2.0, 1e-4);
  EXPECT_EQ(c12.solution.classification, Classification::Critical);
  EXPECT_NEAR(find_critical_slope(2.0, 2.0).c_pq, std::sqrt(2.0 / std::numbers::pi), 1e-4);
  const auto c13 = find_critical_slope(1.0, 3.0);
  EXPECT_NEAR(c13.c_pq, 3.0, 1e-4);
  EXPECT_NEAR(c13.solution.support_radius, 0.5, 1e-3);
  // A bracket that starts above the root is widened.
  EXPECT_NEAR(find_critical_slope(1.0, 2.0, 2.5, 3.0).c_pq, 2.0, 1e-4);
}

TEST(Ode, DensityMatchesClosedForms) {
  const auto d12 = conjecture_density(1.0, 2.0);
  const LimitLaw law(QIndex::finite(2));
  double sup = 0.0;
  for (int i = -1200; i <= 1200; ++i) {
    const double x = i / 1000.0;
    sup = std::max(sup, std::abs(d12(x) - law.density(x)));
  }
  EXPECT_LT(sup, 1e-3);

  const auto d22 = conjecture_density(2.0, 2.0);
  sup = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double x = i / 100.0;
    sup = std::max(sup, std::abs(d22(x) - std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi)));
  }
  EXPECT_LT(sup, 1e-3);
}

TEST(Ode, DensityHasUnitMass) {
  for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{2.0, 2.0}, std::pair{1.5, 3.0}, std::pair{2.0, 5.0}}) {
    const auto d = conjecture_density(p, q);
    EXPECT_NEAR(d.total_mass(), 1.0, 1e-6) << p << "," << q;
    EXPECT_EQ(d(d.support() + 1.0), 0.0);
    EXPECT_EQ(d(0.3), d(-0.3));
  }
}

TEST(Ode, EnergyResidual) {
  EXPECT_LT(std::abs(energy_constraint_residual(find_critical_slope(1.0, 2.0).solution)), 1e-3);
  EXPECT_LT(std::abs(energy_constraint_residual(find_critical_slope(2.0, 2.0).solution)), 1e-3);
  EXPECT_LT(energy_constraint_residual(integrate_g(1.0, 2.0, 1.0)), 0.0);
  EXPECT_LT(energy_constraint_residual(integrate_g(2.0, 3.0, 0.5)), 0.0);
}

TEST(Ode, DomainErrors) {
  EXPECT_THROW(integrate_g(0.5, 2.0, 1.0), std::domain_error);
  EXPECT_THROW(integrate_g(3.0, 2.0, 1.0), std::domain_error);
  EXPECT_THROW(integrate_g(1.0, 2.0, 0.0), std::domain_error);
  EXPECT_THROW(integrate_g(1.0, INFINITY, 1.0), std::domain_error);
  EXPECT_THROW(find_critical_slope(1.0, 2.0, 2.0, 1.0), std::domain_error);
}

TEST(Ode, StepBudgetIsReported) {
  StepControl ctl;
  ctl.max_steps = 3;
  EXPECT_THROW(integrate_g(1.0, 2.0, 1.0, ctl), OdeNonFiniteError);
}

TEST(Family, EmptySlopeListGivesEmptyOutput) {
  const std::vector<double> none;
  EXPECT_TRUE(figure1_family(1.0, 2.0, none).empty());
}

TEST(Family, ClassifiesAndExports) {
  const std::vector<double> slopes{1.0, 2.0, 3.0, -1.0};
  const auto fam = figure1_family(1.0, 2.0, slopes);
  ASSERT_EQ(fam.size(), 4u);
  EXPECT_EQ(fam[0].solution->classification, Classification::Subcritical);
  EXPECT_EQ(fam[1].solution->classification, Classification::Critical);
  EXPECT_EQ(fam[2].solution->classification, Classification::Supercritical);
  EXPECT_FALSE(fam[3].solution.has_value());
  EXPECT_FALSE(fam[3].error.empty());
  std::ostringstream os;
  write_family_csv(os, 1.0, 2.0, fam);
  const std::string csv = os.str();
  EXPECT_NE(csv.find("slope,classification,x,G,dG"), std::string::npos);
  EXPECT_NE(csv.find("2,critical,"), std::string::npos);
}

// ---------------------------------------------------------------- quantile form

namespace {

SampleBatch tilde_batch(QIndex q, std::size_t n, std::size_t count) {
  return sample_exact(BallParams{q, 1.0, n, Normalization::Tilde}, count, {41, 0});
}

}  // namespace

TEST(QuantileConstraint, TildeRowsSatisfyConstraint) {
  for (QIndex q : {QIndex::finite(1.5), QIndex::finite(2), QIndex::finite(4)}) {
    const auto b = tilde_batch(q, 300, 200);
    const auto r = quantile_constraint_check(b, 1.0, q);
    EXPECT_LE(r.max_value, 1.0 + 1e-10);
    EXPECT_GT(r.max_value, 0.5);
    EXPECT_LT(r.max_discrepancy, 1e-12);
  }
}

TEST(QuantileConstraint, ConstantVectorSaturates) {
  const QIndex q = QIndex::finite(3);
  const std::size_t n = 64;
  const double nd = static_cast<double>(n);
  double w = 0.0;
  for (std::size_t i = 1; i <= n; ++i) w += std::pow(i / nd, 1.0 / 3.0 - 1.0) / nd;
  SampleBatch b;
  b.params = BallParams{q, 1.0, n, Normalization::Tilde};
  b.count = 1;
  b.data.assign(n, 1.0 / w);
  const auto r = quantile_constraint_check(b, 1.0, q);
  EXPECT_NEAR(r.max_value, 1.0, 1e-12);
}

TEST(QuantileConstraint, DomainErrors) {
  const auto b = tilde_batch(QIndex::finite(2), 10, 2);
  EXPECT_THROW(quantile_constraint_check(b, 1.0, QIndex::infinity()), std::domain_error);
  EXPECT_THROW(quantile_constraint_check(b, 0.5, QIndex::finite(2)), std::domain_error);
  auto unit = sample_exact(BallParams{QIndex::finite(2), 1.0, 10, Normalization::Unit}, 2, {});
  EXPECT_THROW(quantile_constraint_check(unit, 1.0, QIndex::finite(2)), std::domain_error);
}
