// Draws a few points from the tilde-normalized Lorentz ball, checks them
// against the limit law and prints the critical slope of the profile ODE.

#include <cstdio>

#include "lorentz.hpp"

int main() {
  using namespace lorentz;

  const QIndex q = QIndex::finite(3.0);
  const std::size_t n = 20'000;

  const BallVolume v = ball_volume(q, n);
  std::printf("log vol(B_{3,1}^%zu) = %.6f\n", n, v.log_volume);

  const BallParams params{q, 1.0, n, Normalization::Tilde};
  const SampleBatch batch = sample_exact(params, 1, {42, 0});
  const KsResult ks = ks_one_sample(batch.row(0), ComparisonLaw::nu_q1(q));
  std::printf("KS distance of one sample to nu_{3,1}: %.4f (p = %.3f)\n", ks.statistic, ks.p_value);

  const auto crit = find_critical_slope(1.0, 3.0);
  std::printf("critical slope c_{1,3} = %.8f, support radius = %.6f\n", crit.c_pq,
              crit.solution.support_radius);
  return 0;
}
