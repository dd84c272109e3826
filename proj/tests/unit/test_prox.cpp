#include <gtest/gtest.h>

#include <cmath>

#include "growthlab/prox.hpp"
#include "oracles.hpp"

using namespace growthlab;

namespace {

FunctionOracle power(double p) {
  return FunctionOracle("|x|^p", 1, [p](const Point& x) { return ExtendedReal(std::pow(std::abs(x[0]), p)); });
}

ProxConfig config(double epsilon, double p, int iterations = 10) {
  ProxConfig cfg;
  cfg.epsilon = epsilon;
  cfg.exponents = ExponentPair(p);
  cfg.iterations = iterations;
  return cfg;
}

}  // namespace

TEST(ProxStep, Examples) {
  EXPECT_NEAR(prox_step(power(2.0), Point{1.0}, config(0.5, 2.0)).representative()[0], 0.2, 1e-8);
  EXPECT_NEAR(prox_step(power(2.0), Point{0.7}, config(1e6, 2.0)).representative()[0], 0.7, 1e-5);
  const FunctionOracle abs("|x|", 1, [](const Point& x) { return ExtendedReal(std::abs(x[0])); });
  EXPECT_NEAR(prox_step(abs, Point{0.3}, config(0.5, 2.0)).representative()[0], 0.0, 1e-9);
  EXPECT_THROW(prox_step(power(2.0), Point{3.0}, config(0.5, 2.0)), Error);
}

TEST(ProxStep, MatchesClosedFormForPowers) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double eps : {0.1, 0.5, 2.0}) {
      const double anchor = 0.9;
      const double got = prox_step(power(p), Point{anchor}, config(eps, p)).representative()[0];
      EXPECT_NEAR(got, oracle::power_prox(p, eps, anchor), 1e-7) << "p=" << p << " eps=" << eps;
    }
  }
}

TEST(RunProx, QuadraticContraction) {
  const ProxTrajectory traj = run_prox(power(2.0), Point{1.0}, config(0.5, 2.0, 3));
  ASSERT_EQ(traj.points.size(), 4u);
  ASSERT_EQ(traj.steps.size(), 3u);
  const double expected[] = {1.0, 0.2, 0.04, 0.008};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(traj.points[k][0], expected[k], 1e-8);
}

TEST(RunProx, FixedPointAtMinimizer) {
  const ProxTrajectory traj = run_prox(power(2.0), Point{0.0}, config(0.5, 2.0, 4));
  for (const Point& x : traj.points) EXPECT_EQ(x[0], 0.0);
}

TEST(RunProx, DescentOfProximalObjective) {
  const double eps = 0.05;
  const ProxConfig cfg = config(eps, 3.0, 8);
  const FunctionOracle f = power(3.0);
  const ProxTrajectory traj = run_prox(f, Point{1.5}, cfg);
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    const double step = distance(traj.points[k + 1], traj.points[k]);
    EXPECT_LE(traj.values[k + 1] + eps / 3.0 * std::pow(step, 3.0), traj.values[k] + 1e-12);
    EXPECT_LE(traj.values[k + 1], traj.values[k]);
  }
}

TEST(RunProx, Validation) {
  EXPECT_THROW(config(0.5, 2.0, 0).validate(), Error);
  EXPECT_THROW(config(-1.0, 2.0).validate(), Error);
  EXPECT_THROW(run_prox(power(2.0), Point{5.0}, config(0.5, 2.0)), Error);
}

TEST(AuditRates, QuadraticPassesWithGrowingMargin) {
  const ProxTrajectory traj = run_prox(power(2.0), Point{1.0}, config(0.5, 2.0, 10));
  const RateAudit audit = audit_rates(traj, 1.0, Point{0.0}, 0.0, ExponentPair(2.0), 0.5);
  EXPECT_TRUE(audit.passed);
  ASSERT_EQ(audit.rows.size(), 11u);
  EXPECT_EQ(audit.rows[0].bound_x, audit.rows[0].distance);
  EXPECT_EQ(audit.rows[0].bound_f, audit.rows[0].gap);
  for (int k = 0; k <= 10; ++k) {
    EXPECT_DOUBLE_EQ(audit.rows[k].bound_x, std::pow(0.5, k));
    EXPECT_DOUBLE_EQ(audit.rows[k].bound_f, std::pow(0.25, k));
  }
  for (int k = 2; k <= 10; ++k) EXPECT_LT(audit.rows[k].margin_x / audit.rows[k].bound_x, 1.0);
  EXPECT_GT(audit.rows[3].margin_x / audit.rows[3].bound_x, audit.rows[1].margin_x / audit.rows[1].bound_x);
}

TEST(AuditRates, DetectsViolation) {
  // Pretend the iterates stalled: the envelopes must flag it.
  ProxTrajectory traj;
  traj.points = {Point{1.0}, Point{0.9}, Point{0.8}};
  traj.values = {1.0, 0.81, 0.64};
  const RateAudit audit = audit_rates(traj, 1.0, Point{0.0}, 0.0, ExponentPair(2.0), 0.5);
  EXPECT_FALSE(audit.passed);
  EXPECT_FALSE(audit.rows[1].pass_x);
}

TEST(AuditRates, RefusesEpsilonAboveGamma) {
  const ProxTrajectory traj = run_prox(power(2.0), Point{1.0}, config(1.5, 2.0, 2));
  try {
    audit_rates(traj, 1.0, Point{0.0}, 0.0, ExponentPair(2.0), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EpsilonNotBelowGamma);
  }
}

TEST(AuditRates, HoldsAcrossPowers) {
  for (double p : {1.5, 2.0, 3.0}) {
    for (double eps : {0.2, 0.9}) {
      const ProxConfig cfg = config(eps, p, 6);
      const ProxTrajectory traj = run_prox(power(p), Point{1.0}, cfg);
      EXPECT_TRUE(audit_rates(traj, 1.0, Point{0.0}, 0.0, ExponentPair(p), eps).passed) << "p=" << p << " eps=" << eps;
    }
  }
}
