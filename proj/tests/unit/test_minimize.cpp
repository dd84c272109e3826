#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "growthlab/minimize.hpp"
#include "oracles.hpp"

using namespace growthlab;

namespace {

FunctionOracle scalar(const char* name, double (*fn)(double)) {
  return FunctionOracle(name, 1, [fn](const Point& x) { return ExtendedReal(fn(x[0])); });
}

SolverConfig coarse(int grid = 401) {
  SolverConfig cfg;
  cfg.grid_points_per_axis = grid;
  return cfg;
}

FunctionOracle maxsq2d() {
  return FunctionOracle("maxsq2d", 2, [](const Point& x) {
    const double a = std::max(x[0], 0.0);
    return ExtendedReal(a * a + x[1] * x[1]);
  });
}

}  // namespace

TEST(ArgminBall, StrictMinimumAtCenter) {
  const auto r = argmin_ball(scalar("x^2", [](double x) { return x * x; }), BallRegion(Point{0.0}, 1.0), coarse());
  EXPECT_NEAR(r.representative()[0], 0.0, 1e-6);
  EXPECT_NEAR(r.min_value, 0.0, 1e-12);
  EXPECT_GT(r.evaluations, 401u);
}

TEST(ArgminBall, LinearAttainsBoundary) {
  const auto r = argmin_ball(scalar("-x", [](double x) { return -x; }), BallRegion(Point{0.0}, 1.0), coarse());
  EXPECT_NEAR(r.representative()[0], 1.0, 1e-12);
  EXPECT_NEAR(r.min_value, -1.0, 1e-12);
}

TEST(ArgminBall, FlatValleyIsCoveredAtGridResolution) {
  SolverConfig cfg = coarse(41);
  const BallRegion ball(Point{0.0, 0.0}, 1.0);
  const auto r = argmin_ball(maxsq2d(), ball, cfg);
  EXPECT_NEAR(r.min_value, 0.0, 1e-12);
  const double spacing = BallGrid(ball, cfg.grid_points_per_axis).spacing();
  // Every lattice point of the segment {x1 <= 0, x2 = 0} is an exact minimizer.
  for (double x1 = -1.0; x1 <= 1e-12; x1 += spacing) {
    bool covered = false;
    for (const Candidate& c : r.minimizers) covered = covered || distance(c.point, Point{x1, 0.0}) < 1e-9;
    EXPECT_TRUE(covered) << "missing x1 = " << x1;
  }
  for (const Candidate& c : r.minimizers) {
    EXPECT_LE(c.point[0], 1e-9);
    EXPECT_NEAR(c.point[1], 0.0, 1e-5);
  }
}

TEST(ArgminTilted, QuadraticTilt) {
  const auto f = scalar("x^2", [](double x) { return x * x; });
  const auto r = argmin_tilted(f, TiltForm{1.0}, BallRegion(Point{0.0}, 1.0), coarse());
  EXPECT_NEAR(r.representative()[0], 0.5, 1e-6);
  EXPECT_NEAR(r.min_value, -0.25, 1e-12);
}

TEST(ArgminTilted, CubicTilt) {
  const auto f = scalar("|x|^3", [](double x) { return std::pow(std::abs(x), 3.0); });
  const auto r = argmin_tilted(f, TiltForm{3.0}, BallRegion(Point{0.0}, 2.0), coarse());
  EXPECT_NEAR(r.representative()[0], 1.0, 1e-5);
}

TEST(ArgminTilted, ZeroTiltMatchesBallSolve) {
  const auto f = scalar("sin", [](double x) { return std::sin(3.0 * x) + 0.2 * x * x; });
  const BallRegion ball(Point{0.0}, 2.0);
  EXPECT_EQ(argmin_tilted(f, TiltForm{0.0}, ball, coarse()), argmin_ball(f, ball, coarse()));
}

TEST(ArgminTilted, ShiftIdentity) {
  const auto f = scalar("sin", [](double x) { return std::sin(3.0 * x) + 0.2 * x * x; });
  const BallRegion ball(Point{0.0}, 2.0);
  const TiltForm xi{0.7};
  EXPECT_EQ(argmin_tilted(f, xi, ball, coarse()), argmin_ball(tilted(f, xi), ball, coarse()));
}

TEST(ArgminPerturbed, Examples) {
  const auto f = scalar("x^2", [](double x) { return x * x; });
  const BallRegion ball(Point{0.0}, 1.0);
  EXPECT_EQ(argmin_perturbed(f, constant_function(1, 0.0), ball, coarse()), argmin_ball(f, ball, coarse()));

  const auto prox = scalar("prox", [](double y) { return 0.25 * (y - 1.0) * (y - 1.0); });
  EXPECT_NEAR(argmin_perturbed(f, prox, ball, coarse()).representative()[0], 0.2, 1e-6);

  const FunctionOracle box = restricted(constant_function(1, 0.0),
                                        [](const Point& y) { return y[0] >= 0.5 && y[0] <= 1.0; }, "[0.5,1]");
  EXPECT_NEAR(argmin_perturbed(f, box, ball, coarse()).representative()[0], 0.5, 1e-12);
}

TEST(ArgminBall, Errors) {
  const FunctionOracle inf("inf", 1, [](const Point&) { return ExtendedReal::infinity(); });
  try {
    argmin_ball(inf, BallRegion(Point{0.0}, 1.0), coarse());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AllInfinite);
  }
  const FunctionOracle nan("nan", 1, [](const Point& x) { return ExtendedReal(x[0] > 0.3 ? std::nan("") : 0.0); });
  try {
    argmin_ball(nan, BallRegion(Point{0.0}, 1.0), coarse());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
  }
  const FunctionOracle five("5d", 5, [](const Point&) { return ExtendedReal(0.0); });
  EXPECT_THROW(argmin_ball(five, BallRegion(Point::zero(5), 1.0), coarse(5)), Error);
  SolverConfig bad = coarse(2);
  EXPECT_THROW(bad.validate(), Error);
}

TEST(ArgminBall, MinimizersInsideBallAndWithinTolerance) {
  const FunctionOracle f("wavy", 2, [](const Point& x) {
    return ExtendedReal(std::cos(4.0 * x[0]) * std::cos(3.0 * x[1]) + 0.1 * x.coords().squaredNorm());
  });
  const BallRegion ball(Point{0.3, -0.2}, 1.5);
  const SolverConfig cfg = coarse(101);
  const auto r = argmin_ball(f, ball, cfg);
  for (const Candidate& c : r.minimizers) {
    EXPECT_LE(distance(c.point, ball.center()), ball.radius() + BallRegion::kMembershipSlack);
    EXPECT_LE(c.value, r.min_value + cfg.minimizer_value_tolerance * (1.0 + std::abs(r.min_value)));
    EXPECT_EQ(f(c.point).value(), c.value);
  }
  // No lattice point beats a reported minimizer by more than the tolerance.
  const BallGrid grid(ball, cfg.grid_points_per_axis);
  Eigen::VectorXd y;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!grid.point(k, y)) continue;
    const double v = f(Point(y)).value();
    EXPECT_LE(r.min_value, v + cfg.minimizer_value_tolerance * (1.0 + std::abs(r.min_value)));
  }
}

TEST(ArgminBall, RefinementDoesNotWorsen) {
  const auto f = scalar("nonconvex", [](double x) { return std::sin(5.0 * x) + 0.1 * x * x; });
  const BallRegion ball(Point{0.0}, 2.0);
  double previous = std::numeric_limits<double>::infinity();
  for (int m : {51, 101, 201, 401, 801}) {
    const auto r = argmin_ball(f, ball, coarse(m));
    EXPECT_LE(r.min_value, previous + 1e-10 * (1.0 + std::abs(previous)));
    previous = r.min_value;
  }
}

TEST(ArgminBall, AgreesWithBruteForce) {
  auto fn = [](double x) { return std::sin(5.0 * x) + 0.1 * x * x - 0.3 * x; };
  const auto f = FunctionOracle("nonconvex", 1, [fn](const Point& x) { return ExtendedReal(fn(x[0])); });
  const double expected = oracle::brute_argmin_1d(fn, -2.0, 2.0);
  const auto r = argmin_ball(f, BallRegion(Point{0.0}, 2.0), SolverConfig{});
  EXPECT_NEAR(r.representative()[0], expected, 1e-6);
  EXPECT_NEAR(r.min_value, fn(expected), 1e-10);
}

TEST(ArgminBall, ThreadCountDoesNotChangeResult) {
  const FunctionOracle f("wavy", 2, [](const Point& x) {
    return ExtendedReal(std::cos(4.0 * x[0]) * std::cos(4.0 * x[1]));
  });
  const BallRegion ball(Point{0.0, 0.0}, 1.0);
  setenv("GROWTHLAB_THREADS", "1", 1);
  const auto serial = argmin_ball(f, ball, coarse(121));
  setenv("GROWTHLAB_THREADS", "4", 1);
  const auto parallel = argmin_ball(f, ball, coarse(121));
  unsetenv("GROWTHLAB_THREADS");
  EXPECT_EQ(serial, parallel);
  EXPECT_GT(serial.minimizers.size(), 1u);  // the symmetric wells are all reported
}

TEST(BallGrid, SymmetricLatticeSkipsCorners) {
  const BallGrid grid(BallRegion(Point{0.0, 0.0}, 1.0), 3);
  EXPECT_EQ(grid.size(), 9u);
  EXPECT_DOUBLE_EQ(grid.spacing(), 1.0);
  int inside = 0;
  Eigen::VectorXd y;
  for (std::size_t k = 0; k < grid.size(); ++k) inside += grid.point(k, y) ? 1 : 0;
  EXPECT_EQ(inside, 5);
}
