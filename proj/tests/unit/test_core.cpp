#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "growthlab/core.hpp"

using namespace growthlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FunctionOracle square() {
  return FunctionOracle("x^2", 1, [](const Point& x) { return ExtendedReal(x[0] * x[0]); });
}

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::Usage;
}

}  // namespace

TEST(ExtendedReal, RejectsNanAndNegativeInfinity) {
  EXPECT_EQ(kind_of([] { ExtendedReal x(std::nan("")); }), ErrorKind::NonFiniteValue);
  EXPECT_EQ(kind_of([] { ExtendedReal x(-kInf); }), ErrorKind::NonFiniteValue);
  EXPECT_TRUE(ExtendedReal(kInf).is_infinite());
}

TEST(ExtendedReal, InfinityAbsorbsAndOrders) {
  const ExtendedReal inf = ExtendedReal::infinity();
  EXPECT_TRUE((inf + ExtendedReal(-5.0)).is_infinite());
  EXPECT_EQ((ExtendedReal(1.5) + ExtendedReal(2.0)).value(), 3.5);
  EXPECT_LT(ExtendedReal(1e300), inf);
  EXPECT_LT(ExtendedReal(-1.0), ExtendedReal(0.0));
}

TEST(Point, RejectsNonFiniteAndEmpty) {
  EXPECT_EQ(kind_of([] { Point p{1.0, std::nan("")}; }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Point p{kInf}; }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { Point p(Eigen::VectorXd(0)); }), ErrorKind::Usage);
}

TEST(Point, LexicographicOrder) {
  EXPECT_TRUE(lexicographically_less(Point{0.0, 5.0}, Point{1.0, -5.0}));
  EXPECT_TRUE(lexicographically_less(Point{1.0, -5.0}, Point{1.0, 0.0}));
  EXPECT_FALSE(lexicographically_less(Point{1.0, 0.0}, Point{1.0, 0.0}));
}

TEST(ExponentPair, ConjugateExponents) {
  EXPECT_DOUBLE_EQ(ExponentPair(2.0).q(), 2.0);
  EXPECT_DOUBLE_EQ(ExponentPair(3.0).q(), 1.5);
  EXPECT_DOUBLE_EQ(ExponentPair(1.5).q(), 3.0);
  EXPECT_DOUBLE_EQ(ExponentPair(3.0).holder(), 0.5);
  EXPECT_NO_THROW(ExponentPair(4.0, 4.0 / 3.0));
  EXPECT_EQ(kind_of([] { ExponentPair(2.0, 3.0); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { ExponentPair(1.0); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { ExponentPair(0.5); }), ErrorKind::Usage);
}

TEST(BallRegion, MembershipAndProjection) {
  const BallRegion ball(Point{1.0, 0.0}, 2.0);
  EXPECT_TRUE(ball.contains(Point{3.0, 0.0}));
  EXPECT_TRUE(ball.contains(Point{3.0 + 1e-13, 0.0}));
  EXPECT_FALSE(ball.contains(Point{3.0 + 1e-9, 0.0}));
  const Point projected = ball.project(Eigen::Vector2d(1.0, 5.0));
  EXPECT_NEAR(projected[0], 1.0, 1e-15);
  EXPECT_NEAR(projected[1], 2.0, 1e-15);
  EXPECT_EQ(kind_of([] { BallRegion(Point{0.0}, 0.0); }), ErrorKind::Usage);
  EXPECT_EQ(kind_of([] { BallRegion(Point{0.0}, kInf); }), ErrorKind::Usage);
}

TEST(Pairing, Examples) {
  EXPECT_DOUBLE_EQ(pairing(TiltForm{1.0, 2.0}, Point{3.0, 4.0}), 11.0);
  EXPECT_DOUBLE_EQ(pairing(TiltForm::zero(2), Point{3.0, -4.0}), 0.0);
  EXPECT_DOUBLE_EQ(pairing(TiltForm{1.0, 0.0}, Point{0.0, 1.0}), 0.0);
  EXPECT_EQ(kind_of([] { pairing(TiltForm{1.0}, Point{1.0, 2.0}); }), ErrorKind::Usage);
}

TEST(Pairing, SymmetricUnderSwap) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    EXPECT_EQ(pairing(TiltForm(a), Point(b)), pairing(TiltForm(b), Point(a)));
  }
}

TEST(TiltedValue, Examples) {
  const FunctionOracle f = square();
  EXPECT_DOUBLE_EQ(tilted_value(f, TiltForm{1.0}, Point{1.0}).value(), 0.0);
  EXPECT_DOUBLE_EQ(tilted_value(f, TiltForm{0.0}, Point{2.0}).value(), 4.0);
  const FunctionOracle inf("inf", 1, [](const Point&) { return ExtendedReal::infinity(); });
  EXPECT_TRUE(tilted_value(inf, TiltForm{3.0}, Point{1.0}).is_infinite());
}

TEST(TiltedValue, ZeroTiltIsExact) {
  const FunctionOracle f("cubic", 1, [](const Point& x) { return ExtendedReal(std::sin(x[0]) * 1e3 + 0.1); });
  for (double x : {-3.3, 0.0, 1.0 / 3.0, 7.25}) {
    EXPECT_EQ(tilted_value(f, TiltForm{0.0}, Point{x}), f(Point{x}));
  }
}

TEST(DualityMap, Examples) {
  const TiltForm a = duality_map(Point{3.0, 4.0}, 2.0);
  EXPECT_DOUBLE_EQ(a[0], 3.0);
  EXPECT_DOUBLE_EQ(a[1], 4.0);
  const TiltForm b = duality_map(Point{0.0, 2.0}, 3.0);
  EXPECT_DOUBLE_EQ(b[0], 0.0);
  EXPECT_DOUBLE_EQ(b[1], 4.0);
  EXPECT_EQ(duality_map(Point::zero(2), 1.7), TiltForm::zero(2));
}

TEST(DualityMap, NormAndPairingIdentities) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> exponent(1.05, 6.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(1 + trial % 4);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng) * std::pow(10.0, trial % 5 - 2);
    const Point x(v);
    const double p = exponent(rng);
    const TiltForm j = duality_map(x, p);
    const double expected_norm = std::pow(x.norm(), p - 1.0);
    EXPECT_NEAR(j.norm(), expected_norm, 1e-10 * expected_norm);
    EXPECT_NEAR(pairing(j, x), j.norm() * x.norm(), 1e-10 * j.norm() * x.norm());
  }
}

TEST(FunctionOracle, DimensionAndNanChecks) {
  const FunctionOracle f = square();
  EXPECT_EQ(kind_of([&] { f(Point{1.0, 2.0}); }), ErrorKind::Usage);
  const FunctionOracle bad("nan", 1, [](const Point&) { return ExtendedReal(std::nan("")); });
  EXPECT_EQ(kind_of([&] { bad(Point{0.0}); }), ErrorKind::NonFiniteValue);
}

TEST(FunctionOracle, KnownMinimizerMustBeInDomain) {
  const FunctionOracle f = restricted(square(), [](const Point& x) { return x[0] >= 1.0; }, "x >= 1");
  EXPECT_EQ(kind_of([&] { f.with_known_minimizer(Point{0.0}); }), ErrorKind::Usage);
  const FunctionOracle g = f.with_known_minimizer(Point{1.0}).with_known_constants({.gamma = 1.0});
  ASSERT_TRUE(g.known_minimizer().has_value());
  EXPECT_EQ(*g.known_minimizer(), Point{1.0});
  EXPECT_EQ(g.known_constants()->gamma, 1.0);
  EXPECT_FALSE(g.known_constants()->kappa.has_value());
}

TEST(FunctionOracle, Combinators) {
  const FunctionOracle f = square();
  const FunctionOracle g = linear_function(TiltForm{2.0});
  EXPECT_DOUBLE_EQ(sum(f, g)(Point{3.0}).value(), 15.0);
  EXPECT_DOUBLE_EQ(constant_function(1, -2.5)(Point{9.0}).value(), -2.5);
  EXPECT_DOUBLE_EQ(tilted(f, TiltForm{2.0})(Point{3.0}).value(), 3.0);
  const FunctionOracle box = restricted(f, [](const Point& x) { return std::abs(x[0]) <= 1.0; }, "[-1,1]");
  EXPECT_TRUE(box(Point{1.5}).is_infinite());
  EXPECT_TRUE(sum(box, g)(Point{1.5}).is_infinite());
  EXPECT_DOUBLE_EQ(box(Point{0.5}).value(), 0.25);
  EXPECT_EQ(kind_of([&] { sum(f, linear_function(TiltForm{1.0, 1.0})); }), ErrorKind::Usage);
}

TEST(Distance, Euclidean) {
  EXPECT_DOUBLE_EQ(distance(Point{0.0, 0.0}, Point{3.0, 4.0}), 5.0);
  EXPECT_EQ(kind_of([] { distance(Point{0.0}, Point{3.0, 4.0}); }), ErrorKind::Usage);
}
