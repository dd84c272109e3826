#include "growthlab/core.hpp"

#include <cmath>

namespace growthlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "UsageError";
    case ErrorKind::AllInfinite: return "AllInfinite";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NoFiniteSamples: return "NoFiniteSamples";
    case ErrorKind::NegativeGap: return "NegativeGap";
    case ErrorKind::SlopeInfinite: return "SlopeInfinite";
    case ErrorKind::EpsilonNotBelowGamma: return "EpsilonNotBelowGamma";
    case ErrorKind::NewtonDivergence: return "NewtonDivergence";
    case ErrorKind::LinearSolverBreakdown: return "LinearSolverBreakdown";
    case ErrorKind::NoSamplesInShell: return "NoSamplesInShell";
  }
  return "UnknownError";
}

ExtendedReal::ExtendedReal(double value) : value_(value) {
  if (std::isnan(value)) throw Error(ErrorKind::NonFiniteValue, "objective returned NaN");
  if (value == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorKind::NonFiniteValue, "objective returned -inf");
  }
}

double distance(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) usage_error("dimension mismatch in distance");
  return (a.coords() - b.coords()).norm();
}

ExponentPair::ExponentPair(double p) : ExponentPair(p, p / (p - 1.0)) {}

ExponentPair::ExponentPair(double p, double q) : p_(p), q_(q) {
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q)) {
    usage_error("exponents must satisfy p, q > 1");
  }
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) usage_error("exponents must satisfy 1/p + 1/q = 1");
}

BallRegion::BallRegion(Point center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) usage_error("ball radius must be finite and positive");
}

bool BallRegion::contains(const Point& x) const {
  return distance(x, center_) <= radius_ + kMembershipSlack;
}

Point BallRegion::project(const Eigen::VectorXd& x) const {
  Eigen::VectorXd offset = x - center_.coords();
  const double r = offset.norm();
  if (r <= radius_) return Point(x);
  return Point(center_.coords() + offset * (radius_ / r));
}

FunctionOracle::FunctionOracle(std::string descriptor, Eigen::Index dim, Evaluator evaluate)
    : descriptor_(std::move(descriptor)), dim_(dim), evaluate_(std::move(evaluate)) {
  if (dim_ < 1) usage_error("oracle dimension must be >= 1");
  if (!evaluate_) usage_error("oracle needs an evaluator");
}

ExtendedReal FunctionOracle::operator()(const Point& x) const {
  if (x.dim() != dim_) usage_error("dimension mismatch evaluating " + descriptor_);
  return evaluate_(x);
}

FunctionOracle FunctionOracle::with_known_minimizer(Point x) const {
  if (x.dim() != dim_) usage_error("known minimizer has wrong dimension");
  FunctionOracle copy = *this;
  if (copy(x).is_infinite()) usage_error("oracle is +inf at its known minimizer");
  copy.known_minimizer_ = std::move(x);
  return copy;
}

FunctionOracle FunctionOracle::with_known_constants(KnownConstants constants) const {
  FunctionOracle copy = *this;
  copy.known_constants_ = constants;
  return copy;
}

FunctionOracle FunctionOracle::without_known_constants() const {
  FunctionOracle copy = *this;
  copy.known_constants_.reset();
  return copy;
}

FunctionOracle FunctionOracle::renamed(std::string descriptor) const {
  FunctionOracle copy = *this;
  copy.descriptor_ = std::move(descriptor);
  return copy;
}

double pairing(const TiltForm& xi, const Point& x) {
  if (xi.dim() != x.dim()) usage_error("dimension mismatch in pairing");
  return xi.coords().dot(x.coords());
}

ExtendedReal tilted_value(const FunctionOracle& f, const TiltForm& xi, const Point& x) {
  const ExtendedReal fx = f(x);
  const double shift = pairing(xi, x);
  if (fx.is_infinite()) return fx;
  return ExtendedReal(fx.value() - shift);
}

TiltForm duality_map(const Point& x, double p) {
  if (!(p >= 1.0)) usage_error("duality map needs p >= 1");
  const double r = x.norm();
  if (r == 0.0) return TiltForm::zero(x.dim());
  return TiltForm(x.coords() * std::pow(r, p - 2.0));
}

FunctionOracle tilted(const FunctionOracle& f, const TiltForm& xi) {
  if (xi.dim() != f.dim()) usage_error("tilt dimension does not match oracle");
  return FunctionOracle(f.descriptor() + " - <xi,.>", f.dim(),
                        [f, xi](const Point& y) { return tilted_value(f, xi, y); });
}

FunctionOracle sum(const FunctionOracle& f, const FunctionOracle& g) {
  if (f.dim() != g.dim()) usage_error("cannot add oracles of different dimension");
  return FunctionOracle(f.descriptor() + " + " + g.descriptor(), f.dim(), [f, g](const Point& y) {
    const ExtendedReal fy = f(y);
    if (fy.is_infinite()) return fy;
    return fy + g(y);
  });
}

FunctionOracle restricted(const FunctionOracle& f, std::function<bool(const Point&)> keep,
                          const std::string& label) {
  return FunctionOracle(f.descriptor() + " + indicator(" + label + ")", f.dim(),
                        [f, keep = std::move(keep)](const Point& y) {
                          return keep(y) ? f(y) : ExtendedReal::infinity();
                        });
}

FunctionOracle constant_function(Eigen::Index dim, double value) {
  return FunctionOracle("const", dim, [value](const Point&) { return ExtendedReal(value); });
}

FunctionOracle linear_function(const TiltForm& c) {
  return FunctionOracle("<c,.>", c.dim(), [c](const Point& y) { return ExtendedReal(pairing(c, y)); });
}

}  // namespace growthlab
