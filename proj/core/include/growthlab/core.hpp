#pragma once

#include <Eigen/Core>

#include <compare>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>

#include "growthlab/error.hpp"

namespace growthlab {

// Value in R ∪ {+∞}. NaN and -∞ are rejected at construction, so comparisons and
// sums over indicator-restricted objectives are always well defined.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double value);  // NOLINT(google-explicit-constructor)

  static ExtendedReal infinity() noexcept {
    ExtendedReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_finite() const noexcept { return value_ != std::numeric_limits<double>::infinity(); }
  bool is_infinite() const noexcept { return !is_finite(); }

  // The finite value, or +inf as a double for infinite values.
  double value() const noexcept { return value_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) noexcept {
    ExtendedReal r;
    r.value_ = (a.is_infinite() || b.is_infinite()) ? std::numeric_limits<double>::infinity()
                                                    : a.value_ + b.value_;
    return r;
  }

  friend bool operator==(ExtendedReal a, ExtendedReal b) noexcept { return a.value_ == b.value_; }
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) noexcept {
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
};

template <class Tag>
class FiniteVector {
 public:
  FiniteVector() = default;

  explicit FiniteVector(Eigen::VectorXd coords) : coords_(std::move(coords)) { validate(); }

  FiniteVector(std::initializer_list<double> values) : coords_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index i = 0;
    for (double v : values) coords_[i++] = v;
    validate();
  }

  static FiniteVector zero(Eigen::Index dim) { return FiniteVector(Eigen::VectorXd::Zero(dim)); }

  Eigen::Index dim() const noexcept { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }
  const Eigen::VectorXd& coords() const noexcept { return coords_; }
  double norm() const { return coords_.norm(); }

  friend bool operator==(const FiniteVector& a, const FiniteVector& b) {
    return a.dim() == b.dim() && a.coords_ == b.coords_;
  }

  // Lexicographic order on coordinates; used as the deterministic tie-break.
  friend bool lexicographically_less(const FiniteVector& a, const FiniteVector& b) {
    for (Eigen::Index i = 0; i < std::min(a.dim(), b.dim()); ++i) {
      if (a.coords_[i] != b.coords_[i]) return a.coords_[i] < b.coords_[i];
    }
    return a.dim() < b.dim();
  }

 private:
  void validate() const {
    if (coords_.size() < 1) usage_error("vector must have dimension >= 1");
    if (!coords_.allFinite()) usage_error("vector entries must be finite");
  }

  Eigen::VectorXd coords_;
};

struct PointTag {};
struct TiltTag {};

// Element x of the ambient space R^d.
using Point = FiniteVector<PointTag>;
// Element ξ of the dual space; paired with points through the dot product.
using TiltForm = FiniteVector<TiltTag>;

double distance(const Point& a, const Point& b);

// Conjugate exponents p, q > 1 with 1/p + 1/q = 1.
class ExponentPair {
 public:
  explicit ExponentPair(double p);
  ExponentPair(double p, double q);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  // The Hölder exponent q/p = 1/(p-1) that links ‖x - x̄‖ to ‖ξ‖.
  double holder() const noexcept { return q_ / p_; }

 private:
  double p_;
  double q_;
};

// Closed ball 𝔹(center, radius).
class BallRegion {
 public:
  static constexpr double kMembershipSlack = 1e-12;

  BallRegion(Point center, double radius);

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  Eigen::Index dim() const noexcept { return center_.dim(); }

  bool contains(const Point& x) const;
  Point project(const Eigen::VectorXd& x) const;

 private:
  Point center_;
  double radius_;
};

// Analytic constants, used only by test harnesses and reports; estimators never read them.
struct KnownConstants {
  std::optional<double> gamma;
  std::optional<double> kappa;
  std::optional<double> mu;
};

// Extended-real-valued objective f: R^d -> R ∪ {+∞}. Evaluation must be pure, so a
// single oracle can be shared by concurrent workers.
class FunctionOracle {
 public:
  using Evaluator = std::function<ExtendedReal(const Point&)>;

  FunctionOracle(std::string descriptor, Eigen::Index dim, Evaluator evaluate);

  // Raises NonFiniteValue when the evaluator produces NaN.
  ExtendedReal operator()(const Point& x) const;

  const std::string& descriptor() const noexcept { return descriptor_; }
  Eigen::Index dim() const noexcept { return dim_; }
  const std::optional<Point>& known_minimizer() const noexcept { return known_minimizer_; }
  const std::optional<KnownConstants>& known_constants() const noexcept { return known_constants_; }

  FunctionOracle with_known_minimizer(Point x) const;
  FunctionOracle with_known_constants(KnownConstants constants) const;
  FunctionOracle without_known_constants() const;
  FunctionOracle renamed(std::string descriptor) const;

 private:
  std::string descriptor_;
  Eigen::Index dim_;
  Evaluator evaluate_;
  std::optional<Point> known_minimizer_;
  std::optional<KnownConstants> known_constants_;
};

// ⟨ξ, x⟩.
double pairing(const TiltForm& xi, const Point& x);

// f(x) - ⟨ξ, x⟩, with +∞ propagated.
ExtendedReal tilted_value(const FunctionOracle& f, const TiltForm& xi, const Point& x);

// The Euclidean duality mapping J_p(x) = ‖x‖^{p-2} x (zero at x = 0).
TiltForm duality_map(const Point& x, double p);

// y ↦ f(y) - ⟨ξ, y⟩.
FunctionOracle tilted(const FunctionOracle& f, const TiltForm& xi);

// y ↦ f(y) + g(y), +∞ absorbing.
FunctionOracle sum(const FunctionOracle& f, const FunctionOracle& g);

// f plus the indicator of {y : keep(y)}.
FunctionOracle restricted(const FunctionOracle& f, std::function<bool(const Point&)> keep,
                          const std::string& label);

FunctionOracle constant_function(Eigen::Index dim, double value);
FunctionOracle linear_function(const TiltForm& c);

}  // namespace growthlab
