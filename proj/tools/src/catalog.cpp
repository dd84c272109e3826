#include "growthlab/cli/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace growthlab::cli {

namespace {

FunctionOracle power_family(const CatalogParams& params) {
  if (params.dim < 1 || params.dim > 4) usage_error("power: dim must be in [1, 4]");
  const double p = params.p;
  const ExponentPair pq(p);
  return FunctionOracle("|x|^p", params.dim,
                        [p](const Point& x) { return ExtendedReal(std::pow(x.norm(), p)); })
      .with_known_minimizer(Point::zero(params.dim))
      .with_known_constants({1.0, std::pow(p, -pq.holder()), std::pow(p, -pq.q())});
}

FunctionOracle half_power(const CatalogParams& params) {
  const double p = params.p;
  (void)ExponentPair(p);
  return FunctionOracle("max{x,0}^p", 1,
                        [p](const Point& x) { return ExtendedReal(std::pow(std::max(x[0], 0.0), p)); })
      .with_known_minimizer(Point{0.0})
      .with_known_constants({0.0, std::nullopt, std::nullopt});
}

FunctionOracle max_square_2d(const CatalogParams&) {
  return FunctionOracle("max{x1,0}^2 + x2^2", 2,
                        [](const Point& x) {
                          const double a = std::max(x[0], 0.0);
                          return ExtendedReal(a * a + x[1] * x[1]);
                        })
      .with_known_minimizer(Point{0.0, 0.0})
      .with_known_constants({0.0, std::nullopt, std::nullopt});
}

FunctionOracle power_sum(const CatalogParams&) {
  return FunctionOracle("|x|^2 + |x|^3", 1,
                        [](const Point& x) {
                          const double a = std::abs(x[0]);
                          return ExtendedReal(a * a + a * a * a);
                        })
      .with_known_minimizer(Point{0.0})
      .with_known_constants({1.0, 0.5, 0.25});
}

FunctionOracle anisotropic_quadratic(const CatalogParams&) {
  return FunctionOracle("x1^2 + 2 x2^2", 2,
                        [](const Point& x) { return ExtendedReal(x[0] * x[0] + 2.0 * x[1] * x[1]); })
      .with_known_minimizer(Point{0.0, 0.0})
      .with_known_constants({1.0, 0.5, 0.25});
}

FunctionOracle box_quadratic(const CatalogParams&) {
  return FunctionOracle("x^2 + indicator[-1,1]", 1,
                        [](const Point& x) {
                          if (std::abs(x[0]) > 1.0) return ExtendedReal::infinity();
                          return ExtendedReal(x[0] * x[0]);
                        })
      .with_known_minimizer(Point{0.0})
      .with_known_constants({1.0, 0.5, 0.25});
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"power", "f(x) = |x|^p", "p > 1, dim in [1,4]", std::nullopt, 1.0, power_family},
      {"halfpower", "f(x) = max{x,0}^p", "p > 1, dim = 1", std::nullopt, 1.0, half_power},
      {"maxsq2d", "f(x1,x2) = max{x1,0}^2 + x2^2", "dim = 2", 2.0, 1.0, max_square_2d},
      {"powersum", "f(x) = |x|^2 + |x|^3", "dim = 1", 2.0, 1.0, power_sum},
      {"quad2d", "f(x1,x2) = x1^2 + 2 x2^2", "dim = 2", 2.0, 1.0, anisotropic_quadratic},
      {"boxquad", "f(x) = x^2 + indicator of [-1,1]", "dim = 1", 2.0, 1.5, box_quadratic},
  };
  return entries;
}

const CatalogEntry& find_entry(const std::string& id) {
  const auto& entries = catalog();
  auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& e) { return e.id == id; });
  if (it == entries.end()) usage_error("unknown function id '" + id + "' (see `growthlab catalog`)");
  return *it;
}

FunctionOracle make_oracle(const CatalogEntry& entry, const CatalogParams& params) {
  FunctionOracle oracle = entry.make(params);
  if (entry.natural_p && std::abs(*entry.natural_p - params.p) > 1e-12) {
    // Constants were derived for the natural exponent only.
    oracle = oracle.without_known_constants();
  }
  return oracle;
}

}  // namespace growthlab::cli
