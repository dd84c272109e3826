#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "growthlab/core.hpp"

namespace growthlab {

inline constexpr Eigen::Index kMaxGridDimension = 4;

struct SolverConfig {
  int grid_points_per_axis = 2001;
  int multistart_count = 8;
  int polish_max_iters = 10000;
  double polish_step_tolerance = 1e-11;
  // Relative slack: a point is near-optimal when its value is within
  // minimizer_value_tolerance * (1 + |best|) of the best value found.
  double minimizer_value_tolerance = 1e-10;

  void validate() const;

  // Grid density that keeps a single solve to a few million evaluations.
  static SolverConfig defaults_for_dimension(Eigen::Index dim);
};

struct Candidate {
  Point point;
  double value;
};

struct TiltedSolveResult {
  // Every near-optimal point found, ordered by value and then lexicographically.
  std::vector<Candidate> minimizers;
  double min_value = 0.0;
  std::size_t evaluations = 0;

  // Best value, lexicographically smallest among exact ties.
  const Point& representative() const { return minimizers.front().point; }

  friend bool operator==(const TiltedSolveResult& a, const TiltedSolveResult& b);
};

// The axis-aligned sample lattice laid over the bounding cube of a ball. Lattice
// points outside the ball are reported as absent rather than projected.
class BallGrid {
 public:
  BallGrid(const BallRegion& region, int points_per_axis);

  std::size_t size() const noexcept { return total_; }
  double spacing() const noexcept { return spacing_; }
  const BallRegion& region() const noexcept { return region_; }

  // Coordinates of lattice point `index`; false when it lies outside the ball.
  bool point(std::size_t index, Eigen::VectorXd& out) const;

 private:
  BallRegion region_;
  int per_axis_;
  std::size_t total_;
  double spacing_;
};

// Global minimization over the closed ball: dense lattice scan, then coordinate
// descent polish from the multistart_count best lattice points.
TiltedSolveResult argmin_ball(const FunctionOracle& f, const BallRegion& region, const SolverConfig& cfg);

TiltedSolveResult argmin_tilted(const FunctionOracle& f, const TiltForm& xi, const BallRegion& region,
                                const SolverConfig& cfg);

TiltedSolveResult argmin_perturbed(const FunctionOracle& f, const FunctionOracle& g, const BallRegion& region,
                                   const SolverConfig& cfg);

}  // namespace growthlab
