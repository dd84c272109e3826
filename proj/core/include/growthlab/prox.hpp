#pragma once

#include <vector>

#include "growthlab/core.hpp"
#include "growthlab/minimize.hpp"

namespace growthlab {

struct ProxConfig {
  double epsilon = 0.5;
  ExponentPair exponents{2.0};
  int iterations = 10;
  BallRegion region{Point{0.0}, 2.0};
  SolverConfig solver;

  void validate() const;
};

struct ProxStep {
  double min_value = 0.0;         // value of the proximal objective at x_{k+1}
  std::size_t minimizer_count = 0;
  std::size_t evaluations = 0;
};

struct ProxTrajectory {
  std::vector<Point> points;   // x_0 .. x_K
  std::vector<double> values;  // f(x_k)
  std::vector<ProxStep> steps; // one per update, steps[k] produced x_{k+1}
};

// Global minimizer of y ↦ f(y) + (ε/p)‖y - anchor‖^p over the region.
TiltedSolveResult prox_step(const FunctionOracle& f, const Point& anchor, const ProxConfig& cfg);

ProxTrajectory run_prox(const FunctionOracle& f, const Point& x0, const ProxConfig& cfg);

struct RateRow {
  int k = 0;
  double distance = 0.0;  // ‖x_k - x̄‖
  double bound_x = 0.0;   // (ε/γ)^{kq/p} ‖x_0 - x̄‖
  double gap = 0.0;       // f(x_k) - f(x̄)
  double bound_f = 0.0;   // (ε/γ)^{kq} (f(x_0) - f(x̄))
  double margin_x = 0.0;  // bound_x - distance
  double margin_f = 0.0;
  bool pass_x = false;
  bool pass_f = false;
};

struct RateAudit {
  std::vector<RateRow> rows;
  bool passed = false;
};

// Checks both geometric envelopes at every k with 1e-8 absolute + 1e-6 relative slack.
// Refuses (EpsilonNotBelowGamma) unless 0 < ε < γ.
RateAudit audit_rates(const ProxTrajectory& traj, double gamma_ref, const Point& xbar, double fbar,
                      const ExponentPair& pq, double epsilon);

}  // namespace growthlab
