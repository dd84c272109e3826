#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/core.hpp"
#include "growthlab/minimize.hpp"

namespace growthlab {

// Growth-ratio floor (f(x) - f(x̄)) / ‖x - x̄‖^p over lattice samples. Sampling can only
// miss bad points, so gamma_hat over-estimates the largest valid growth constant.
struct GrowthEstimate {
  double gamma_hat = 0.0;
  Point witness;
  std::size_t samples_used = 0;
};

// Largest ‖x_ξ - x̄‖ / ‖ξ‖^{q/p} seen over sampled tilts and every reported minimizer;
// a lower bound on the smallest valid tilt constant.
struct TiltEstimate {
  double kappa_hat = 0.0;
  TiltForm worst_tilt;
  Point worst_minimizer;
  std::size_t tilts_used = 0;
};

// Largest (f(x_ξ) - f(x̄)) / ‖ξ‖^q; a lower bound on the smallest valid constant.
struct LojaEstimate {
  double mu_hat = 0.0;
  TiltForm worst_tilt;
  Point worst_minimizer;
  std::size_t tilts_used = 0;
};

struct TiltSampling {
  std::vector<double> tilt_norms{0.05, 0.1, 0.2, 0.5, 1.0};
  int directions_per_norm = 2;
  // Only used for d >= 3, where directions are Gaussian draws normalized to the sphere.
  std::uint64_t seed = 20240601;

  void validate() const;
};

// Unit directions for tilt and slope probing: ±e1 in 1-D, equally spaced angles in 2-D,
// normalized Gaussian draws from `seed` in higher dimensions.
std::vector<Eigen::VectorXd> sphere_directions(Eigen::Index dim, int count, std::uint64_t seed);

// Tilts ξ = norm · direction for every requested norm, norm-major order.
std::vector<TiltForm> sample_tilts(Eigen::Index dim, const TiltSampling& sampling);

struct TiltedSolve {
  TiltForm tilt;
  TiltedSolveResult result;
};

// One global solve of f - ⟨ξ,·⟩ per sampled tilt; shared by the tilt and Łojasiewicz
// estimators so a diagnosis solves each tilted problem once.
std::vector<TiltedSolve> sweep_tilts(const FunctionOracle& f, const BallRegion& region,
                                     const std::vector<TiltForm>& tilts, const SolverConfig& cfg);

GrowthEstimate estimate_growth(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                               const ExponentPair& pq, const SolverConfig& cfg);

TiltEstimate estimate_tilt_constant(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                                    const ExponentPair& pq, const TiltSampling& sampling,
                                    const SolverConfig& cfg);
TiltEstimate estimate_tilt_constant(const std::vector<TiltedSolve>& sweep, const Point& xbar,
                                    const ExponentPair& pq);

LojaEstimate estimate_loja_constant(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                                    const ExponentPair& pq, const TiltSampling& sampling,
                                    const SolverConfig& cfg);
LojaEstimate estimate_loja_constant(const std::vector<TiltedSolve>& sweep, const FunctionOracle& f,
                                    const Point& xbar, const ExponentPair& pq);

enum class RelationStatus { Pass, Fail, Degenerate };

std::string_view to_string(RelationStatus status);

struct RelationCheck {
  RelationStatus status = RelationStatus::Degenerate;
  double lhs = 0.0;
  double rhs = 0.0;
  // Unscaled ratio of the two sides; 1 means the constants are exactly related and
  // the relation holds iff slack >= 1/tau.
  double slack = 0.0;
};

// The constant chain κ = γ^{-q/p}, μ = κ, γ = p^{-q} μ^{-1}, audited up to a slack
// factor tau:
//   (a) κ̂ <= tau γ̂^{-q/p}
//   (b) μ̂ <= tau κ̂            (only meaningful when γ̂ > 0)
//   (c) γ̂ >= p^{-q} μ̂^{-1} / tau
struct EquivalenceAudit {
  double tau = 1.10;
  RelationCheck kappa_from_gamma;
  RelationCheck mu_from_kappa;
  RelationCheck gamma_from_mu;
  bool degenerate = false;

  bool all_pass() const;
  bool any_fail() const;
};

inline constexpr double kDefaultAuditSlack = 1.10;

EquivalenceAudit check_equivalence(const GrowthEstimate& growth, const TiltEstimate& tilt,
                                   const LojaEstimate& loja, const ExponentPair& pq,
                                   double tau = kDefaultAuditSlack);

struct DiagnosticsReport {
  GrowthEstimate growth;
  TiltEstimate tilt;
  LojaEstimate loja;
  EquivalenceAudit audit;
  ExponentPair exponents{2.0};
  BallRegion region{Point{0.0}, 1.0};
};

DiagnosticsReport diagnose(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                           const ExponentPair& pq, const TiltSampling& sampling, const SolverConfig& cfg,
                           double tau = kDefaultAuditSlack);

struct SlopeEstimate {
  double slope = 0.0;
  // max{0, φ(x) - φ(y)} / ‖x - y‖ maximized over each probe shell, in probe order.
  std::vector<double> per_radius;
};

// Finite-radius approximation of the metric slope limsup_{y→x} max{0, φ(x)-φ(y)}/‖x-y‖;
// the value at the smallest radius is reported. +∞ when x is outside dom φ.
SlopeEstimate metric_slope(const FunctionOracle& phi, const Point& x, const std::vector<double>& probe_radii,
                           int directions, std::uint64_t seed = 20240601);

std::vector<double> default_probe_radii();

struct ProbeResult {
  bool passed = false;
  double perturbation_size = 0.0;  // Lip ζ or |∇φ|(x̄)
  double bound = 0.0;              // κ · size^λ
  double worst_distance = 0.0;
  Point witness;
  TiltedSolveResult solve;
};

// Minimizers of f + ζ over the region must stay within κ (Lip ζ)^λ of x̄.
ProbeResult lipschitz_probe(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                            const FunctionOracle& zeta, double lipschitz_constant, double lambda, double kappa,
                            const SolverConfig& cfg);

// Minimizers of f + φ must stay within κ |∇φ|(x̄)^λ of x̄; φ is declared convex by the caller.
ProbeResult convex_probe(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                         const FunctionOracle& phi, double lambda, double kappa, const SolverConfig& cfg);

struct SubgradientPair {
  Point x;
  TiltForm xi;
};

// (x_ξ, ξ) for every global minimizer x_ξ of f - ξ over the region: a sampling of the
// graph of the Fenchel-Moreau subdifferential.
std::vector<SubgradientPair> sample_subdifferential_graph(const FunctionOracle& f, const BallRegion& domain_region,
                                                          const std::vector<TiltForm>& tilt_grid,
                                                          const SolverConfig& cfg);

struct InequalityCheck {
  bool passed = true;
  // No sampled point other than x̄ was available, so the pass carries no evidence.
  bool vacuous = false;
  // Largest lhs / rhs over the evidence; <= 1 on pass.
  double worst_ratio = 0.0;
  std::optional<Point> witness;
  double witness_residual = 0.0;  // d(0, ∂f(witness)) estimate
  std::size_t points_checked = 0;
};

// Points closer than this are treated as the same point when grouping subgradients.
inline constexpr double kPointMergeTolerance = 1e-9;

// ‖x - x̄‖ <= κ d(0, ∂f(x))^{q/p}, with d(0, ∂f(x)) the smallest ‖ξ‖ paired with x.
InequalityCheck check_subregularity(const std::vector<SubgradientPair>& pairs, const Point& xbar,
                                    const ExponentPair& pq, double kappa);

// f(x) - f(x̄) <= μ d(0, ∂f(x))^q.
InequalityCheck check_global_loja(const std::vector<SubgradientPair>& pairs, const FunctionOracle& f,
                                  const Point& xbar, const ExponentPair& pq, double mu);

}  // namespace growthlab
