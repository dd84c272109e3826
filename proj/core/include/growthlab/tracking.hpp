#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/error.hpp"

namespace growthlab::tracking {

// Uniform n×n interior lattice on the unit square, mesh width h = 1/(n+1), with
// homogeneous Dirichlet data on the boundary. Node (i, j) sits at ((i+1)h, (j+1)h)
// and is stored at index j*n + i.
class Grid2D {
 public:
  explicit Grid2D(int n);

  int n() const noexcept { return n_; }
  double h() const noexcept { return h_; }
  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(n_) * n_; }
  Eigen::Index index(int i, int j) const noexcept { return static_cast<Eigen::Index>(j) * n_ + i; }
  double coordinate(int i) const noexcept { return (i + 1) * h_; }

  // The 5-point discretization of -Δ (symmetric positive definite).
  const Eigen::SparseMatrix<double>& laplacian() const noexcept { return *laplacian_; }

  // Discrete L² quantities: ‖f‖ = h·sqrt(Σ f_ij²), ⟨f, g⟩ = h² Σ f_ij g_ij.
  double l2_norm(const Eigen::VectorXd& f) const { return h_ * f.norm(); }
  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const { return h_ * h_ * f.dot(g); }

  template <class Fn>
  Eigen::VectorXd sample(Fn&& fn) const {
    Eigen::VectorXd out(size());
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) out[index(i, j)] = fn(coordinate(i), coordinate(j));
    }
    return out;
  }

 private:
  int n_;
  double h_;
  std::shared_ptr<const Eigen::SparseMatrix<double>> laplacian_;
};

// Nodal field on the interior lattice (state, adjoint, linearized state, target, η).
class Field2D {
 public:
  Field2D() = default;
  Field2D(const Grid2D& grid, Eigen::VectorXd values);

  static Field2D zero(const Grid2D& grid) { return Field2D(grid, Eigen::VectorXd::Zero(grid.size())); }

  int n() const noexcept { return n_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }

 private:
  int n_ = 0;
  Eigen::VectorXd values_;
};

// Nodal control with its box [alpha, beta].
class ControlField2D {
 public:
  ControlField2D() = default;
  ControlField2D(const Grid2D& grid, Eigen::VectorXd values, double alpha, double beta);

  static ControlField2D constant(const Grid2D& grid, double value, double alpha, double beta) {
    return ControlField2D(grid, Eigen::VectorXd::Constant(grid.size(), value), alpha, beta);
  }

  int n() const noexcept { return n_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  bool feasible() const;
  Eigen::VectorXd clip(const Eigen::VectorXd& raw) const;

 private:
  int n_ = 0;
  Eigen::VectorXd values_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 50;
  int max_halvings = 30;
};

struct StateSolve {
  Field2D state;
  std::vector<double> residual_history;  // discrete L² residual before each Newton step
  double residual = 0.0;
};

// -Δ_h y + y³ = u by damped Newton from y = 0.
StateSolve solve_state_detailed(const Eigen::VectorXd& u, const Grid2D& grid, const NewtonOptions& opts = {});
Field2D solve_state(const ControlField2D& u, const Grid2D& grid, const NewtonOptions& opts = {});

// (-Δ_h + 3 diag(y²)) p = y - y_d.
Field2D solve_adjoint(const Field2D& y, const Field2D& y_d, const Grid2D& grid);

// (-Δ_h + 3 diag(y_base²)) z = v.
Field2D solve_linearized(const Eigen::VectorXd& v, const Field2D& y_base, const Grid2D& grid);

// Residual of the linear SPD operator (-Δ_h + 3 diag(y²)) x - rhs in the discrete L² norm.
double linear_residual(const Field2D& y, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs, const Grid2D& grid);

// ½‖y_u - y_d‖² in the discrete L² norm.
double objective(const ControlField2D& u, const Field2D& y_d, const Grid2D& grid);
double objective(const Eigen::VectorXd& u, const Field2D& y_d, const Grid2D& grid);

// ∫(1 - 6 y_ū p_ū) z_v² for the linearized state z_v at ū.
double second_order_form(const ControlField2D& ubar, const Eigen::VectorXd& v, const Field2D& y_d,
                         const Grid2D& grid);

struct TrackingOptions {
  double tolerance = 1e-8;  // on ‖u - clip(u - p_u)‖
  int max_iterations = 5000;
  double armijo = 1e-4;
  double initial_step = 100.0;
  int max_backtracks = 50;
  NewtonOptions newton;
  std::optional<Eigen::VectorXd> warm_start;
};

struct TrackingResult {
  ControlField2D control;
  Field2D state;
  Field2D adjoint;
  double objective = 0.0;
  double first_order_residual = 0.0;
  int iterations = 0;
  // False when the iteration cap was reached or the line search stalled; the final
  // iterate is still returned.
  bool converged = false;
};

// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking.
TrackingResult solve_tracking(const Field2D& y_d, const Grid2D& grid, double alpha, double beta,
                              const TrackingOptions& opts = {});

struct SscSample {
  std::string kind;  // "lower", "upper", "switching" or "random"
  double first_order = 0.0;   // ⟨p_ū, v⟩
  double second_order = 0.0;  // 𝒥''(ū)v²
  double z_norm = 0.0;
  double quotient = 0.0;
};

struct SscEstimate {
  double c_hat = 0.0;
  std::vector<SscSample> samples;
};

// Smallest (𝒥'(ū)v + ½𝒥''(ū)v²) / ‖z_v‖² over sampled feasible directions v = u - ū,
// each scaled so that ‖z_v‖ <= delta.
SscEstimate ssc_estimate(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid, double delta,
                         int sample_count, std::uint64_t seed);

// Smallest (𝒥(u) - 𝒥(ū)) / ‖y_u - y_ū‖² over sampled feasible u with ‖y_u - y_ū‖ <= delta.
double growth_cross_check(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid, double delta,
                          int sample_count, std::uint64_t seed);

// Low-frequency field Σ_{k,l<=4} c_kl sin(kπx₁) sin(lπx₂), c_kl ~ N(0,1), rescaled to
// the requested L² norm.
Field2D smooth_perturbation(const Grid2D& grid, double l2_norm, std::uint64_t seed, std::uint64_t stream);

struct SweepSample {
  std::size_t norm_index = 0;
  std::size_t sample_index = 0;
  double eta_norm = 0.0;
  double ratio = 0.0;  // ‖y_{u_η} - y_ū‖ / ‖η‖
  double objective = 0.0;
  double first_order_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
};

struct SweepReport {
  std::vector<SweepSample> samples;
  double kappa_hat = 0.0;     // largest ratio over successful samples
  double median_ratio = 0.0;
  double max_spread = 0.0;    // max over samples of max(r/median, median/r)
  std::size_t skipped = 0;    // zero-norm requests
};

// Solves the perturbed problems with target y_d + η, warm-started from ū, and records
// the state sensitivity ratio for each η.
SweepReport perturbation_sweep(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid,
                               const std::vector<double>& eta_norms, int etas_per_norm,
                               const TrackingOptions& opts, std::uint64_t seed);

// sin(πx₁) sin(πx₂).
Field2D default_target(const Grid2D& grid);

}  // namespace growthlab::tracking
