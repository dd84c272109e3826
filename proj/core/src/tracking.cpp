#include "growthlab/tracking.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "growthlab/parallel.hpp"

namespace growthlab::tracking {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

std::shared_ptr<const SparseMatrix> build_laplacian(int n, double h) {
  const Eigen::Index size = static_cast<Eigen::Index>(n) * n;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(5 * size));
  const double inv_h2 = 1.0 / (h * h);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(j) * n + i;
      entries.emplace_back(row, row, 4.0 * inv_h2);
      if (i > 0) entries.emplace_back(row, row - 1, -inv_h2);
      if (i + 1 < n) entries.emplace_back(row, row + 1, -inv_h2);
      if (j > 0) entries.emplace_back(row, row - n, -inv_h2);
      if (j + 1 < n) entries.emplace_back(row, row + n, -inv_h2);
    }
  }
  auto matrix = std::make_shared<SparseMatrix>(size, size);
  matrix->setFromTriplets(entries.begin(), entries.end());
  matrix->makeCompressed();
  return matrix;
}

SparseMatrix shifted_operator(const Grid2D& grid, const Eigen::VectorXd& y) {
  SparseMatrix a = grid.laplacian();
  for (Eigen::Index k = 0; k < a.rows(); ++k) a.coeffRef(k, k) += 3.0 * y[k] * y[k];
  return a;
}

Eigen::VectorXd state_residual(const Grid2D& grid, const Eigen::VectorXd& y, const Eigen::VectorXd& u) {
  return grid.laplacian() * y + y.array().cube().matrix() - u;
}

// Every operator here is the Laplacian plus a diagonal, so the fill-reducing ordering
// and symbolic analysis depend only on the matrix size. Each thread keeps its own.
Eigen::SimplicialLDLT<SparseMatrix>& factorized(const SparseMatrix& a) {
  thread_local Eigen::SimplicialLDLT<SparseMatrix> solver;
  thread_local Eigen::Index analyzed_size = -1;
  if (analyzed_size != a.rows()) {
    solver.analyzePattern(a);
    analyzed_size = a.rows();
  }
  solver.factorize(a);
  return solver;
}

Eigen::VectorXd spd_solve(const SparseMatrix& a, const Eigen::VectorXd& rhs, const char* what) {
  Eigen::SimplicialLDLT<SparseMatrix>& solver = factorized(a);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::LinearSolverBreakdown, std::string("factorization failed in ") + what);
  }
  Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !x.allFinite()) {
    throw Error(ErrorKind::LinearSolverBreakdown, std::string("solve failed in ") + what);
  }
  return x;
}

void require_grid(int n, const Grid2D& grid, const char* what) {
  if (n != grid.n()) usage_error(std::string(what) + " does not match the grid size");
}

// State and adjoint at one control.
struct Evaluation {
  Eigen::VectorXd u;
  Eigen::VectorXd y;
  Eigen::VectorXd p;
  double value = 0.0;
};

StateSolve newton_from(const Eigen::VectorXd& u, const Grid2D& grid, const NewtonOptions& opts, Eigen::VectorXd y);

// Newton starts from `y0` when given (a nearby state inside the optimizer), else from 0.
Evaluation evaluate(const Eigen::VectorXd& u, const Field2D& y_d, const Grid2D& grid, const NewtonOptions& newton,
                    bool with_adjoint, const Eigen::VectorXd* y0 = nullptr) {
  Evaluation e;
  e.u = u;
  e.y = newton_from(u, grid, newton, y0 ? *y0 : Eigen::VectorXd::Zero(grid.size())).state.values();
  const Eigen::VectorXd misfit = e.y - y_d.values();
  e.value = 0.5 * grid.inner(misfit, misfit);
  if (with_adjoint) {
    e.p = solve_adjoint(Field2D(grid, e.y), y_d, grid).values();
  }
  return e;
}

double projected_gradient_norm(const ControlField2D& box, const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                               const Grid2D& grid) {
  return grid.l2_norm(u - box.clip(u - p));
}

}  // namespace

Grid2D::Grid2D(int n) : n_(n), h_(0.0) {
  if (n < 4) usage_error("grid needs n >= 4 interior nodes per axis, got " + std::to_string(n));
  h_ = 1.0 / (n + 1);
  laplacian_ = build_laplacian(n, h_);
}

Field2D::Field2D(const Grid2D& grid, Eigen::VectorXd values) : n_(grid.n()), values_(std::move(values)) {
  if (values_.size() != grid.size()) usage_error("field size does not match the grid");
  if (!values_.allFinite()) usage_error("field entries must be finite");
}

ControlField2D::ControlField2D(const Grid2D& grid, Eigen::VectorXd values, double alpha, double beta)
    : n_(grid.n()), values_(std::move(values)), alpha_(alpha), beta_(beta) {
  if (!(alpha < beta)) usage_error("control bounds need alpha < beta");
  if (values_.size() != grid.size()) usage_error("control size does not match the grid");
  if (!values_.allFinite()) usage_error("control entries must be finite");
}

bool ControlField2D::feasible() const {
  return (values_.array() >= alpha_).all() && (values_.array() <= beta_).all();
}

Eigen::VectorXd ControlField2D::clip(const Eigen::VectorXd& raw) const {
  return raw.cwiseMax(alpha_).cwiseMin(beta_);
}

namespace {

StateSolve newton_from(const Eigen::VectorXd& u, const Grid2D& grid, const NewtonOptions& opts, Eigen::VectorXd y) {
  StateSolve out;
  Eigen::VectorXd r = state_residual(grid, y, u);
  double res = grid.l2_norm(r);
  out.residual_history.push_back(res);

  auto newton_step = [&](bool allow_stall) {
    const Eigen::VectorXd dy = spd_solve(shifted_operator(grid, y), -r, "Newton step");
    double t = 1.0;
    Eigen::VectorXd trial = y + dy;
    Eigen::VectorXd trial_r = state_residual(grid, trial, u);
    double trial_res = grid.l2_norm(trial_r);
    for (int halving = 0; halving < opts.max_halvings && !(trial_res < res); ++halving) {
      t *= 0.5;
      trial = y + t * dy;
      trial_r = state_residual(grid, trial, u);
      trial_res = grid.l2_norm(trial_r);
    }
    if (!(trial_res < res)) {
      if (allow_stall) return false;
      throw Error(ErrorKind::NewtonDivergence, "damped Newton step failed to reduce the residual",
                  out.residual_history);
    }
    y = std::move(trial);
    r = std::move(trial_r);
    res = trial_res;
    out.residual_history.push_back(res);
    return true;
  };

  for (int it = 0; it < opts.max_iterations && res > opts.tolerance; ++it) newton_step(false);
  if (res > opts.tolerance) {
    throw Error(ErrorKind::NewtonDivergence,
                "no convergence after " + std::to_string(opts.max_iterations) + " Newton iterations",
                out.residual_history);
  }
  // One refinement step once inside the tolerance; kept only if it lowers the residual.
  if (res > 0.0) newton_step(true);

  out.state = Field2D(grid, std::move(y));
  out.residual = res;
  return out;
}

}  // namespace

StateSolve solve_state_detailed(const Eigen::VectorXd& u, const Grid2D& grid, const NewtonOptions& opts) {
  if (u.size() != grid.size()) usage_error("control size does not match the grid");
  if (!u.allFinite()) usage_error("control entries must be finite");
  return newton_from(u, grid, opts, Eigen::VectorXd::Zero(grid.size()));
}

Field2D solve_state(const ControlField2D& u, const Grid2D& grid, const NewtonOptions& opts) {
  require_grid(u.n(), grid, "control");
  return solve_state_detailed(u.values(), grid, opts).state;
}

double linear_residual(const Field2D& y, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs, const Grid2D& grid) {
  return grid.l2_norm(shifted_operator(grid, y.values()) * x - rhs);
}

namespace {

Field2D linear_solve_checked(const Field2D& y, const Eigen::VectorXd& rhs, const Grid2D& grid, const char* what) {
  const SparseMatrix a = shifted_operator(grid, y.values());
  Eigen::VectorXd x = spd_solve(a, rhs, what);
  const double residual = grid.l2_norm(a * x - rhs);
  if (residual > 1e-12 * std::max(1.0, grid.l2_norm(rhs))) {
    throw Error(ErrorKind::LinearSolverBreakdown,
                std::string(what) + " residual " + std::to_string(residual) + " above tolerance");
  }
  return Field2D(grid, std::move(x));
}

}  // namespace

Field2D solve_adjoint(const Field2D& y, const Field2D& y_d, const Grid2D& grid) {
  require_grid(y.n(), grid, "state");
  require_grid(y_d.n(), grid, "target");
  return linear_solve_checked(y, y.values() - y_d.values(), grid, "adjoint solve");
}

Field2D solve_linearized(const Eigen::VectorXd& v, const Field2D& y_base, const Grid2D& grid) {
  require_grid(y_base.n(), grid, "base state");
  if (v.size() != grid.size()) usage_error("direction size does not match the grid");
  return linear_solve_checked(y_base, v, grid, "linearized solve");
}

double objective(const Eigen::VectorXd& u, const Field2D& y_d, const Grid2D& grid) {
  require_grid(y_d.n(), grid, "target");
  return evaluate(u, y_d, grid, NewtonOptions{}, false).value;
}

double objective(const ControlField2D& u, const Field2D& y_d, const Grid2D& grid) {
  require_grid(u.n(), grid, "control");
  return objective(u.values(), y_d, grid);
}

double second_order_form(const ControlField2D& ubar, const Eigen::VectorXd& v, const Field2D& y_d,
                         const Grid2D& grid) {
  require_grid(ubar.n(), grid, "control");
  const Field2D y = solve_state(ubar, grid);
  const Field2D p = solve_adjoint(y, y_d, grid);
  const Field2D z = solve_linearized(v, y, grid);
  const Eigen::VectorXd weight = 1.0 - 6.0 * (y.values().array() * p.values().array());
  return grid.inner(weight, z.values().array().square().matrix());
}

TrackingResult solve_tracking(const Field2D& y_d, const Grid2D& grid, double alpha, double beta,
                              const TrackingOptions& opts) {
  require_grid(y_d.n(), grid, "target");
  if (!(alpha < beta)) usage_error("control bounds need alpha < beta");
  if (!(opts.tolerance > 0.0)) usage_error("tracking tolerance must be positive");
  if (opts.max_iterations < 0) usage_error("max_iterations must be >= 0");

  const ControlField2D box = ControlField2D::constant(grid, alpha, alpha, beta);
  Eigen::VectorXd u0 = opts.warm_start ? box.clip(*opts.warm_start) : Eigen::VectorXd::Constant(grid.size(), alpha);
  if (u0.size() != grid.size()) usage_error("warm start size does not match the grid");

  Evaluation cur = evaluate(u0, y_d, grid, opts.newton, true);
  double residual = projected_gradient_norm(box, cur.u, cur.p, grid);
  double step = opts.initial_step;
  int iterations = 0;
  bool stalled = false;

  while (residual > opts.tolerance && iterations < opts.max_iterations) {
    bool accepted = false;
    Evaluation next;
    double s = step;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      const Eigen::VectorXd trial = box.clip(cur.u - s * cur.p);
      const double decrease = grid.inner(cur.p, trial - cur.u);
      next = evaluate(trial, y_d, grid, opts.newton, false, &cur.y);
      if (next.value <= cur.value + opts.armijo * decrease) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    next.p = solve_adjoint(Field2D(grid, next.y), y_d, grid).values();
    ++iterations;

    // Barzilai-Borwein trial step for the next iteration.
    const Eigen::VectorXd du = next.u - cur.u;
    const Eigen::VectorXd dp = next.p - cur.p;
    const double curvature = du.dot(dp);
    step = curvature > 0.0 ? std::clamp(du.squaredNorm() / curvature, 1e-6, 1e8) : opts.initial_step;

    cur = std::move(next);
    residual = projected_gradient_norm(box, cur.u, cur.p, grid);
  }

  TrackingResult result;
  result.control = ControlField2D(grid, cur.u, alpha, beta);
  result.state = Field2D(grid, cur.y);
  result.adjoint = Field2D(grid, cur.p);
  result.objective = cur.value;
  result.first_order_residual = residual;
  result.iterations = iterations;
  result.converged = !stalled && residual <= opts.tolerance;
  return result;
}

namespace {

struct Direction {
  std::string kind;
  Eigen::VectorXd v;
};

std::vector<Direction> feasible_directions(const TrackingResult& ubar, int sample_count, std::uint64_t seed) {
  const ControlField2D& u = ubar.control;
  const Eigen::VectorXd& p = ubar.adjoint.values();
  std::vector<Direction> dirs;
  dirs.push_back({"lower", Eigen::VectorXd::Constant(u.values().size(), u.alpha()) - u.values()});
  dirs.push_back({"upper", Eigen::VectorXd::Constant(u.values().size(), u.beta()) - u.values()});
  Eigen::VectorXd switching(u.values().size());
  for (Eigen::Index k = 0; k < switching.size(); ++k) switching[k] = p[k] > 0.0 ? u.alpha() : u.beta();
  dirs.push_back({"switching", switching - u.values()});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(u.alpha(), u.beta());
  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd target(u.values().size());
    for (Eigen::Index k = 0; k < target.size(); ++k) target[k] = uniform(rng);
    dirs.push_back({"random", target - u.values()});
  }
  return dirs;
}

}  // namespace

SscEstimate ssc_estimate(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid, double delta,
                         int sample_count, std::uint64_t seed) {
  if (!(delta > 0.0)) usage_error("ssc delta must be positive");
  if (sample_count < 0) usage_error("sample_count must be >= 0");
  require_grid(y_d.n(), grid, "target");
  const Eigen::VectorXd weight =
      1.0 - 6.0 * (ubar.state.values().array() * ubar.adjoint.values().array());

  SscEstimate est;
  bool first = true;
  for (Direction& dir : feasible_directions(ubar, sample_count, seed)) {
    if (dir.v.squaredNorm() == 0.0) continue;
    Eigen::VectorXd z = solve_linearized(dir.v, ubar.state, grid).values();
    double z_norm = grid.l2_norm(z);
    if (z_norm == 0.0) continue;
    if (z_norm > delta) {
      const double scale = delta / z_norm;
      dir.v *= scale;
      z *= scale;
      z_norm = grid.l2_norm(z);
    }
    SscSample s;
    s.kind = dir.kind;
    s.first_order = grid.inner(ubar.adjoint.values(), dir.v);
    s.second_order = grid.inner(weight, z.array().square().matrix());
    s.z_norm = z_norm;
    s.quotient = (s.first_order + 0.5 * s.second_order) / (z_norm * z_norm);
    if (first || s.quotient < est.c_hat) {
      est.c_hat = s.quotient;
      first = false;
    }
    est.samples.push_back(std::move(s));
  }
  if (est.samples.empty()) throw Error(ErrorKind::NoSamplesInShell, "no admissible direction in the shell");
  return est;
}

double growth_cross_check(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid, double delta,
                          int sample_count, std::uint64_t seed) {
  if (!(delta > 0.0)) usage_error("delta must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (const Direction& dir : feasible_directions(ubar, sample_count, seed)) {
    if (dir.v.squaredNorm() == 0.0) continue;
    const double z_norm = grid.l2_norm(solve_linearized(dir.v, ubar.state, grid).values());
    if (z_norm == 0.0) continue;
    double a = std::min(1.0, delta / z_norm);
    for (int halving = 0; halving < 60; ++halving, a *= 0.5) {
      const Eigen::VectorXd u = ubar.control.clip(ubar.control.values() + a * dir.v);
      const Evaluation e = evaluate(u, y_d, grid, NewtonOptions{}, false);
      const double dy = grid.l2_norm(e.y - ubar.state.values());
      if (dy > delta) continue;
      if (dy > 0.0) best = std::min(best, (e.value - ubar.objective) / (dy * dy));
      break;
    }
  }
  if (best == std::numeric_limits<double>::infinity()) {
    throw Error(ErrorKind::NoSamplesInShell, "no admissible control in the shell");
  }
  return best;
}

Field2D smooth_perturbation(const Grid2D& grid, double l2_norm, std::uint64_t seed, std::uint64_t stream) {
  if (!(l2_norm >= 0.0)) usage_error("perturbation norm must be non-negative");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  double coeff[4][4];
  for (auto& row : coeff) {
    for (double& c : row) c = normal(rng);
  }
  Eigen::VectorXd eta = grid.sample([&](double x1, double x2) {
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      for (int l = 0; l < 4; ++l) {
        total += coeff[k][l] * std::sin((k + 1) * std::numbers::pi * x1) * std::sin((l + 1) * std::numbers::pi * x2);
      }
    }
    return total;
  });
  const double norm = grid.l2_norm(eta);
  if (norm > 0.0) eta *= l2_norm / norm;
  return Field2D(grid, std::move(eta));
}

SweepReport perturbation_sweep(const TrackingResult& ubar, const Field2D& y_d, const Grid2D& grid,
                               const std::vector<double>& eta_norms, int etas_per_norm,
                               const TrackingOptions& opts, std::uint64_t seed) {
  if (etas_per_norm < 1) usage_error("etas_per_norm must be >= 1");
  require_grid(y_d.n(), grid, "target");

  SweepReport report;
  std::vector<SweepSample> samples;
  for (std::size_t ni = 0; ni < eta_norms.size(); ++ni) {
    if (!(eta_norms[ni] >= 0.0)) usage_error("perturbation norms must be non-negative");
    if (eta_norms[ni] == 0.0) {
      ++report.skipped;
      continue;
    }
    for (int s = 0; s < etas_per_norm; ++s) {
      SweepSample sample;
      sample.norm_index = ni;
      sample.sample_index = static_cast<std::size_t>(s);
      sample.eta_norm = eta_norms[ni];
      samples.push_back(sample);
    }
  }

  parallel_for(samples.size(), [&](std::size_t i) {
    SweepSample& sample = samples[i];
    try {
      const Field2D eta = smooth_perturbation(grid, sample.eta_norm, seed,
                                              sample.norm_index * 1000003u + sample.sample_index);
      const Field2D target(grid, y_d.values() + eta.values());
      TrackingOptions local = opts;
      local.warm_start = ubar.control.values();
      const TrackingResult solved = solve_tracking(target, grid, ubar.control.alpha(), ubar.control.beta(), local);
      sample.ratio = grid.l2_norm(solved.state.values() - ubar.state.values()) / grid.l2_norm(eta.values());
      sample.objective = solved.objective;
      sample.first_order_residual = solved.first_order_residual;
      sample.iterations = solved.iterations;
      sample.converged = solved.converged;
    } catch (const std::exception& e) {
      sample.failed = true;
      sample.message = e.what();
    }
  });

  std::vector<double> ratios;
  for (const SweepSample& s : samples) {
    if (!s.failed) ratios.push_back(s.ratio);
  }
  if (!ratios.empty()) {
    report.kappa_hat = *std::max_element(ratios.begin(), ratios.end());
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    report.median_ratio = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    for (double r : ratios) {
      const double spread = (r > 0.0 && report.median_ratio > 0.0)
                                ? std::max(r / report.median_ratio, report.median_ratio / r)
                                : std::numeric_limits<double>::infinity();
      report.max_spread = std::max(report.max_spread, spread);
    }
  }
  report.samples = std::move(samples);
  return report;
}

Field2D default_target(const Grid2D& grid) {
  return Field2D(grid, grid.sample([](double x1, double x2) {
    return std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
  }));
}

}  // namespace growthlab::tracking
