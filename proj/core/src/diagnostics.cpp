#include "growthlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "growthlab/parallel.hpp"

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCenterExclusion = 1e-9;

void require_center(const Point& xbar, const BallRegion& region) {
  if (xbar.dim() != region.dim()) usage_error("x̄ and region dimensions differ");
  if (distance(xbar, region.center()) > 1e-12) usage_error("x̄ must be the center of the region");
}

double reference_value(const FunctionOracle& f, const Point& xbar) {
  const ExtendedReal fbar = f(xbar);
  if (fbar.is_infinite()) usage_error("f(x̄) must be finite");
  return fbar.value();
}

// lhs and rhs already carry the factor tau; slack strips it again.
RelationCheck relation(double lhs, double rhs, double tau) {
  RelationCheck check;
  check.lhs = lhs;
  check.rhs = rhs;
  check.status = lhs <= rhs ? RelationStatus::Pass : RelationStatus::Fail;
  check.slack = lhs > 0.0 ? rhs / lhs / tau : kInf;
  return check;
}

struct GrowthBlock {
  double ratio = kInf;
  std::size_t index = 0;
  std::size_t samples = 0;
};

}  // namespace

void TiltSampling::validate() const {
  if (tilt_norms.empty()) usage_error("at least one tilt norm is required");
  for (double n : tilt_norms) {
    if (!(n > 0.0) || !std::isfinite(n)) usage_error("tilt norms must be positive and finite");
  }
  if (directions_per_norm < 1) usage_error("directions_per_norm must be >= 1");
}

std::vector<Eigen::VectorXd> sphere_directions(Eigen::Index dim, int count, std::uint64_t seed) {
  if (count < 1) usage_error("need at least one direction");
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  if (dim == 1) {
    for (int k = 0; k < count; ++k) out.push_back(Eigen::VectorXd::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / count;
      Eigen::VectorXd u(2);
      u << std::cos(angle), std::sin(angle);
      out.push_back(u);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    while (static_cast<int>(out.size()) < count) {
      Eigen::VectorXd u(dim);
      for (Eigen::Index i = 0; i < dim; ++i) u[i] = normal(rng);
      const double n = u.norm();
      if (n > 1e-12) out.push_back(u / n);
    }
  }
  return out;
}

std::vector<TiltForm> sample_tilts(Eigen::Index dim, const TiltSampling& sampling) {
  sampling.validate();
  const auto directions = sphere_directions(dim, sampling.directions_per_norm, sampling.seed);
  std::vector<TiltForm> tilts;
  for (double norm : sampling.tilt_norms) {
    for (const auto& u : directions) tilts.emplace_back(u * norm);
  }
  return tilts;
}

std::vector<TiltedSolve> sweep_tilts(const FunctionOracle& f, const BallRegion& region,
                                     const std::vector<TiltForm>& tilts, const SolverConfig& cfg) {
  std::vector<TiltedSolve> sweep;
  sweep.reserve(tilts.size());
  for (const TiltForm& xi : tilts) {
    if (xi.norm() == 0.0) usage_error("the zero tilt is excluded from tilt sampling");
    sweep.push_back({xi, argmin_tilted(f, xi, region, cfg)});
  }
  return sweep;
}

GrowthEstimate estimate_growth(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                               const ExponentPair& pq, const SolverConfig& cfg) {
  cfg.validate();
  require_center(xbar, region);
  const double fbar = reference_value(f, xbar);
  const double gap_floor = -1e-12 * (1.0 + std::abs(fbar));
  const BallGrid grid(region, cfg.grid_points_per_axis);

  const std::size_t blocks = std::min<std::size_t>(grid.size(), worker_count() * 4);
  const std::size_t block_len = (grid.size() + blocks - 1) / blocks;
  std::vector<GrowthBlock> partial(blocks);

  parallel_for(blocks, [&](std::size_t b) {
    GrowthBlock& acc = partial[b];
    Eigen::VectorXd y;
    const std::size_t end = std::min(grid.size(), (b + 1) * block_len);
    for (std::size_t idx = b * block_len; idx < end; ++idx) {
      if (!grid.point(idx, y)) continue;
      const double r = (y - xbar.coords()).norm();
      if (r <= kCenterExclusion) continue;
      const ExtendedReal fy = f(Point(y));
      if (fy.is_infinite()) continue;
      const double gap = fy.value() - fbar;
      if (gap < gap_floor) {
        throw Error(ErrorKind::NegativeGap, "f(x) < f(x̄): x̄ is not a minimizer on the region",
                    std::vector<double>(y.data(), y.data() + y.size()));
      }
      ++acc.samples;
      const double ratio = std::max(gap, 0.0) / std::pow(r, pq.p());
      if (ratio < acc.ratio) {
        acc.ratio = ratio;
        acc.index = idx;
      }
    }
  });

  GrowthBlock best;
  std::size_t samples = 0;
  for (const GrowthBlock& acc : partial) {
    samples += acc.samples;
    if (acc.ratio < best.ratio) best = acc;
  }
  if (samples == 0) throw Error(ErrorKind::NoFiniteSamples, "no finite samples of " + f.descriptor());

  Eigen::VectorXd witness;
  grid.point(best.index, witness);
  return GrowthEstimate{best.ratio, Point(witness), samples};
}

TiltEstimate estimate_tilt_constant(const std::vector<TiltedSolve>& sweep, const Point& xbar,
                                    const ExponentPair& pq) {
  if (sweep.empty()) usage_error("tilt sweep is empty");
  TiltEstimate est;
  est.worst_tilt = sweep.front().tilt;
  est.worst_minimizer = sweep.front().result.representative();
  est.tilts_used = sweep.size();
  bool first = true;
  for (const TiltedSolve& solve : sweep) {
    const double scale = std::pow(solve.tilt.norm(), pq.holder());
    for (const Candidate& m : solve.result.minimizers) {
      const double ratio = distance(m.point, xbar) / scale;
      if (first || ratio > est.kappa_hat) {
        est.kappa_hat = ratio;
        est.worst_tilt = solve.tilt;
        est.worst_minimizer = m.point;
        first = false;
      }
    }
  }
  return est;
}

TiltEstimate estimate_tilt_constant(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                                    const ExponentPair& pq, const TiltSampling& sampling,
                                    const SolverConfig& cfg) {
  require_center(xbar, region);
  reference_value(f, xbar);
  return estimate_tilt_constant(sweep_tilts(f, region, sample_tilts(region.dim(), sampling), cfg), xbar, pq);
}

LojaEstimate estimate_loja_constant(const std::vector<TiltedSolve>& sweep, const FunctionOracle& f,
                                    const Point& xbar, const ExponentPair& pq) {
  if (sweep.empty()) usage_error("tilt sweep is empty");
  const double fbar = reference_value(f, xbar);
  LojaEstimate est;
  est.worst_tilt = sweep.front().tilt;
  est.worst_minimizer = sweep.front().result.representative();
  est.tilts_used = sweep.size();
  for (const TiltedSolve& solve : sweep) {
    const double scale = std::pow(solve.tilt.norm(), pq.q());
    for (const Candidate& m : solve.result.minimizers) {
      const double ratio = (f(m.point).value() - fbar) / scale;
      if (ratio > est.mu_hat) {
        est.mu_hat = ratio;
        est.worst_tilt = solve.tilt;
        est.worst_minimizer = m.point;
      }
    }
  }
  return est;
}

LojaEstimate estimate_loja_constant(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                                    const ExponentPair& pq, const TiltSampling& sampling,
                                    const SolverConfig& cfg) {
  require_center(xbar, region);
  return estimate_loja_constant(sweep_tilts(f, region, sample_tilts(region.dim(), sampling), cfg), f, xbar,
                                pq);
}

std::string_view to_string(RelationStatus status) {
  switch (status) {
    case RelationStatus::Pass: return "pass";
    case RelationStatus::Fail: return "fail";
    case RelationStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

bool EquivalenceAudit::all_pass() const {
  return kappa_from_gamma.status == RelationStatus::Pass && mu_from_kappa.status == RelationStatus::Pass &&
         gamma_from_mu.status == RelationStatus::Pass;
}

bool EquivalenceAudit::any_fail() const {
  return kappa_from_gamma.status == RelationStatus::Fail || mu_from_kappa.status == RelationStatus::Fail ||
         gamma_from_mu.status == RelationStatus::Fail;
}

EquivalenceAudit check_equivalence(const GrowthEstimate& growth, const TiltEstimate& tilt,
                                   const LojaEstimate& loja, const ExponentPair& pq, double tau) {
  if (!(tau >= 1.0) || !std::isfinite(tau)) usage_error("audit slack tau must be >= 1");
  EquivalenceAudit audit;
  audit.tau = tau;
  const double gamma = growth.gamma_hat;
  const double kappa = tilt.kappa_hat;
  const double mu = loja.mu_hat;
  audit.degenerate = gamma <= 0.0 || mu <= 0.0;

  if (gamma > 0.0) {
    audit.kappa_from_gamma = relation(kappa, tau * std::pow(gamma, -pq.holder()), tau);
    audit.mu_from_kappa = relation(mu, tau * kappa, tau);
  }
  if (gamma > 0.0 && mu > 0.0) {
    audit.gamma_from_mu = relation(std::pow(pq.p(), -pq.q()) / mu / tau, gamma, tau);
  }
  return audit;
}

DiagnosticsReport diagnose(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                           const ExponentPair& pq, const TiltSampling& sampling, const SolverConfig& cfg,
                           double tau) {
  DiagnosticsReport report{.exponents = pq, .region = region};
  report.growth = estimate_growth(f, xbar, region, pq, cfg);
  const auto sweep = sweep_tilts(f, region, sample_tilts(region.dim(), sampling), cfg);
  report.tilt = estimate_tilt_constant(sweep, xbar, pq);
  report.loja = estimate_loja_constant(sweep, f, xbar, pq);
  report.audit = check_equivalence(report.growth, report.tilt, report.loja, pq, tau);
  return report;
}

std::vector<double> default_probe_radii() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

SlopeEstimate metric_slope(const FunctionOracle& phi, const Point& x, const std::vector<double>& probe_radii,
                           int directions, std::uint64_t seed) {
  if (probe_radii.empty()) usage_error("need at least one probe radius");
  for (std::size_t i = 0; i < probe_radii.size(); ++i) {
    if (!(probe_radii[i] > 0.0)) usage_error("probe radii must be positive");
    if (i > 0 && !(probe_radii[i] < probe_radii[i - 1])) usage_error("probe radii must be decreasing");
  }
  SlopeEstimate est;
  const ExtendedReal phi_x = phi(x);
  if (phi_x.is_infinite()) {
    est.slope = kInf;
    est.per_radius.assign(probe_radii.size(), kInf);
    return est;
  }
  const auto dirs = sphere_directions(x.dim(), directions, seed);
  for (double r : probe_radii) {
    double shell = 0.0;
    for (const auto& u : dirs) {
      const Point y(x.coords() + r * u);
      const ExtendedReal phi_y = phi(y);
      if (phi_y.is_infinite()) continue;
      shell = std::max(shell, std::max(0.0, phi_x.value() - phi_y.value()) / distance(x, y));
    }
    est.per_radius.push_back(shell);
  }
  est.slope = est.per_radius.back();
  return est;
}

namespace {

ProbeResult distance_probe(TiltedSolveResult solve, const Point& xbar, double size, double lambda, double kappa) {
  if (!(lambda > 0.0)) usage_error("lambda must be positive");
  if (!(kappa > 0.0)) usage_error("kappa must be positive");
  ProbeResult probe;
  probe.perturbation_size = size;
  probe.bound = kappa * std::pow(size, lambda);
  probe.witness = solve.representative();
  probe.worst_distance = -1.0;
  for (const Candidate& m : solve.minimizers) {
    const double d = distance(m.point, xbar);
    if (d > probe.worst_distance) {
      probe.worst_distance = d;
      probe.witness = m.point;
    }
  }
  probe.passed = probe.worst_distance <= probe.bound + 1e-12;
  probe.solve = std::move(solve);
  return probe;
}

}  // namespace

ProbeResult lipschitz_probe(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                            const FunctionOracle& zeta, double lipschitz_constant, double lambda, double kappa,
                            const SolverConfig& cfg) {
  require_center(xbar, region);
  if (!(lipschitz_constant >= 0.0)) usage_error("Lipschitz constant must be non-negative");
  return distance_probe(argmin_perturbed(f, zeta, region, cfg), xbar, lipschitz_constant, lambda, kappa);
}

ProbeResult convex_probe(const FunctionOracle& f, const Point& xbar, const BallRegion& region,
                         const FunctionOracle& phi, double lambda, double kappa, const SolverConfig& cfg) {
  require_center(xbar, region);
  const int directions = xbar.dim() == 1 ? 2 : 64;
  const SlopeEstimate slope = metric_slope(phi, xbar, default_probe_radii(), directions);
  if (slope.slope == kInf) throw Error(ErrorKind::SlopeInfinite, "x̄ lies outside dom φ");
  return distance_probe(argmin_perturbed(f, phi, region, cfg), xbar, slope.slope, lambda, kappa);
}

std::vector<SubgradientPair> sample_subdifferential_graph(const FunctionOracle& f, const BallRegion& domain_region,
                                                          const std::vector<TiltForm>& tilt_grid,
                                                          const SolverConfig& cfg) {
  std::vector<SubgradientPair> pairs;
  for (const TiltForm& xi : tilt_grid) {
    const TiltedSolveResult solve = argmin_tilted(f, xi, domain_region, cfg);
    for (const Candidate& m : solve.minimizers) pairs.push_back({m.point, xi});
  }
  return pairs;
}

namespace {

struct PointGroup {
  Point x;
  double residual;  // smallest ‖ξ‖ paired with x
};

std::vector<PointGroup> group_pairs(const std::vector<SubgradientPair>& pairs) {
  std::vector<PointGroup> groups;
  for (const SubgradientPair& pair : pairs) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const PointGroup& g) {
      return distance(g.x, pair.x) <= kPointMergeTolerance;
    });
    if (it == groups.end()) {
      groups.push_back({pair.x, pair.xi.norm()});
    } else {
      it->residual = std::min(it->residual, pair.xi.norm());
    }
  }
  return groups;
}

template <class Lhs, class Rhs>
InequalityCheck check_pointwise(const std::vector<SubgradientPair>& pairs, const Point& xbar, Lhs lhs_of,
                                Rhs rhs_of) {
  InequalityCheck check;
  for (const PointGroup& g : group_pairs(pairs)) {
    if (distance(g.x, xbar) <= kPointMergeTolerance) continue;
    ++check.points_checked;
    const double lhs = lhs_of(g);
    const double rhs = rhs_of(g);
    const bool ok = lhs <= rhs + 1e-12;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? kInf : 0.0);
    if (!ok) check.passed = false;
    if (!check.witness || ratio > check.worst_ratio) {
      check.worst_ratio = ratio;
      check.witness = g.x;
      check.witness_residual = g.residual;
    }
  }
  check.vacuous = check.points_checked == 0;
  return check;
}

}  // namespace

InequalityCheck check_subregularity(const std::vector<SubgradientPair>& pairs, const Point& xbar,
                                    const ExponentPair& pq, double kappa) {
  return check_pointwise(
      pairs, xbar, [&](const PointGroup& g) { return distance(g.x, xbar); },
      [&](const PointGroup& g) { return kappa * std::pow(g.residual, pq.holder()); });
}

InequalityCheck check_global_loja(const std::vector<SubgradientPair>& pairs, const FunctionOracle& f,
                                  const Point& xbar, const ExponentPair& pq, double mu) {
  const double fbar = reference_value(f, xbar);
  return check_pointwise(
      pairs, xbar, [&](const PointGroup& g) { return f(g.x).value() - fbar; },
      [&](const PointGroup& g) { return mu * std::pow(g.residual, pq.q()); });
}

}  // namespace growthlab
