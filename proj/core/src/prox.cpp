#include "growthlab/prox.hpp"

#include <cmath>
#include <string>

namespace growthlab {

void ProxConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) usage_error("epsilon must be positive and finite");
  if (iterations < 1) usage_error("iterations must be >= 1");
  solver.validate();
}

TiltedSolveResult prox_step(const FunctionOracle& f, const Point& anchor, const ProxConfig& cfg) {
  cfg.validate();
  if (!cfg.region.contains(anchor)) usage_error("prox anchor lies outside the region");
  const double weight = cfg.epsilon / cfg.exponents.p();
  const double p = cfg.exponents.p();
  const FunctionOracle proximal_term("prox", f.dim(), [anchor, weight, p](const Point& y) {
    return ExtendedReal(weight * std::pow(distance(y, anchor), p));
  });
  return argmin_perturbed(f, proximal_term, cfg.region, cfg.solver);
}

ProxTrajectory run_prox(const FunctionOracle& f, const Point& x0, const ProxConfig& cfg) {
  cfg.validate();
  if (!cfg.region.contains(x0)) usage_error("x0 lies outside the region");
  const ExtendedReal f0 = f(x0);
  if (f0.is_infinite()) usage_error("f(x0) must be finite");

  ProxTrajectory traj;
  traj.points.push_back(x0);
  traj.values.push_back(f0.value());
  for (int k = 0; k < cfg.iterations; ++k) {
    const TiltedSolveResult solve = prox_step(f, traj.points.back(), cfg);
    const Point& next = solve.representative();
    traj.steps.push_back({solve.min_value, solve.minimizers.size(), solve.evaluations});
    traj.values.push_back(f(next).value());
    traj.points.push_back(next);
  }
  return traj;
}

RateAudit audit_rates(const ProxTrajectory& traj, double gamma_ref, const Point& xbar, double fbar,
                      const ExponentPair& pq, double epsilon) {
  if (!(gamma_ref > 0.0)) usage_error("gamma_ref must be positive");
  if (!(epsilon > 0.0) || !(epsilon < gamma_ref)) {
    throw Error(ErrorKind::EpsilonNotBelowGamma,
                "rate bounds need 0 < epsilon < gamma (epsilon=" + std::to_string(epsilon) +
                    ", gamma=" + std::to_string(gamma_ref) + ")");
  }
  if (traj.points.empty()) usage_error("empty trajectory");

  const double contraction = epsilon / gamma_ref;
  const double d0 = distance(traj.points.front(), xbar);
  const double gap0 = traj.values.front() - fbar;

  RateAudit audit;
  audit.passed = true;
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    RateRow row;
    row.k = static_cast<int>(k);
    row.distance = distance(traj.points[k], xbar);
    row.gap = traj.values[k] - fbar;
    row.bound_x = std::pow(contraction, static_cast<double>(k) * pq.holder()) * d0;
    row.bound_f = std::pow(contraction, static_cast<double>(k) * pq.q()) * gap0;
    row.margin_x = row.bound_x - row.distance;
    row.margin_f = row.bound_f - row.gap;
    row.pass_x = row.distance <= row.bound_x + 1e-8 + 1e-6 * row.bound_x;
    row.pass_f = row.gap <= row.bound_f + 1e-8 + 1e-6 * std::abs(row.bound_f);
    audit.passed = audit.passed && row.pass_x && row.pass_f;
    audit.rows.push_back(row);
  }
  return audit;
}

}  // namespace growthlab
