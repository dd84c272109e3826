#include "growthlab/cli/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

namespace growthlab::cli {

namespace {

std::string fmt(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << value;
  return os.str();
}

Json relation_json(const RelationCheck& check) {
  return Json{{"status", std::string(to_string(check.status))},
              {"lhs", number(check.lhs)},
              {"rhs", number(check.rhs)},
              {"slack", number(check.slack)}};
}

}  // namespace

Json number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

Json coords(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v[i]));
  return arr;
}

Json to_json(const GrowthEstimate& growth) {
  return Json{{"gamma_hat", number(growth.gamma_hat)},
              {"witness", coords(growth.witness.coords())},
              {"samples_used", growth.samples_used},
              {"direction", "upper bound on the largest valid gamma"}};
}

Json to_json(const TiltEstimate& tilt) {
  return Json{{"kappa_hat", number(tilt.kappa_hat)},
              {"worst_tilt", coords(tilt.worst_tilt.coords())},
              {"worst_minimizer", coords(tilt.worst_minimizer.coords())},
              {"tilts_used", tilt.tilts_used},
              {"direction", "lower bound on the smallest valid kappa"}};
}

Json to_json(const LojaEstimate& loja) {
  return Json{{"mu_hat", number(loja.mu_hat)},
              {"worst_tilt", coords(loja.worst_tilt.coords())},
              {"worst_minimizer", coords(loja.worst_minimizer.coords())},
              {"tilts_used", loja.tilts_used},
              {"direction", "lower bound on the smallest valid mu"}};
}

Json to_json(const EquivalenceAudit& audit) {
  return Json{{"tau", audit.tau},
              {"degenerate", audit.degenerate},
              {"kappa_le_tau_gamma_pow", relation_json(audit.kappa_from_gamma)},
              {"mu_le_tau_kappa", relation_json(audit.mu_from_kappa)},
              {"gamma_ge_p_pow_mu_inv_over_tau", relation_json(audit.gamma_from_mu)}};
}

Json to_json(const DiagnosticsReport& report) {
  return Json{{"exponents", {{"p", report.exponents.p()}, {"q", report.exponents.q()}}},
              {"region", {{"center", coords(report.region.center().coords())}, {"radius", report.region.radius()}}},
              {"growth", to_json(report.growth)},
              {"tilt", to_json(report.tilt)},
              {"loja", to_json(report.loja)},
              {"audit", to_json(report.audit)}};
}

Json to_json(const RateAudit& audit) {
  Json rows = Json::array();
  for (const RateRow& r : audit.rows) {
    rows.push_back(Json{{"k", r.k},
                        {"distance", number(r.distance)},
                        {"bound_x", number(r.bound_x)},
                        {"gap", number(r.gap)},
                        {"bound_f", number(r.bound_f)},
                        {"pass_x", r.pass_x},
                        {"pass_f", r.pass_f}});
  }
  return Json{{"passed", audit.passed}, {"rows", rows}};
}

Json to_json(const tracking::SweepReport& sweep) {
  std::size_t failed = 0;
  std::size_t unconverged = 0;
  for (const auto& s : sweep.samples) {
    failed += s.failed ? 1 : 0;
    unconverged += (!s.failed && !s.converged) ? 1 : 0;
  }
  return Json{{"kappa_hat", number(sweep.kappa_hat)},
              {"kappa_hat_label", "stationary-point sensitivity"},
              {"median_ratio", number(sweep.median_ratio)},
              {"max_spread", number(sweep.max_spread)},
              {"samples", sweep.samples.size()},
              {"failed", failed},
              {"unconverged", unconverged},
              {"skipped_zero_norm", sweep.skipped}};
}

std::string csv_preamble(const Json& config) {
  std::ostringstream os;
  for (const auto& [key, value] : config.items()) os << "# " << key << ": " << value.dump() << '\n';
  return os.str();
}

std::string diagnostics_csv(const DiagnosticsReport& report) {
  const Eigen::Index d = report.region.dim();
  std::ostringstream os;
  os << "estimator,value,samples";
  for (Eigen::Index i = 1; i <= d; ++i) os << ",witness_" << i;
  for (Eigen::Index i = 1; i <= d; ++i) os << ",tilt_" << i;
  os << '\n';
  auto row = [&](const char* name, double value, std::size_t samples, const Point& witness, const TiltForm* tilt) {
    os << name << ',' << fmt(value) << ',' << samples;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt(witness[i]);
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << (tilt ? fmt((*tilt)[i]) : std::string());
    os << '\n';
  };
  row("gamma", report.growth.gamma_hat, report.growth.samples_used, report.growth.witness, nullptr);
  row("kappa", report.tilt.kappa_hat, report.tilt.tilts_used, report.tilt.worst_minimizer, &report.tilt.worst_tilt);
  row("mu", report.loja.mu_hat, report.loja.tilts_used, report.loja.worst_minimizer, &report.loja.worst_tilt);
  return os.str();
}

std::string trajectory_csv(const ProxTrajectory& traj, const RateAudit* audit) {
  const Eigen::Index d = traj.points.front().dim();
  std::ostringstream os;
  os << 'k';
  for (Eigen::Index i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",f,bound_x,bound_f,margin_x,margin_f\n";
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt(traj.points[k][i]);
    os << ',' << fmt(traj.values[k]);
    if (audit) {
      const RateRow& r = audit->rows[k];
      os << ',' << fmt(r.bound_x) << ',' << fmt(r.bound_f) << ',' << fmt(r.margin_x) << ',' << fmt(r.margin_f);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const tracking::SweepReport& sweep) {
  std::ostringstream os;
  os << "norm_index,sample,eta_norm,ratio,objective,first_order_residual,iterations,converged,failed\n";
  for (const auto& s : sweep.samples) {
    os << s.norm_index << ',' << s.sample_index << ',' << fmt(s.eta_norm) << ',' << fmt(s.ratio) << ','
       << fmt(s.objective) << ',' << fmt(s.first_order_residual) << ',' << s.iterations << ','
       << (s.converged ? 1 : 0) << ',' << (s.failed ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string ssc_csv(const tracking::SscEstimate& ssc) {
  std::ostringstream os;
  os << "kind,first_order,second_order,z_norm,quotient\n";
  for (const auto& s : ssc.samples) {
    os << s.kind << ',' << fmt(s.first_order) << ',' << fmt(s.second_order) << ',' << fmt(s.z_norm) << ','
       << fmt(s.quotient) << '\n';
  }
  return os.str();
}

void write_field_matrix(std::ostream& out, const Eigen::VectorXd& values, int n) {
  if (values.size() != static_cast<Eigen::Index>(n) * n) usage_error("field size does not match n");
  out << std::setprecision(17);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i > 0) out << ' ';
      out << values[static_cast<Eigen::Index>(j) * n + i];
    }
    out << '\n';
  }
}

Eigen::VectorXd read_field_matrix(std::istream& in, int& n) {
  std::vector<double> data;
  std::string line;
  int rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    std::size_t count = 0;
    double v = 0.0;
    while (ls >> v) {
      data.push_back(v);
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) usage_error("ragged field matrix");
    ++rows;
  }
  if (static_cast<std::size_t>(rows) != cols) usage_error("field matrix must be square");
  n = rows;
  return Eigen::Map<Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace growthlab::cli
