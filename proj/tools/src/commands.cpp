#include "growthlab/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "growthlab/cli/catalog.hpp"
#include "growthlab/cli/serialize.hpp"
#include "growthlab/diagnostics.hpp"
#include "growthlab/minimize.hpp"
#include "growthlab/prox.hpp"
#include "growthlab/tracking.hpp"

namespace growthlab::cli {

namespace fs = std::filesystem;

namespace {

struct OutputFile {
  std::string name;
  std::string contents;
};

void write_outputs(const std::string& dir, const std::vector<OutputFile>& files) {
  fs::create_directories(dir);
  for (const OutputFile& file : files) {
    std::ofstream os(fs::path(dir) / file.name, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Usage, "cannot write " + (fs::path(dir) / file.name).string());
    os << file.contents;
  }
}

SolverConfig solver_config(const RunConfig& config, Eigen::Index dim) {
  SolverConfig cfg = SolverConfig::defaults_for_dimension(dim);
  if (config.grid > 0) cfg.grid_points_per_axis = config.grid;
  cfg.multistart_count = config.multistart;
  cfg.polish_max_iters = config.polish_iters;
  cfg.polish_step_tolerance = config.polish_tol;
  cfg.minimizer_value_tolerance = config.value_tol;
  cfg.validate();
  return cfg;
}

int default_directions(Eigen::Index dim) { return dim == 1 ? 2 : (dim == 2 ? 16 : 32); }

Json function_json(const FunctionOracle& f) {
  Json known = Json::object();
  if (const auto& k = f.known_constants()) {
    if (k->gamma) known["gamma"] = number(*k->gamma);
    if (k->kappa) known["kappa"] = number(*k->kappa);
    if (k->mu) known["mu"] = number(*k->mu);
  }
  return Json{{"descriptor", f.descriptor()}, {"dim", f.dim()}, {"known_constants", known}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct OracleSetup {
  FunctionOracle oracle;
  double delta;
};

OracleSetup build_oracle(const RunConfig& config) {
  const CatalogEntry& entry = find_entry(config.fn);
  FunctionOracle oracle = make_oracle(entry, CatalogParams{config.p, config.dim});
  const double delta = config.delta.value_or(entry.default_delta);
  return {std::move(oracle), delta};
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
  Json doc;
  doc["subcommand"] = c.subcommand;
  doc["seed"] = c.seed;
  doc["fn"] = c.fn;
  doc["p"] = c.p;
  doc["dim"] = c.dim;
  doc["delta"] = c.delta ? Json(*c.delta) : Json("catalog default");
  doc["grid"] = c.grid;
  doc["multistart"] = c.multistart;
  doc["polish_iters"] = c.polish_iters;
  doc["polish_tol"] = c.polish_tol;
  doc["value_tol"] = c.value_tol;
  doc["tilt_norms"] = c.tilt_norms;
  doc["directions"] = c.directions;
  doc["tau"] = c.tau;
  doc["epsilon"] = c.epsilon;
  doc["iterations"] = c.iterations;
  doc["x0"] = c.x0;
  doc["gamma_ref"] = c.gamma_ref ? Json(*c.gamma_ref) : Json("catalog gamma");
  doc["n"] = c.n;
  doc["alpha"] = c.alpha;
  doc["beta"] = c.beta;
  doc["target"] = c.target;
  doc["target_value"] = c.target_value;
  doc["opt_tol"] = c.opt_tol;
  doc["max_iter"] = c.max_iter;
  doc["eta_norms"] = c.eta_norms;
  doc["etas_per_norm"] = c.etas_per_norm;
  doc["ssc_delta"] = c.ssc_delta;
  doc["ssc_samples"] = c.ssc_samples;
  doc["spread_limit"] = c.spread_limit;
  return doc;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  DiagnosticsReport report;
  Json function;
  try {
    const OracleSetup setup = build_oracle(config);
    const FunctionOracle& f = setup.oracle;
    const ExponentPair pq(config.p);
    const Point xbar = f.known_minimizer().value_or(Point::zero(f.dim()));
    const BallRegion region(xbar, setup.delta);
    TiltSampling sampling;
    sampling.tilt_norms = config.tilt_norms;
    sampling.directions_per_norm = config.directions > 0 ? config.directions : default_directions(f.dim());
    sampling.seed = config.seed;
    report = diagnose(f, xbar, region, pq, sampling, solver_config(config, f.dim()), config.tau);
    function = function_json(f);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  const EquivalenceAudit& audit = report.audit;
  const std::string status = audit.any_fail() ? "fail" : (audit.degenerate ? "degenerate" : "pass");
  Json doc;
  doc["command"] = "diagnose";
  doc["config"] = to_json(config);
  doc["function"] = function;
  doc["report"] = to_json(report);
  doc["status"] = status;

  try {
    write_outputs(config.output_dir, {{"diagnose_report.json", dump(doc)},
                                      {"diagnose_report.csv", csv_preamble(to_json(config)) + diagnostics_csv(report)}});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  out << std::setprecision(6);
  out << "gamma_hat = " << report.growth.gamma_hat << "\n";
  out << "kappa_hat = " << report.tilt.kappa_hat << "\n";
  out << "mu_hat    = " << report.loja.mu_hat << "\n";
  out << "audit (tau = " << audit.tau << "): (a) " << to_string(audit.kappa_from_gamma.status) << ", (b) "
      << to_string(audit.mu_from_kappa.status) << ", (c) " << to_string(audit.gamma_from_mu.status) << "\n";
  err << "diagnose finished in " << elapsed_seconds(start) << " s\n";
  if (audit.degenerate) {
    err << "warning: DegenerateEstimate: gamma_hat or mu_hat is zero; affected relations are not evaluated\n";
  }
  return audit.any_fail() ? kExitAuditFailure : kExitOk;
}

int cmd_prox(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ProxTrajectory traj;
  std::optional<RateAudit> audit;
  Json function;
  std::optional<double> gamma;
  try {
    const OracleSetup setup = build_oracle(config);
    const FunctionOracle& f = setup.oracle;
    if (static_cast<Eigen::Index>(config.x0.size()) != f.dim()) usage_error("x0 dimension does not match the function");
    const Point xbar = f.known_minimizer().value_or(Point::zero(f.dim()));
    ProxConfig cfg{.epsilon = config.epsilon,
                   .exponents = ExponentPair(config.p),
                   .iterations = config.iterations,
                   .region = BallRegion(xbar, setup.delta),
                   .solver = solver_config(config, f.dim())};
    cfg.validate();

    gamma = config.gamma_ref;
    if (!gamma && f.known_constants() && f.known_constants()->gamma && *f.known_constants()->gamma > 0.0) {
      gamma = f.known_constants()->gamma;
    }
    if (gamma && !(config.epsilon < *gamma)) {
      throw Error(ErrorKind::EpsilonNotBelowGamma, "rate bounds need epsilon < gamma (epsilon=" +
                                                       std::to_string(config.epsilon) + ", gamma=" +
                                                       std::to_string(*gamma) + ")");
    }
    const Point x0(Eigen::Map<const Eigen::VectorXd>(config.x0.data(), static_cast<Eigen::Index>(config.x0.size())));
    traj = run_prox(f, x0, cfg);
    if (gamma) audit = audit_rates(traj, *gamma, xbar, f(xbar).value(), cfg.exponents, config.epsilon);
    function = function_json(f);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  Json doc;
  doc["command"] = "prox";
  doc["config"] = to_json(config);
  doc["function"] = function;
  doc["gamma_ref"] = gamma ? Json(*gamma) : Json(nullptr);
  Json points = Json::array();
  for (const Point& x : traj.points) points.push_back(coords(x.coords()));
  doc["trajectory"] = {{"points", points}, {"values", traj.values}};
  doc["rate_audit"] = audit ? to_json(*audit) : Json("skipped: no gamma reference");

  try {
    write_outputs(config.output_dir,
                  {{"prox_report.json", dump(doc)},
                   {"prox_trajectory.csv",
                    csv_preamble(to_json(config)) + trajectory_csv(traj, audit ? &*audit : nullptr)}});
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  out << std::setprecision(10);
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    out << "k=" << k << " x=" << traj.points[k].coords().transpose() << " f=" << traj.values[k] << "\n";
  }
  if (audit) {
    out << "rate audit: " << (audit->passed ? "pass" : "fail") << "\n";
  } else {
    err << "warning: no gamma reference; rate audit skipped\n";
  }
  err << "prox finished in " << elapsed_seconds(start) << " s\n";
  return (audit && !audit->passed) ? kExitAuditFailure : kExitOk;
}

int cmd_tracking(const RunConfig& config, std::ostream& out, std::ostream& err) {
  using namespace growthlab::tracking;
  const auto start = std::chrono::steady_clock::now();
  Json manifest;
  std::vector<OutputFile> files;
  bool ok = true;
  try {
    if (config.etas_per_norm < 1) usage_error("etas_per_norm must be >= 1");
    const Grid2D grid(config.n);
    Field2D y_d;
    if (config.target == "sine") {
      y_d = default_target(grid);
    } else if (config.target == "constant") {
      y_d = Field2D(grid, Eigen::VectorXd::Constant(grid.size(), config.target_value));
    } else {
      usage_error("unknown target '" + config.target + "' (expected sine or constant)");
    }

    TrackingOptions opts;
    opts.tolerance = config.opt_tol;
    opts.max_iterations = config.max_iter;
    const TrackingResult result = solve_tracking(y_d, grid, config.alpha, config.beta, opts);
    const Eigen::VectorXd& u = result.control.values();
    const Eigen::VectorXd& p = result.adjoint.values();

    // Invariants at the computed control.
    const StateSolve state = solve_state_detailed(u, grid);
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(grid.size());
    Eigen::VectorXd w(grid.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
    for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = normal(rng);
    const double t = 1e-5;
    const double fd = (objective(Eigen::VectorXd(u + t * v), y_d, grid) - objective(Eigen::VectorXd(u - t * v), y_d, grid)) / (2 * t);
    const double gradient_error = std::abs(grid.inner(p, v) - fd);
    const double gradient_limit = 1e-6 * (1.0 + std::abs(result.objective));
    const Field2D zv = solve_linearized(v, result.state, grid);
    const Field2D zw = solve_linearized(w, result.state, grid);
    const double symmetry_error = std::abs(grid.inner(zv.values(), w) - grid.inner(v, zw.values()));
    double first_order_min = 0.0;
    int bang_bang_violations = 0;
    const double sign_tol = 1e-6;
    // A projected-gradient residual r leaves at most (beta - alpha) * r of slack in the
    // variational inequality.
    const double first_order_limit = (config.beta - config.alpha) * std::max(config.opt_tol, result.first_order_residual);
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      first_order_min += grid.h() * grid.h() * std::min(p[k] * (config.alpha - u[k]), p[k] * (config.beta - u[k]));
      if (p[k] > sign_tol && u[k] - config.alpha > sign_tol) ++bang_bang_violations;
      if (p[k] < -sign_tol && config.beta - u[k] > sign_tol) ++bang_bang_violations;
    }

    const SscEstimate ssc = ssc_estimate(result, y_d, grid, config.ssc_delta, config.ssc_samples, config.seed);
    const double growth = growth_cross_check(result, y_d, grid, config.ssc_delta, config.ssc_samples, config.seed);
    const SweepReport sweep =
        perturbation_sweep(result, y_d, grid, config.eta_norms, config.etas_per_norm, opts, config.seed);

    std::size_t failed = 0;
    for (const auto& s : sweep.samples) failed += s.failed ? 1 : 0;
    const bool ssc_positive = ssc.c_hat > 0.0;
    const bool bounded = failed == 0 && std::isfinite(sweep.kappa_hat) && sweep.max_spread <= config.spread_limit;
    const bool consistency_ok = !ssc_positive || bounded;

    Json checks;
    checks["newton_residual"] = {{"value", state.residual}, {"limit", 1e-10}, {"pass", state.residual <= 1e-10}};
    checks["gradient_consistency"] = {
        {"error", gradient_error}, {"limit", gradient_limit}, {"pass", gradient_error <= gradient_limit}};
    checks["linearized_symmetry"] = {{"error", symmetry_error}, {"limit", 1e-10}, {"pass", symmetry_error <= 1e-10}};
    checks["first_order_condition"] = {
        {"min_vertex_value", first_order_min}, {"limit", -first_order_limit}, {"pass", first_order_min >= -first_order_limit}};
    checks["bang_bang_structure"] = {
        {"violations", bang_bang_violations}, {"sign_tolerance", sign_tol}, {"pass", bang_bang_violations == 0}};
    for (const auto& [name, check] : checks.items()) ok = ok && check["pass"].get<bool>();
    ok = ok && consistency_ok;

    manifest["command"] = "tracking";
    manifest["config"] = to_json(config);
    manifest["grid"] = {{"n", grid.n()}, {"h", grid.h()}, {"domain", "unit square"}};
    manifest["bounds"] = {{"alpha", config.alpha}, {"beta", config.beta}};
    manifest["tolerances"] = {{"newton", 1e-10}, {"linear", 1e-12}, {"optimality", config.opt_tol}};
    manifest["solution"] = {{"objective", result.objective},
                            {"first_order_residual", result.first_order_residual},
                            {"iterations", result.iterations},
                            {"converged", result.converged}};
    manifest["checks"] = checks;
    manifest["ssc"] = {{"c_hat", ssc.c_hat}, {"samples", ssc.samples.size()}, {"delta", config.ssc_delta}};
    manifest["growth_cross_check"] = number(growth);
    manifest["sweep"] = to_json(sweep);
    manifest["consistency"] = {{"ssc_positive", ssc_positive},
                               {"bounded", bounded},
                               {"spread_limit", config.spread_limit},
                               {"pass", consistency_ok}};
    manifest["status"] = ok ? "pass" : "fail";

    const std::string preamble = csv_preamble(to_json(config));
    auto matrix = [&](const Eigen::VectorXd& values) {
      std::ostringstream os;
      os << preamble;
      write_field_matrix(os, values, grid.n());
      return os.str();
    };
    files = {{"tracking_manifest.json", dump(manifest)},
             {"tracking_sweep.csv", preamble + sweep_csv(sweep)},
             {"tracking_ssc.csv", preamble + ssc_csv(ssc)},
             {"control.txt", matrix(u)},
             {"state.txt", matrix(result.state.values())},
             {"adjoint.txt", matrix(p)},
             {"target.txt", matrix(y_d.values())}};

    if (!result.converged) err << "warning: IterationCapReached: optimality residual " << result.first_order_residual << "\n";
    out << std::setprecision(6);
    out << "objective = " << result.objective << " (iterations " << result.iterations << ")\n";
    out << "ssc c_hat = " << ssc.c_hat << ", growth cross-check = " << growth << "\n";
    out << "sweep kappa_hat = " << sweep.kappa_hat << ", median = " << sweep.median_ratio
        << ", max spread = " << sweep.max_spread << "\n";
    out << "status: " << (ok ? "pass" : "fail") << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    write_outputs(config.output_dir, files);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "tracking finished in " << elapsed_seconds(start) << " s\n";
  return ok ? kExitOk : kExitAuditFailure;
}

int cmd_catalog(std::ostream& out) {
  for (const CatalogEntry& e : catalog()) {
    out << e.id << "\t" << e.formula << "\t[" << e.parameters << "]\tdefault delta " << e.default_delta;
    if (e.natural_p) out << "\tp = " << *e.natural_p;
    const CatalogParams params{e.natural_p.value_or(2.0), e.id == "maxsq2d" || e.id == "quad2d" ? 2 : 1};
    const FunctionOracle f = make_oracle(e, params);
    if (const auto& k = f.known_constants()) {
      out << "\tknown";
      if (!e.natural_p) out << " (p = 2)";
      if (k->gamma) out << " gamma=" << *k->gamma;
      if (k->kappa) out << " kappa=" << *k->kappa;
      if (k->mu) out << " mu=" << *k->mu;
    }
    out << "\n";
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"growthlab: growth, tilt stability and Lojasiewicz diagnostics"};
  app.set_config("--config", "", "Flat key = value file; explicit flags override its values");
  app.require_subcommand(1);

  RunConfig config;
  app.add_option("--out", config.output_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", config.seed, "Random seed")->capture_default_str();

  app.add_option("--fn", config.fn, "Catalog function id")->capture_default_str();
  app.add_option("--p", config.p, "Growth exponent p > 1")->capture_default_str();
  app.add_option("--dim", config.dim, "Dimension (power family)")->capture_default_str();
  app.add_option("--delta", config.delta, "Ball radius (catalog default when omitted)");
  app.add_option("--grid", config.grid, "Grid points per axis (0 = by dimension)")->capture_default_str();
  app.add_option("--multistart", config.multistart, "Polish starts")->capture_default_str();
  app.add_option("--polish-iters", config.polish_iters, "Pattern-search iteration cap per start")->capture_default_str();
  app.add_option("--polish-tol", config.polish_tol, "Pattern-search step tolerance")->capture_default_str();
  app.add_option("--value-tol", config.value_tol, "Near-optimality slack")->capture_default_str();
  app.add_option("--tilt-norms", config.tilt_norms, "Tilt norms")->delimiter(',')->capture_default_str();
  app.add_option("--directions", config.directions, "Directions per tilt norm (0 = by dimension)");
  app.add_option("--tau", config.tau, "Audit slack factor")->capture_default_str();

  app.add_option("--epsilon", config.epsilon, "Proximal parameter")->capture_default_str();
  app.add_option("--iterations", config.iterations, "Proximal iterations K")->capture_default_str();
  app.add_option("--x0", config.x0, "Initial point")->delimiter(',')->capture_default_str();
  app.add_option("--gamma-ref", config.gamma_ref, "Reference growth constant for the rate audit");

  app.add_option("--n", config.n, "Interior nodes per axis")->capture_default_str();
  app.add_option("--alpha", config.alpha, "Lower control bound")->capture_default_str();
  app.add_option("--beta", config.beta, "Upper control bound")->capture_default_str();
  app.add_option("--target", config.target, "sine | constant")->capture_default_str();
  app.add_option("--target-value", config.target_value, "Value of the constant target")->capture_default_str();
  app.add_option("--opt-tol", config.opt_tol, "Projected-gradient residual tolerance")->capture_default_str();
  app.add_option("--max-iter", config.max_iter, "Projected-gradient iteration cap")->capture_default_str();
  app.add_option("--eta-norms", config.eta_norms, "Target perturbation norms")->delimiter(',')->capture_default_str();
  app.add_option("--etas-per-norm", config.etas_per_norm, "Perturbations per norm")->capture_default_str();
  app.add_option("--ssc-delta", config.ssc_delta, "Linearized-state radius for second-order sampling")->capture_default_str();
  app.add_option("--ssc-samples", config.ssc_samples, "Random feasible directions")->capture_default_str();
  app.add_option("--spread-limit", config.spread_limit, "Allowed factor between sweep ratios and their median")->capture_default_str();

  const std::pair<const char*, const char*> subcommands[] = {
      {"diagnose", "Estimate growth, tilt and Lojasiewicz constants and audit their relations"},
      {"prox", "Run the power-proximal point method and audit its linear rates"},
      {"tracking", "Solve the semilinear tracking problem and sweep target perturbations"},
      {"catalog", "List the built-in test functions"},
  };
  for (const auto& [name, description] : subcommands) app.add_subcommand(name, description)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  config.subcommand = app.get_subcommands().front()->get_name();
  if (config.subcommand == "diagnose") return cmd_diagnose(config, out, err);
  if (config.subcommand == "prox") return cmd_prox(config, out, err);
  if (config.subcommand == "tracking") return cmd_tracking(config, out, err);
  return cmd_catalog(out);
}

}  // namespace growthlab::cli
