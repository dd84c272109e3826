#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace growthlab::cli {

// Resolved settings for one invocation. Fields a subcommand does not use are still
// recorded so a manifest fully describes the run.
struct RunConfig {
  std::string subcommand;
  std::string output_dir = "growthlab_out";
  std::uint64_t seed = 20240601;

  // diagnose / prox
  std::string fn = "power";
  double p = 2.0;
  int dim = 1;
  std::optional<double> delta;  // catalog default when unset
  int grid = 0;                 // 0 selects a dimension-dependent default
  int multistart = 8;
  int polish_iters = 10000;
  double polish_tol = 1e-11;
  double value_tol = 1e-10;
  std::vector<double> tilt_norms{0.05, 0.1, 0.2, 0.5, 1.0};
  int directions = 0;           // 0 selects a dimension-dependent default
  double tau = 1.10;

  // prox
  double epsilon = 0.5;
  int iterations = 10;
  std::vector<double> x0{1.0};
  std::optional<double> gamma_ref;  // catalog γ when unset

  // tracking
  int n = 32;
  double alpha = 0.0;
  double beta = 16.0;
  std::string target = "sine";
  double target_value = 1.0;
  double opt_tol = 1e-8;
  int max_iter = 5000;
  std::vector<double> eta_norms{1e-3, 1e-2, 1e-1};
  int etas_per_norm = 8;
  double ssc_delta = 0.05;
  int ssc_samples = 16;
  double spread_limit = 4.0;
};

nlohmann::ordered_json to_json(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAuditFailure = 2;

// Each command validates and computes everything before touching the filesystem, so
// no report file exists after an exit-1 run.
int cmd_diagnose(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_prox(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_tracking(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_catalog(std::ostream& out);

// Parses argv (with an optional flat key = value --config file whose values are
// overridden by explicit flags) and dispatches to the selected subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace growthlab::cli
