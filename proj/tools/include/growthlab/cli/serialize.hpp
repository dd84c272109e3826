#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "growthlab/diagnostics.hpp"
#include "growthlab/prox.hpp"
#include "growthlab/tracking.hpp"

namespace growthlab::cli {

using Json = nlohmann::ordered_json;

// Finite doubles as numbers; ±inf as the strings "inf" / "-inf".
Json number(double value);
Json coords(const Eigen::VectorXd& v);

Json to_json(const GrowthEstimate& growth);
Json to_json(const TiltEstimate& tilt);
Json to_json(const LojaEstimate& loja);
Json to_json(const EquivalenceAudit& audit);
Json to_json(const DiagnosticsReport& report);
Json to_json(const RateAudit& audit);
Json to_json(const tracking::SweepReport& sweep);

// Header lines "# key: value" carrying the resolved configuration; CSV readers skip
// them with a comment prefix of '#'.
std::string csv_preamble(const Json& config);

// One row per estimator: estimator,value,samples,witness_1..d,tilt_1..d.
std::string diagnostics_csv(const DiagnosticsReport& report);

// k,x_1..d,f,bound_x,bound_f,margin_x,margin_f.
std::string trajectory_csv(const ProxTrajectory& traj, const RateAudit* audit);

std::string sweep_csv(const tracking::SweepReport& sweep);
std::string ssc_csv(const tracking::SscEstimate& ssc);

// One grid line per row (index j), space-separated values along x₁.
void write_field_matrix(std::ostream& out, const Eigen::VectorXd& values, int n);
Eigen::VectorXd read_field_matrix(std::istream& in, int& n);

}  // namespace growthlab::cli
