#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "growthlab/core.hpp"

namespace growthlab::cli {

struct CatalogParams {
  double p = 2.0;
  int dim = 1;
};

struct CatalogEntry {
  std::string id;
  std::string formula;
  std::string parameters;
  // Exponent the known constants refer to; nullopt when the entry is parameterized by p.
  std::optional<double> natural_p;
  double default_delta = 1.0;
  std::function<FunctionOracle(const CatalogParams&)> make;
};

const std::vector<CatalogEntry>& catalog();

// Throws a usage error for unknown ids.
const CatalogEntry& find_entry(const std::string& id);

// Builds the oracle, attaching known constants only when they apply to params.p.
FunctionOracle make_oracle(const CatalogEntry& entry, const CatalogParams& params);

}  // namespace growthlab::cli
