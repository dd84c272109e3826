#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace growthlab {

enum class ErrorKind {
  Usage,
  AllInfinite,
  NonFiniteValue,
  NoFiniteSamples,
  NegativeGap,
  SlopeInfinite,
  EpsilonNotBelowGamma,
  NewtonDivergence,
  LinearSolverBreakdown,
  NoSamplesInShell,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports is an Error tagged with its kind. Callers that
// need to distinguish (the CLI exit-code mapping, tests) switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  Error(ErrorKind kind, const std::string& message, std::vector<double> witness)
      : Error(kind, message) {
    witness_ = std::move(witness);
  }

  ErrorKind kind() const noexcept { return kind_; }

  // Coordinates of the offending point (NegativeGap) or the residual history
  // (NewtonDivergence); empty otherwise.
  const std::vector<double>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::vector<double> witness_;
};

[[noreturn]] inline void usage_error(const std::string& message) {
  throw Error(ErrorKind::Usage, message);
}

}  // namespace growthlab
