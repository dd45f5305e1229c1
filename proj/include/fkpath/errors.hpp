#pragma once

#include <stdexcept>
#include <string>

namespace fkpath {

// A model callback produced something unusable: nonfinite rate or drift,
// potential outside [0, potential_sup], broken generator rows.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical routine could not reach its tolerance (step-size underflow,
// quadrature non-convergence, degenerate semigroup).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A functional in a battery failed to evaluate; carries its index.
struct FunctionalError : std::runtime_error {
  FunctionalError(int idx, const std::string& what)
      : std::runtime_error("functional[" + std::to_string(idx) + "]: " + what),
        index(idx) {}
  int index;
};

}  // namespace fkpath
