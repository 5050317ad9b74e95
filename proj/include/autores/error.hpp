#pragma once

#include <stdexcept>
#include <string>

namespace autores {

/// Invalid parameters or configuration, detected before any compute.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure inside a numerical routine: integrator step underflow, Hilbert-space
/// truncation breach, ill-posed fit, ambiguous branch labeling.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace autores
