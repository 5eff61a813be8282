#pragma once

#include <stdexcept>
#include <string>

namespace fluxsense {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite values appeared while time stepping.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainAborted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace fluxsense
