#pragma once

#include <stdexcept>

namespace pinnlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pinnlab
