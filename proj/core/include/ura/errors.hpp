#pragma once

#include <stdexcept>
#include <string>

namespace ura {

// Invalid configuration, CLI arguments, or unreadable input files.
// The command line tool maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown during an experiment (non-finite objective, singular
// covariance, too many aborted trials). Mapped to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ura
