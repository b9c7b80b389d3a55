#pragma once

#include <stdexcept>
#include <string>

namespace lflux {

/// Parameter or state outside the model's admissible domain.
/// Maps to process exit code 2 in the CLI.
class ModelError : public std::runtime_error {
public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// A request that would exceed the configured memory/size budget.
/// Maps to process exit code 3 in the CLI.
class ResourceError : public std::runtime_error {
public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Simulation window too small: a boundary sentinel fired or a
/// precondition on lattice extent failed. Never silently truncated.
class WindowError : public ModelError {
public:
  explicit WindowError(const std::string& what) : ModelError(what) {}
};

}  // namespace lflux
