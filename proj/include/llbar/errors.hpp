#pragma once

/// \file errors.hpp
/// \brief Exception types shared by the library and the experiment runner.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llbar {

/// Invalid grid, field shape or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model term was requested in a configuration where it is undefined
/// (e.g. anisotropy on a scalar field).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state or a state whose L2 norm exceeded the guard.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, double time, const std::string& what)
      : std::runtime_error(what + " (step " + std::to_string(step) +
                           ", t=" + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// File could not be read or written, or its contents are corrupt.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace llbar
