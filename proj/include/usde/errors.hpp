#pragma once

#include <stdexcept>
#include <string>

namespace usde {

// Coefficient evaluated outside its admissible domain (e.g. non-positive
// diffusion where a positive one is required).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical breakdown: singular matrices, quadrature failure, non-finite draws.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LookupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid experiment or problem configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// MLMC ran out of levels before its bias test passed.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace usde
