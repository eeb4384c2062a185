#pragma once

#include <stdexcept>
#include <string>

namespace clusterfeed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scene, configuration or target data that violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Impedance matrix could not be assembled (degenerate geometry).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

/// Linear system without a usable solution, e.g. Z singular at an internal resonance.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Angular rule too coarse for the electrical size of the scene.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace clusterfeed
