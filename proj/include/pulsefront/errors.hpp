#pragma once

#include <stdexcept>
#include <string>

namespace pulsefront {

/// Base class for every numerical failure the library reports by exception.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A test function left the admissible set (phi_s not positive on a sample).
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Tail limits of R could not be obtained.
class TailError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class ShootingError : public Error {
 public:
  using Error::Error;
};

/// Operation requested for a nonlinearity class it is not defined for.
class ClassError : public Error {
 public:
  using Error::Error;
};

class CFLError : public Error {
 public:
  using Error::Error;
};

class NoFrontError : public Error {
 public:
  using Error::Error;
};

class BinningError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pulsefront
