#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated admissibility window.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Sampled potential does not satisfy inf V >= V0 > 0.
class PotentialViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterative method hit its iteration cap.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// One part of a sign-changing iterate vanished.
class NodalCollapse : public Error {
 public:
  using Error::Error;
};

}  // namespace choquard
