#pragma once

#include <stdexcept>
#include <string>

namespace lzeros {

// Base class for every error raised by the library. The CLI maps
// NumericalError to exit code 3 and ConfigError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

struct Rect {
  double beta_min = 0.0;
  double beta_max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;

  double width() const { return beta_max - beta_min; }
  double height() const { return t_max - t_min; }
  double diagonal() const;
  bool contains(double beta, double t) const {
    return beta >= beta_min && beta < beta_max && t >= t_min && t < t_max;
  }
};

// Phase unwrapping failed: a zero sits on (or numerically on) the contour.
class NonConvergent : public NumericalError {
 public:
  NonConvergent(const std::string& what, const Rect& rect)
      : NumericalError(what), rect_(rect) {}
  const Rect& rect() const { return rect_; }

 private:
  Rect rect_;
};

class SizeCap : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DegenerateGroundState : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OutOfPhase : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class GaplessMode : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OrthogonalMode : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OutOfValidity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularK : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IllConditioned : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InvalidSpacing : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace lzeros
