#ifndef OPFRAME_ERRORS_HPP
#define OPFRAME_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opframe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values (non-positive sizes, empty intervals, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Operands whose descriptors, ranks or quadrature rules do not agree.
class ShapeMismatch : public Error {
public:
  using Error::Error;
};

class NotPositive : public Error {
public:
  using Error::Error;
};

class SingularElement : public Error {
public:
  using Error::Error;
};

class SingularFrameOperator : public Error {
public:
  using Error::Error;
};

class NotAFrame : public Error {
public:
  using Error::Error;
};

// Raised by iterative reconstruction when max_iter is reached.
class NoConvergence : public Error {
public:
  NoConvergence(const std::string &what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const { return last_residual_; }

private:
  double last_residual_;
};

} // namespace opframe

#endif // OPFRAME_ERRORS_HPP
