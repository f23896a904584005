#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace radcomp {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (scenario or curvature JSON).
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The warping function vanished at t > 0; the model metric degenerates there.
class ConjugatePoint : public Error {
 public:
  explicit ConjugatePoint(double t)
      : Error("conjugate point: warping function vanishes at t = " + std::to_string(t)), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

/// A quantity that requires a finite curvature moment was asked of a divergent one.
class Unbounded : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested beyond the horizon a solution was computed to.
class HorizonExceeded : public Error {
 public:
  HorizonExceeded(double t, double horizon)
      : Error("t = " + std::to_string(t) + " exceeds horizon " + std::to_string(horizon)),
        t_(t), horizon_(horizon) {}
  double t() const noexcept { return t_; }
  double horizon() const noexcept { return horizon_; }

 private:
  double t_;
  double horizon_;
};

/// The denominator model has bounded volume, so its ball volumes do not tend to infinity.
class ConditionB1Violated : public Error {
 public:
  using Error::Error;
};

/// The comparison triangle would need a pole angle beyond the admissible sector.
class SectorExceeded : public Error {
 public:
  using Error::Error;
};

/// The instance is outside the class this toolkit can decide.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow or non-finite state in an ODE integration.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_good)
      : Error(what + " (last good abscissa " + std::to_string(last_good) + ")"),
        last_good_(last_good) {}
  double last_good() const noexcept { return last_good_; }

 private:
  double last_good_;
};

}  // namespace radcomp
