#pragma once

#include <stdexcept>
#include <string>

namespace compest {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible array or matrix dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (zero labor force, r out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Errors tied to a specific month of a recursion carry the month (1-based).
class MonthError : public Error {
 public:
  MonthError(const std::string& what, int month)
      : Error(what + " (month " + std::to_string(month) + ")"), month_(month) {}
  int month() const noexcept { return month_; }

 private:
  int month_;
};

class GenerationError : public MonthError {
 public:
  using MonthError::MonthError;
};

class CalibrationError : public MonthError {
 public:
  using MonthError::MonthError;
};

// Failure while evaluating draw r of an enumeration; the original exception is nested.
class DrawError : public Error {
 public:
  DrawError(const std::string& what, int draw)
      : Error("draw " + std::to_string(draw) + ": " + what), draw_(draw) {}
  int draw() const noexcept { return draw_; }

 private:
  int draw_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace compest
