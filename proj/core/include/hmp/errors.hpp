#pragma once

#include <stdexcept>
#include <string>

namespace hmp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input (wrong sizes, NaN, negative times).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid model or controller parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Response-time matrix that cannot be decoded into a schedule.
class ScheduleError : public Error {
 public:
  ScheduleError(const std::string& what, int joint, int column)
      : Error(what), joint_(joint), column_(column) {}
  int joint() const noexcept { return joint_; }
  int column() const noexcept { return column_; }

 private:
  int joint_;
  int column_;
};

/// Query outside the domain of a schedule or table.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Integration aborted, e.g. a control law produced a non-finite torque.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t) : Error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Boundary conditions that cannot be met under the control bound.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Planner could not produce any feasible plan.
class PlanningError : public Error {
 public:
  using Error::Error;
};

/// Scenario/config file problems.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hmp
