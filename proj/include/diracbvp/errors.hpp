#pragma once

#include <stdexcept>
#include <string>

namespace diracbvp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A pointwise or global linear solve hit a singular (or numerically singular) matrix.
class SingularOperator : public Error {
 public:
  SingularOperator(const std::string& what, long grid_point = -1)
      : Error(what), grid_point_(grid_point) {}
  long grid_point() const noexcept { return grid_point_; }

 private:
  long grid_point_;
};

class SubspaceInvarianceError : public Error {
 public:
  SubspaceInvarianceError(const std::string& what, double defect) : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class IllConditionedEigenbasis : public Error {
 public:
  IllConditionedEigenbasis(const std::string& what, double cond) : Error(what), cond_(cond) {}
  double condition() const noexcept { return cond_; }

 private:
  double cond_;
};

class SectorViolation : public Error {
 public:
  using Error::Error;
};

class WellPosednessFailure : public Error {
 public:
  WellPosednessFailure(const std::string& what, double cond) : Error(what), cond_(cond) {}
  double condition() const noexcept { return cond_; }

 private:
  double cond_;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace diracbvp
