#pragma once

#include <stdexcept>
#include <string>

namespace opfp {

// Base for all library failures. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Y is singular or too badly conditioned to invert reliably.
class DegenerateNetwork : public Error {
 public:
  using Error::Error;
};

// The plant power-flow solve left the guard band or ran out of iterations.
class PlantFailure : public Error {
 public:
  PlantFailure(const std::string& what, double residual, int step = -1)
      : Error(what), residual_(residual), step_(step) {}

  double residual() const { return residual_; }
  int step() const { return step_; }

 private:
  double residual_;
  int step_;
};

class OracleFailure : public Error {
 public:
  OracleFailure(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace opfp
