#pragma once

#include <stdexcept>
#include <string>

namespace aimrom {

// Bad arguments: shape mismatches, out-of-range parameters, incompatible configs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Config documents that fail schema checks. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Blow-up, NaN loss, diverged solves. Exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BlowUp : public NumericalFailure {
 public:
  BlowUp(double t, const std::string& what)
      : NumericalFailure(what + " (non-finite state at t=" + std::to_string(t) + ")"), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

class TrainingDiverged : public NumericalFailure {
 public:
  explicit TrainingDiverged(int epoch)
      : NumericalFailure("training loss became non-finite at epoch " + std::to_string(epoch)),
        epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// A model alias or data file that is not where the config says. Exit code 4.
class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aimrom
