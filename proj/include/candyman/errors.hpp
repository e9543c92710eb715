#pragma once

#include <stdexcept>
#include <string>

namespace candyman {

struct InvalidArchitecture : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainingDiverged : std::runtime_error {
  int epoch;
  explicit TrainingDiverged(int epoch_, const std::string& what_)
      : std::runtime_error(what_), epoch(epoch_) {}
};

struct RolloutDiverged : std::runtime_error {
  int step;
  explicit RolloutDiverged(int step_, const std::string& what_)
      : std::runtime_error(what_), step(step_) {}
};

struct SolverInstability : std::runtime_error {
  long step;
  explicit SolverInstability(long step_, const std::string& what_)
      : std::runtime_error(what_), step(step_) {}
};

// CLI exit codes, also documented in the README.
enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitTrainingDiverged = 4,
  kExitRolloutDiverged = 5,
};

}  // namespace candyman
