#pragma once

#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "diracbvp/run_config.hpp"

namespace diracbvp::cli {

/// Exit codes: 0 success, 1 failed gating check, 2 config error, 3 well-posedness failure, 4 numerical failure.
enum ExitCode : int { kOk = 0, kGatingFailure = 1, kConfigError = 2, kWellPosedness = 3, kNumerical = 4 };

struct CommandResult {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;
  std::string summary;
};

using Logger = std::function<void(const std::string&)>;

CoefficientField make_coefficient(const RunConfig& config, const Torus& torus);
/// Boundary data of the configured problem; regularity profiles are potentials.
BoundaryData make_boundary_data(const RunConfig& config, const Torus& torus);

CommandResult cmd_solve(const RunConfig& config, const Logger& log = {});
CommandResult cmd_campaign(const RunConfig& config, const Logger& log = {});
/// Grid solve against the per-mode constant-coefficient oracle.
CommandResult cmd_oracle(const RunConfig& config, const Logger& log = {});
CommandResult cmd_verify(const RunConfig& config, const Logger& log = {});

/// Maps an exception to an exit code and a one-line diagnostic including its payload.
std::pair<int, std::string> describe_failure(const std::exception& e);

}  // namespace diracbvp::cli
