#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <optional>

#include "diracbvp/commands.hpp"
#include "diracbvp/errors.hpp"

namespace cli = diracbvp::cli;

int main(int argc, char** argv) {
  CLI::App app{"Boundary value problems for divergence-form equations via the Dirac operator"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides [run] output)");
  app.add_option("--seed", seed, "Random seed (overrides [run] seed)");
  app.add_flag("--quiet", quiet, "Only print warnings and the final summary");
  app.fallthrough();

  auto* solve = app.add_subcommand("solve", "Solve one boundary value problem and write report and CSV files");
  auto* campaign = app.add_subcommand("campaign", "Run a diagnostic campaign over a parameter grid");
  auto* oracle = app.add_subcommand("oracle", "Compare a constant-coefficient grid solve with the per-mode oracle");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite and print a pass/fail table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  auto logger = spdlog::stderr_color_mt("diracbvp");
  logger->set_pattern("[%H:%M:%S] %v");
  logger->set_level(quiet ? spdlog::level::warn : spdlog::level::info);
  const cli::Logger log = [&](const std::string& message) { logger->info(message); };

  try {
    cli::RunConfig config;
    if (!config_path.empty()) {
      config = cli::load_run_config(config_path);
    } else if (!verify->parsed()) {
      throw diracbvp::ConfigError("--config is required for this command");
    }
    if (!out_dir.empty()) config.output = out_dir;
    if (seed) config.seed = *seed;

    cli::CommandResult result;
    if (solve->parsed()) result = cli::cmd_solve(config, log);
    else if (campaign->parsed()) result = cli::cmd_campaign(config, log);
    else if (oracle->parsed()) result = cli::cmd_oracle(config, log);
    else result = cli::cmd_verify(config, log);

    for (const auto& f : result.files) logger->info("wrote {}", f.string());
    std::cout << result.summary << (result.summary.ends_with('\n') ? "" : "\n");
    if (result.exit_code != cli::kOk) logger->warn("exit code {}", result.exit_code);
    return result.exit_code;
  } catch (const std::exception& e) {
    const auto [code, message] = cli::describe_failure(e);
    logger->error(message);
    return code;
  }
}
