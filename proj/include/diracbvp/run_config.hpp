#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "diracbvp/bvp_solver.hpp"

namespace diracbvp::cli {

struct TorusSpec {
  int n = 1;
  double period = 2.0 * std::numbers::pi;
  int points = 64;

  Torus make() const { return Torus(n, points, period); }
};

struct CoefficientSpec {
  /// identity | scaled_identity | constant | kkpt | real_symmetric | accretive | block | csv
  std::string family = "identity";
  double k = 0.0;
  std::optional<std::uint64_t> seed;
  double kappa_floor = 0.3;
  Complex scale = 1.0;
  /// Row-major (n+1)x(n+1) vector block of the constant family.
  std::vector<Complex> matrix;
  std::filesystem::path csv;
};

struct ProblemSpec {
  std::optional<BvpKind> kind;
  /// mode | gaussian | step | csv; empty when not given.
  std::string profile;
  int mode = 1;
  int axis = 0;
  std::optional<double> center;
  double width = 0.5;
  double amplitude = 1.0;
  Complex alpha_plus = 1.0;
  Complex alpha_minus = 0.0;
  int degree = 1;
  std::filesystem::path csv;
};

struct CampaignSpec {
  /// rellich | block | perturbation | kkpt | psi | hodge | duality | offdiag | sector; empty when not given.
  std::string id;
  std::vector<double> k{0.0, 1.0, 2.0, 4.0, 8.0};
  std::vector<int> points{128, 256};
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  std::vector<double> ratios{1.0, 2.0, 4.0, 8.0};
  std::vector<std::string> families{"identity", "block", "real_symmetric", "kkpt"};
  int samples = 100;
  double delta = 0.1;
  double t = 0.05;
  std::optional<double> tolerance;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output = "diracbvp_out";
  TorusSpec torus;
  CoefficientSpec coefficient;
  ProblemSpec problem;
  CampaignSpec campaign;
  BvpOptions tolerances;
  double oracle_tolerance = 1e-9;

  std::uint64_t coefficient_seed() const { return coefficient.seed.value_or(seed); }
  /// Every key with its effective value, parseable by parse_run_config.
  std::string to_text() const;
};

/// Parses bracketed sections of key = value lines; errors are ConfigError with the offending line.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace diracbvp::cli
