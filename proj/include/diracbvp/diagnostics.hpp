#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "diracbvp/bvp_solver.hpp"

namespace diracbvp::diagnostics {

enum class Relation { at_most, at_least, within, report };

/// One measured number with the threshold it is held to and the statement it checks.
struct Measurement {
  std::string name;
  double value = 0.0;
  Relation relation = Relation::report;
  double lower = 0.0;
  double upper = 0.0;
  std::string claim;
  /// Non-gating measurements are recorded with their threshold but never fail a campaign.
  bool gating = true;

  static Measurement at_most(std::string name, double value, double bound, std::string claim, bool gating = true);
  static Measurement at_least(std::string name, double value, double bound, std::string claim, bool gating = true);
  static Measurement within(std::string name, double value, double lo, double hi, std::string claim,
                            bool gating = true);
  static Measurement report(std::string name, double value, std::string claim);

  bool passed() const;
  std::string threshold() const;
};

struct CampaignPoint {
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<Measurement> measurements;
  std::string note;
};

struct CampaignResult {
  std::string id;
  std::uint64_t seed = 0;
  bool exploratory = false;
  std::vector<CampaignPoint> points;
  std::vector<std::string> notes;

  /// All gating measurements pass.
  bool passed() const;
  std::vector<std::string> failures() const;
  /// Largest value of a named measurement across points; NaN if absent.
  double max_of(const std::string& name) const;
  double min_of(const std::string& name) const;
  /// One row per parameter point; per measurement the value, threshold and pass flag.
  std::string csv() const;
  std::string summary() const;
};

/// Writes <dir>/<id>.csv and <dir>/<id>_summary.txt.
void write_campaign(const CampaignResult& result, const std::filesystem::path& dir);

/// Mean-free band-limited data; the same function of x at every resolution of a given period.
ScalarField smooth_data(const Torus& torus, std::uint64_t seed, int max_wavenumber = 3);

struct RellichOptions {
  int samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 1e-7;
};
/// Needs a hermitian coefficient; complex hermitian input is run as exploratory.
CampaignResult rellich_campaign(const CoefficientField& b, const RellichOptions& options = {});

struct BlockOptions {
  double delta = 0.1;
  double tolerance = 1e-9;
  int degree = 1;
};
CampaignResult block_campaign(const CoefficientField& b, const BlockOptions& options = {});

struct PerturbationOptions {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double spread_limit = 3.0;
  std::uint64_t seed = 0;
};
CampaignResult perturbation_campaign(const CoefficientField& b0, const CoefficientField& direction,
                                     const PerturbationOptions& options = {});

struct KkptOptions {
  std::vector<double> k{0.0, 1.0, 2.0, 4.0, 8.0};
  std::vector<int> points{128, 256};
  double period = 2.0 * std::numbers::pi;
  double norm_tolerance = 1e-6;
};
CampaignResult kkpt_scan(const KkptOptions& options = {});

CampaignResult psi_comparability(const CoefficientField& b, int samples = 20, std::uint64_t seed = 1);
CampaignResult hodge_campaign(const CoefficientField& b);
CampaignResult duality_campaign(const CoefficientField& b, double tolerance = 1e-9);

struct OffDiagonalOptions {
  double t = 0.05;
  std::vector<double> distance_ratios{1.0, 2.0, 4.0, 8.0};
  double mass_limit = 0.1;
};
/// Resolvent mass outside a distance from a point source; descriptive only.
CampaignResult offdiag_campaign(const CoefficientField& b, const OffDiagonalOptions& options = {});

struct NamedCoefficient {
  std::string name;
  CoefficientField field;
};
/// Smallest sector margin of the non-kernel spectrum; constant coefficients use the tight tolerance.
CampaignResult sector_campaign(const std::vector<NamedCoefficient>& families, double constant_tolerance = 1e-8,
                               double variable_tolerance = 1e-2);

}  // namespace diracbvp::diagnostics
