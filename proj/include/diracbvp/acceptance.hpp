#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace diracbvp::acceptance {

struct Row {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 20240611;
  /// Criterion ids to run; empty runs all twelve.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order; a row fails on a numeric miss, an exception or a blown time budget.
std::vector<Row> run(const Options& options = {}, const std::function<void(const Row&)>& on_row = {});

std::string format_row(const Row& row);
std::string format_table(const std::vector<Row>& rows);

}  // namespace diracbvp::acceptance
