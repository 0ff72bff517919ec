#include <cstdlib>
#include <iostream>
#include <string>

#include "diracbvp/acceptance.hpp"

int main(int argc, char** argv) {
  diracbvp::acceptance::Options options;
  for (int i = 1; i < argc; ++i) options.only.push_back(std::stoi(argv[i]));
  const auto rows = diracbvp::acceptance::run(options, [](const diracbvp::acceptance::Row& row) {
    std::cout << diracbvp::acceptance::format_row(row) << std::endl;
  });
  bool ok = true;
  int passed = 0;
  for (const auto& r : rows) {
    ok = ok && r.passed;
    passed += r.passed ? 1 : 0;
  }
  std::cout << passed << "/" << rows.size() << " criteria passed" << std::endl;
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
