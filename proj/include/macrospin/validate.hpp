#pragma once

// Built-in invariant checks on small systems: positive semidefinite
// correlation matrices, norm and energy conservation, Parseval, the
// diagonal ensemble against a sampled time average, GHZ and product-state
// macroscopicity, and l-bit conservation laws.

#include <cstdint>
#include <string>
#include <vector>

namespace macrospin {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool passed() const;
};

ValidationReport run_validation_suite(std::uint64_t seed = 2024);

}  // namespace macrospin
