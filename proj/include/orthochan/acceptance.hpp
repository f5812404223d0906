#pragma once

// The acceptance suite: one deterministic check per criterion, each reporting
// a verdict and the measured quantities behind it.

#include <cstdint>
#include <string>
#include <vector>

namespace orthochan {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20261016;
  std::vector<int> only;  // empty: every criterion
};

inline constexpr int kCriterionCount = 11;

CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// One line per criterion: "PASS [id] name: measured".
std::string format_report(const std::vector<CriterionResult>& results);

// Serialized numeric outputs of the Monte Carlo paths, used to compare runs.
std::string determinism_probe(std::uint64_t seed);

}  // namespace orthochan
