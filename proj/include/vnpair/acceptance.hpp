#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vnpair {

// One generated instance of a property. ok is false when a structural check failed even if the
// residual is small.
struct CaseOutcome {
  double residual = 0.0;
  bool ok = true;
  std::string note;
};

struct Criterion {
  int id;
  std::string name;
  std::size_t cases;
  double tolerance;
  double time_limit;  // seconds, 0 = none
  std::function<CaseOutcome(std::uint64_t case_seed)> run;
};

const std::vector<Criterion>& acceptance_criteria();

constexpr std::uint64_t kDefaultSelftestSeed = 20240607;
std::uint64_t case_seed(std::uint64_t seed, int criterion, std::size_t index);

struct FailedCase {
  int criterion = 0;
  std::size_t index = 0;
  std::uint64_t case_seed = 0;
  double residual = 0.0;
  std::string note;
};

struct CriterionReport {
  int id = 0;
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  double time_limit = 0.0;
  bool pass = true;
  std::optional<FailedCase> failure;  // first failing case
};

struct SelftestOptions {
  std::uint64_t seed = kDefaultSelftestSeed;
  double scale = 1.0;     // case counts are scaled and rounded; 0 runs nothing
  std::vector<int> only;  // empty = all criteria
};
std::vector<CriterionReport> run_selftest(const SelftestOptions& opt);

// re-runs a single generated instance
CaseOutcome replay_case(int criterion, std::uint64_t case_seed);

}  // namespace vnpair
