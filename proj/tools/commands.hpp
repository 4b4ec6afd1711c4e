#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scene.hpp"

namespace vnpair::cli {

struct Options {
  std::string command;
  std::optional<std::string> input;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  // selftest only
  double scale = 1.0;
  std::vector<int> only;
  std::optional<std::string> replay;
};

struct Outcome {
  json report;
  int exit_code = 0;  // 0 ok, 1 validation failure, 2 parse or I/O error
};

const std::vector<std::string>& command_names();

// never throws; failures become a report with status "fail"
Outcome run_command(const Options& opt);
// the same, on an already parsed scene
Outcome run_command(const Options& opt, const Scene& scene);

// one-line summary for stderr
std::string summary(const json& report);

}  // namespace vnpair::cli
