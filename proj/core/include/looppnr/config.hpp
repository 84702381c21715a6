#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "looppnr/harness.hpp"

namespace looppnr {

/// Everything one CLI invocation needs; persisted as JSON.
///
/// Unknown keys are rejected on load so typos cannot silently fall back to
/// defaults.
struct RunConfig {
  EnsembleConfig ensemble;
  std::string output_dir = "out";
  bool dump_belief = false;
  unsigned threads = 0;
  /// Loop efficiencies visited by `sweep`; empty means ensemble.params.eta alone.
  std::vector<double> eta_values;

  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

[[nodiscard]] std::string to_json_text(const RunConfig& config);
[[nodiscard]] RunConfig run_config_from_json_text(const std::string& text);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace looppnr
