#pragma once

#include <string>
#include <vector>

#include "spsim/config.hpp"

namespace spsim {

struct RunFlags {
  bool paper_scale = false;
  bool debug_origins = false;
};

// Headline numbers of a completed run, mirrored into summary.txt.
struct RunResult {
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> files;

  double get(const std::string& key) const;  // throws if absent or non-numeric
  bool has(const std::string& key) const;
};

// Executes the configured pipeline and writes the artifact bundle (CSVs,
// summary.txt, config_resolved.json) into out_dir.
RunResult run(const ExperimentConfig& config, const std::string& out_dir,
              const RunFlags& flags = {});

// Writes plotting scripts (one per figure) referencing the bundle CSVs.
// Throws std::runtime_error itemizing every figure whose inputs are missing.
std::vector<std::string> emit_figures(const std::string& bundle_dir);

}  // namespace spsim
