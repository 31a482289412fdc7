#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "spsim/analysis.hpp"
#include "spsim/detector.hpp"
#include "spsim/params.hpp"
#include "spsim/sequence.hpp"

namespace spsim {

enum class RunMode { MasterEquation, Trajectory, AnalyzeOnly, DarkLevelStudy };

const char* run_mode_name(RunMode m);

// How the cavity detuning is fixed: an explicit number, the bare two-photon
// resonance of the Raman target, or the light-shift-corrected resonance
// (default; this is what tuning to the observed resonance does).
enum class DeltaCavityMode { Explicit, BareResonance, StarkCorrectedResonance };

struct RunSettings {
  std::uint64_t n_trials = 20000;
  std::uint64_t paper_scale_trials = 12981500;  // 3500 x (4102 - 393) sequences
  std::uint64_t master_seed = 20260809;
  double output_dt_us = 0.1;
  double atol = 1e-8;
  double rtol = 1e-8;
  double pump_infidelity = 0.0;
  std::string rng = "xoshiro256++-1.0/splitmix64";
};

struct ExperimentConfig {
  int config_version = 1;
  RunMode mode = RunMode::MasterEquation;
  SystemParams system;  // delta_cavity already resolved to a number
  DeltaCavityMode delta_cavity_mode = DeltaCavityMode::StarkCorrectedResonance;
  RamanPair raman_target;
  bool dark_level = false;          // enable the artificial dark level
  double dark_decay_rate_factor = 100.0;  // rate = factor * effective_decay
  PulseSequence sequence;
  DetectorParams detector;
  AnalysisParams analysis;
  RunSettings run;
  std::string input_timetags;  // required in AnalyzeOnly mode
};

// Built-in defaults: the eight-level ion with two cavity modes and the
// standard pulsed sequence.
ExperimentConfig default_config();

// Parses and validates a JSON config. Unknown keys are rejected; all
// violations are reported together in the exception message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialized form (sorted keys, resolved units).
std::string serialize_config(const ExperimentConfig& config);

}  // namespace spsim
