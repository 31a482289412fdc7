#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spsim/trajectory.hpp"

namespace spsim {

struct DetectorParams {
  // Transmission from the cavity output to the beamsplitter input
  // (mirror, fibre, filters). Combined with the APD quantum efficiencies
  // this gives the total cavity-photon detection probability.
  double path_efficiency = 0.1458;
  double qe_a = 0.41;
  double qe_b = 0.42;
  double dark_rate_hz = 4.0;          // per APD
  double physical_dead_time_ns = 50.0;
  double afterpulse_prob = 0.011;
  double afterpulse_window_us = 2.5;
  double reflection_prob = 0.01;
  double reflection_delay_ns = 125.0;
  double reflection_jitter_ns = 20.0;  // full window width around the delay
  double quantization_ps = 4.0;

  // Throws std::invalid_argument listing violations.
  void validate() const;
  double mean_qe() const { return 0.5 * (qe_a + qe_b); }
  // Probability that a photon leaving the cavity produces a click on either APD.
  double total_detection_efficiency() const { return path_efficiency * mean_qe(); }
};

enum class DetectorId : std::uint8_t { A = 0, B = 1 };
enum class ClickOrigin : std::uint8_t { Signal = 0, Dark = 1, Afterpulse = 2, Reflection = 3 };

const char* click_origin_name(ClickOrigin o);

struct Click {
  std::uint64_t time_ps;
  DetectorId detector;
  ClickOrigin origin;  // simulation-only metadata, not an analysis input
};

struct ClickStream {
  std::vector<Click> clicks;
  std::uint64_t span_ps = 0;  // acquisition length
  std::uint64_t n_trials = 0;
  std::uint64_t period_ps = 0;

  std::vector<std::uint64_t> times(DetectorId d) const;
  double span_seconds() const { return static_cast<double>(span_ps) * 1e-12; }
};

// Transforms cavity emission records into APD click streams: output-path
// loss, 50/50 routing, per-APD quantum efficiency, Poissonian dark counts,
// afterpulses, the inter-detector reflection artifact, physical dead time,
// and quantization to the timestamp grid.
ClickStream detect(std::span<const EmissionRecord> records, double period_us,
                   const DetectorParams& det, std::uint64_t seed);

// Streaming variant used at large trial counts: trials are drawn (with
// replacement) from the emission-record pool until n_trials periods have
// been synthesized.
ClickStream detect_resampled(std::span<const EmissionRecord> pool, std::uint64_t n_trials,
                             double period_us, const DetectorParams& det,
                             std::uint64_t seed);

}  // namespace spsim
