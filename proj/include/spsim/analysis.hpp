#pragma once

#include <cstdint>
#include <vector>

#include "spsim/detector.hpp"

namespace spsim {

struct AnalysisParams {
  double g2_bin_us = 1.0;
  double g2_range_us = 1450.0;
  double analysis_dead_time_us = 2.5;
  double pulse_bin_us = 0.5;
  double suppression_window_us = 207.25;
  double reflection_delay_ns = 125.0;
  double reflection_exclude_halfwidth_ns = 10.0;
  double eta_det = 0.051;          // assumed cavity-photon detection efficiency
  double eta_det_uncertainty = 0.010;
  double dark_tail_us = 100.0;     // tail of each period used for dark-rate estimation

  void validate() const;
};

// Symmetric coincidence histogram: bin k (centered on k * bin_us) counts
// pairs with t_B - t_A in [k*bin - bin/2, k*bin + bin/2).
struct CorrelationHistogram {
  double bin_us = 0.0;
  int half_bins = 0;  // bins run over k = -half_bins .. +half_bins
  std::vector<double> counts;
  std::vector<double> variance;
  double rate_a_hz = 0.0;
  double rate_b_hz = 0.0;
  double acquisition_s = 0.0;
  bool normalized = false;
  bool background_subtracted = false;

  int n_bins() const { return 2 * half_bins + 1; }
  double tau_us(int i) const { return (i - half_bins) * bin_us; }
  double total() const;
};

struct PulseShape {
  double bin_us = 0.0;
  std::vector<double> probability;  // detection probability per bin per trial
  std::uint64_t n_trials = 0;
  std::uint64_t n_clicks = 0;

  double area() const;  // detection probability per trial
};

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};

// Removes every click within `dead_us` after an accepted click on the same
// detector (the detectors are treated independently).
ClickStream apply_analysis_dead_time(const ClickStream& stream, double dead_us = 2.5);

// Cross-correlation histogram of t_B - t_A for |tau| <= range. Pairs whose
// |tau| falls within the reflection exclusion window around the reflection
// delay are discarded. Throws std::domain_error for non-positive bins.
CorrelationHistogram cross_correlate(const std::vector<std::uint64_t>& a_times_ps,
                                     const std::vector<std::uint64_t>& b_times_ps,
                                     double bin_us, double range_us,
                                     double reflection_delay_ns = 125.0,
                                     double reflection_exclude_halfwidth_ns = 10.0);

// g2(tau_k) = counts_k / (r_A * r_B * T * bin). Throws on zero rates.
CorrelationHistogram normalize_g2(CorrelationHistogram hist, double rate_a_hz,
                                  double rate_b_hz, double acquisition_s);

// Subtracts the expected accidental count
// (r_A*dark_B + dark_A*r_B - dark_A*dark_B) * T * bin from every bin and
// propagates the uncertainty.
CorrelationHistogram background_subtract(CorrelationHistogram hist, double dark_a_hz,
                                         double dark_b_hz, double rate_a_hz,
                                         double rate_b_hz, double acquisition_s);

// Probability per time bin of detecting a click at a given delay from the
// trial start, folded over all trials; area equals the per-trial detection
// probability.
PulseShape pulse_shape(const ClickStream& stream, double bin_us = 0.5);

// eta_c = area / eta_det with relative uncertainties combined in quadrature.
ValueWithError creation_efficiency_from_data(const PulseShape& shape, double eta_det,
                                             double eta_det_uncertainty);

// Sum of histogram bins with |tau| <= window and its propagated uncertainty.
// Throws std::domain_error when the window exceeds the histogram range.
ValueWithError suppression_metric(const CorrelationHistogram& hist, double window_us = 207.25);

// Mean singles rate per detector over the stream span, in Hz.
double singles_rate(const ClickStream& stream, DetectorId d);

// Dark-rate estimate from the tail of each period where the signal flux is
// negligible.
double dark_rate_from_tail(const ClickStream& stream, DetectorId d, double tail_us = 100.0);

}  // namespace spsim
