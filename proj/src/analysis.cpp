#include "spsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spsim {

void AnalysisParams::validate() const {
  std::ostringstream errs;
  if (!(g2_bin_us > 0.0)) errs << "g2_bin_us must be > 0; ";
  if (!(g2_range_us > 0.0)) errs << "g2_range_us must be > 0; ";
  if (analysis_dead_time_us < 0.0) errs << "analysis_dead_time_us must be >= 0; ";
  if (!(pulse_bin_us > 0.0)) errs << "pulse_bin_us must be > 0; ";
  if (!(suppression_window_us > 0.0)) errs << "suppression_window_us must be > 0; ";
  if (!(eta_det > 0.0)) errs << "eta_det must be > 0; ";
  if (eta_det_uncertainty < 0.0) errs << "eta_det_uncertainty must be >= 0; ";
  const std::string msg = errs.str();
  if (!msg.empty()) throw std::invalid_argument("invalid AnalysisParams: " + msg);
}

double CorrelationHistogram::total() const {
  double s = 0.0;
  for (double c : counts) s += c;
  return s;
}

double PulseShape::area() const {
  double s = 0.0;
  for (double p : probability) s += p;
  return s;
}

ClickStream apply_analysis_dead_time(const ClickStream& stream, double dead_us) {
  const auto dead_ps = static_cast<std::uint64_t>(std::llround(dead_us * 1e6));
  ClickStream out = stream;
  out.clicks.clear();
  std::uint64_t last[2] = {0, 0};
  bool seen[2] = {false, false};
  for (const auto& c : stream.clicks) {
    const int d = static_cast<int>(c.detector);
    if (seen[d] && c.time_ps - last[d] < dead_ps) continue;
    seen[d] = true;
    last[d] = c.time_ps;
    out.clicks.push_back(c);
  }
  return out;
}

CorrelationHistogram cross_correlate(const std::vector<std::uint64_t>& a_times,
                                     const std::vector<std::uint64_t>& b_times,
                                     double bin_us, double range_us,
                                     double reflection_delay_ns,
                                     double reflection_exclude_halfwidth_ns) {
  if (!(bin_us > 0.0)) throw std::domain_error("cross_correlate: bin must be > 0");
  if (!(range_us >= bin_us)) throw std::domain_error("cross_correlate: range too small");

  CorrelationHistogram h;
  h.bin_us = bin_us;
  h.half_bins = static_cast<int>(std::llround(range_us / bin_us));
  h.counts.assign(h.n_bins(), 0.0);

  const auto bin_ps = static_cast<std::int64_t>(std::llround(bin_us * 1e6));
  // Pairs out to the edge of the outermost bin.
  const std::int64_t max_tau =
      static_cast<std::int64_t>(h.half_bins) * bin_ps + bin_ps / 2;
  const auto refl_ps = static_cast<std::int64_t>(std::llround(reflection_delay_ns * 1e3));
  const auto excl_ps =
      static_cast<std::int64_t>(std::llround(reflection_exclude_halfwidth_ns * 1e3));

  // Signed symmetric binning: k = sign(tau) * floor((|tau| + bin/2) / bin).
  auto bin_of = [&](std::int64_t tau) {
    const std::int64_t mag = std::abs(tau);
    const std::int64_t k = (mag + bin_ps / 2) / bin_ps;
    return (tau < 0) ? -static_cast<int>(k) : static_cast<int>(k);
  };

  size_t lo = 0;
  for (const auto ta : a_times) {
    while (lo < b_times.size() &&
           static_cast<std::int64_t>(b_times[lo]) - static_cast<std::int64_t>(ta) < -max_tau)
      ++lo;
    for (size_t j = lo; j < b_times.size(); ++j) {
      const std::int64_t tau =
          static_cast<std::int64_t>(b_times[j]) - static_cast<std::int64_t>(ta);
      if (tau > max_tau) break;
      if (std::abs(std::abs(tau) - refl_ps) <= excl_ps) continue;
      const int k = bin_of(tau);
      if (std::abs(k) > h.half_bins) continue;
      h.counts[static_cast<size_t>(k + h.half_bins)] += 1.0;
    }
  }
  h.variance = h.counts;  // Poisson
  return h;
}

CorrelationHistogram normalize_g2(CorrelationHistogram hist, double rate_a_hz,
                                  double rate_b_hz, double acquisition_s) {
  if (!(rate_a_hz > 0.0) || !(rate_b_hz > 0.0))
    throw std::domain_error("normalize_g2: zero singles rate");
  if (!(acquisition_s > 0.0)) throw std::domain_error("normalize_g2: zero acquisition time");
  const double denom = rate_a_hz * rate_b_hz * acquisition_s * hist.bin_us * 1e-6;
  for (auto& c : hist.counts) c /= denom;
  for (auto& v : hist.variance) v /= denom * denom;
  hist.rate_a_hz = rate_a_hz;
  hist.rate_b_hz = rate_b_hz;
  hist.acquisition_s = acquisition_s;
  hist.normalized = true;
  return hist;
}

CorrelationHistogram background_subtract(CorrelationHistogram hist, double dark_a_hz,
                                         double dark_b_hz, double rate_a_hz,
                                         double rate_b_hz, double acquisition_s) {
  if (hist.normalized)
    throw std::domain_error("background_subtract: subtract before normalizing");
  const double acc = (rate_a_hz * dark_b_hz + dark_a_hz * rate_b_hz -
                      dark_a_hz * dark_b_hz) *
                     acquisition_s * hist.bin_us * 1e-6;
  for (auto& c : hist.counts) c -= acc;
  // Poisson uncertainty of the raw counts plus the accidental estimate.
  for (auto& v : hist.variance) {
    v += std::abs(acc);
    if (v < 0.0) throw std::domain_error("background_subtract: negative variance");
  }
  hist.rate_a_hz = rate_a_hz;
  hist.rate_b_hz = rate_b_hz;
  hist.acquisition_s = acquisition_s;
  hist.background_subtracted = true;
  return hist;
}

PulseShape pulse_shape(const ClickStream& stream, double bin_us) {
  if (!(bin_us > 0.0)) throw std::domain_error("pulse_shape: bin must be > 0");
  if (stream.period_ps == 0 || stream.n_trials == 0)
    throw std::invalid_argument("pulse_shape: stream lacks trial metadata");
  PulseShape shape;
  shape.bin_us = bin_us;
  shape.n_trials = stream.n_trials;
  const auto bin_ps = static_cast<std::uint64_t>(std::llround(bin_us * 1e6));
  const size_t n_bins = static_cast<size_t>((stream.period_ps + bin_ps - 1) / bin_ps);
  std::vector<std::uint64_t> counts(n_bins, 0);
  for (const auto& c : stream.clicks) {
    const std::uint64_t in_period = c.time_ps % stream.period_ps;
    ++counts[static_cast<size_t>(in_period / bin_ps)];
    ++shape.n_clicks;
  }
  shape.probability.resize(n_bins);
  for (size_t i = 0; i < n_bins; ++i)
    shape.probability[i] =
        static_cast<double>(counts[i]) / static_cast<double>(stream.n_trials);
  return shape;
}

ValueWithError creation_efficiency_from_data(const PulseShape& shape, double eta_det,
                                             double eta_det_uncertainty) {
  if (!(eta_det > 0.0))
    throw std::domain_error("creation_efficiency_from_data: eta_det must be > 0");
  const double area = shape.area();
  ValueWithError out;
  out.value = area / eta_det;
  if (area <= 0.0) return out;
  const double rel_area =
      (shape.n_clicks > 0)
          ? 1.0 / std::sqrt(static_cast<double>(shape.n_clicks))
          : 0.0;
  const double rel_eta = eta_det_uncertainty / eta_det;
  out.error = out.value * std::sqrt(rel_area * rel_area + rel_eta * rel_eta);
  return out;
}

ValueWithError suppression_metric(const CorrelationHistogram& hist, double window_us) {
  if (window_us > hist.half_bins * hist.bin_us + 0.5 * hist.bin_us)
    throw std::domain_error("suppression_metric: window exceeds histogram range");
  ValueWithError out;
  double var = 0.0;
  for (int i = 0; i < hist.n_bins(); ++i) {
    if (std::abs(hist.tau_us(i)) <= window_us + 1e-9) {
      out.value += hist.counts[i];
      var += hist.variance[i];
    }
  }
  out.error = std::sqrt(var);
  return out;
}

double singles_rate(const ClickStream& stream, DetectorId d) {
  if (stream.span_ps == 0) return 0.0;
  std::uint64_t n = 0;
  for (const auto& c : stream.clicks)
    if (c.detector == d) ++n;
  return static_cast<double>(n) / stream.span_seconds();
}

double dark_rate_from_tail(const ClickStream& stream, DetectorId d, double tail_us) {
  if (stream.period_ps == 0 || stream.n_trials == 0)
    throw std::invalid_argument("dark_rate_from_tail: stream lacks trial metadata");
  const auto tail_ps = static_cast<std::uint64_t>(std::llround(tail_us * 1e6));
  if (tail_ps >= stream.period_ps)
    throw std::domain_error("dark_rate_from_tail: tail longer than period");
  const std::uint64_t start = stream.period_ps - tail_ps;
  std::uint64_t n = 0;
  for (const auto& c : stream.clicks)
    if (c.detector == d && (c.time_ps % stream.period_ps) >= start) ++n;
  const double window_s =
      static_cast<double>(stream.n_trials) * static_cast<double>(tail_ps) * 1e-12;
  return (window_s > 0.0) ? static_cast<double>(n) / window_s : 0.0;
}

}  // namespace spsim
