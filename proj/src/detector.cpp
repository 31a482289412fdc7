#include "spsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spsim/rng.hpp"

namespace spsim {

void DetectorParams::validate() const {
  std::ostringstream errs;
  auto prob = [&](double p, const char* name) {
    if (p < 0.0 || p > 1.0) errs << name << " must be in [0,1]; ";
  };
  prob(path_efficiency, "path_efficiency");
  prob(qe_a, "qe_a");
  prob(qe_b, "qe_b");
  prob(afterpulse_prob, "afterpulse_prob");
  prob(reflection_prob, "reflection_prob");
  if (dark_rate_hz < 0.0) errs << "dark_rate_hz must be >= 0; ";
  if (!(afterpulse_window_us > 0.0)) errs << "afterpulse_window_us must be > 0; ";
  if (!(reflection_delay_ns > 0.0)) errs << "reflection_delay_ns must be > 0; ";
  if (!(reflection_jitter_ns > 0.0)) errs << "reflection_jitter_ns must be > 0; ";
  if (!(quantization_ps > 0.0)) errs << "quantization_ps must be > 0; ";
  if (physical_dead_time_ns < 0.0) errs << "physical_dead_time_ns must be >= 0; ";
  const std::string msg = errs.str();
  if (!msg.empty()) throw std::invalid_argument("invalid DetectorParams: " + msg);
}

const char* click_origin_name(ClickOrigin o) {
  switch (o) {
    case ClickOrigin::Signal: return "signal";
    case ClickOrigin::Dark: return "dark";
    case ClickOrigin::Afterpulse: return "afterpulse";
    case ClickOrigin::Reflection: return "reflection";
  }
  return "?";
}

std::vector<std::uint64_t> ClickStream::times(DetectorId d) const {
  std::vector<std::uint64_t> out;
  for (const auto& c : clicks)
    if (c.detector == d) out.push_back(c.time_ps);
  return out;
}

namespace {

bool click_less(const Click& a, const Click& b) {
  if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
  if (a.detector != b.detector) return a.detector < b.detector;
  return a.origin < b.origin;
}

struct ChainBuilder {
  const DetectorParams& det;
  std::uint64_t period_ps;
  Xoshiro256pp signal_rng;
  std::vector<Click> clicks;

  void add_trial(std::uint64_t trial_index, const EmissionRecord& rec) {
    for (const auto& e : rec.events) {
      if (e.channel != EmissionChannel::CavityMode1 &&
          e.channel != EmissionChannel::CavityMode2)
        continue;
      if (!signal_rng.bernoulli(det.path_efficiency)) continue;
      const bool to_a = signal_rng.uniform() < 0.5;
      if (!signal_rng.bernoulli(to_a ? det.qe_a : det.qe_b)) continue;
      const std::uint64_t t =
          trial_index * period_ps +
          static_cast<std::uint64_t>(std::llround(e.time_us * 1e6));
      clicks.push_back({t, to_a ? DetectorId::A : DetectorId::B, ClickOrigin::Signal});
    }
  }
};

}  // namespace

static ClickStream assemble_stream(ChainBuilder& builder, std::uint64_t n_trials,
                                   std::uint64_t period_ps, const DetectorParams& det,
                                   std::uint64_t seed) {
  ClickStream out;
  out.n_trials = n_trials;
  out.period_ps = period_ps;
  out.span_ps = n_trials * period_ps;
  auto& clicks = builder.clicks;

  // Poissonian dark counts per APD over the full span.
  const double rate_per_ps = det.dark_rate_hz * 1e-12;
  if (rate_per_ps > 0.0) {
    for (int d = 0; d < 2; ++d) {
      auto rng = Xoshiro256pp::stream(seed, 1000 + static_cast<std::uint64_t>(d));
      double t = rng.exponential(rate_per_ps);
      while (t < static_cast<double>(out.span_ps)) {
        clicks.push_back({static_cast<std::uint64_t>(t),
                          static_cast<DetectorId>(d), ClickOrigin::Dark});
        t += rng.exponential(rate_per_ps);
      }
    }
  }
  std::sort(clicks.begin(), clicks.end(), click_less);

  // Reflection artifact: a detection flash on one APD returns from the
  // cavity output mirror to the other APD inside a narrow window.
  if (det.reflection_prob > 0.0) {
    auto rng = Xoshiro256pp::stream(seed, 2000);
    std::vector<Click> reflections;
    for (const auto& c : clicks) {
      if (!rng.bernoulli(det.reflection_prob)) continue;
      const double jitter = (rng.uniform() - 0.5) * det.reflection_jitter_ns * 1e3;
      const auto offset = static_cast<std::int64_t>(
          std::llround(det.reflection_delay_ns * 1e3 + jitter));
      reflections.push_back({c.time_ps + static_cast<std::uint64_t>(offset),
                             c.detector == DetectorId::A ? DetectorId::B : DetectorId::A,
                             ClickOrigin::Reflection});
    }
    clicks.insert(clicks.end(), reflections.begin(), reflections.end());
    std::sort(clicks.begin(), clicks.end(), click_less);
  }

  // Afterpulses: every real avalanche (signal, dark or reflection) may
  // retrigger the same APD once within the afterpulse window.
  if (det.afterpulse_prob > 0.0) {
    auto rng = Xoshiro256pp::stream(seed, 3000);
    std::vector<Click> afterpulses;
    for (const auto& c : clicks) {
      if (c.origin == ClickOrigin::Afterpulse) continue;
      if (!rng.bernoulli(det.afterpulse_prob)) continue;
      const double offset_us = det.afterpulse_window_us * rng.uniform_pos();
      afterpulses.push_back({c.time_ps + static_cast<std::uint64_t>(
                                              std::llround(offset_us * 1e6)),
                             c.detector, ClickOrigin::Afterpulse});
    }
    clicks.insert(clicks.end(), afterpulses.begin(), afterpulses.end());
    std::sort(clicks.begin(), clicks.end(), click_less);
  }

  // Physical dead time per APD, then quantization to the timestamp grid.
  const auto dead_ps =
      static_cast<std::uint64_t>(std::llround(det.physical_dead_time_ns * 1e3));
  std::uint64_t last_accepted[2] = {0, 0};
  bool seen[2] = {false, false};
  std::vector<Click> pruned;
  pruned.reserve(clicks.size());
  for (const auto& c : clicks) {
    const int d = static_cast<int>(c.detector);
    if (seen[d] && c.time_ps - last_accepted[d] < dead_ps) continue;
    seen[d] = true;
    last_accepted[d] = c.time_ps;
    pruned.push_back(c);
  }
  const auto q = static_cast<std::uint64_t>(std::llround(det.quantization_ps));
  for (auto& c : pruned) c.time_ps = (c.time_ps / q) * q;

  out.clicks = std::move(pruned);
  return out;
}

ClickStream detect(std::span<const EmissionRecord> records, double period_us,
                   const DetectorParams& det, std::uint64_t seed) {
  det.validate();
  const auto period_ps = static_cast<std::uint64_t>(std::llround(period_us * 1e6));
  ChainBuilder builder{det, period_ps, Xoshiro256pp::stream(seed, 0), {}};
  std::uint64_t n_trials = 0;
  for (const auto& rec : records) {
    builder.add_trial(rec.trial, rec);
    n_trials = std::max(n_trials, rec.trial + 1);
  }
  return assemble_stream(builder, n_trials, period_ps, det, seed);
}

ClickStream detect_resampled(std::span<const EmissionRecord> pool, std::uint64_t n_trials,
                             double period_us, const DetectorParams& det,
                             std::uint64_t seed) {
  det.validate();
  if (pool.empty()) throw std::invalid_argument("detect_resampled: empty pool");
  const auto period_ps = static_cast<std::uint64_t>(std::llround(period_us * 1e6));
  ChainBuilder builder{det, period_ps, Xoshiro256pp::stream(seed, 0), {}};
  auto pick = Xoshiro256pp::stream(seed, 4000);
  for (std::uint64_t trial = 0; trial < n_trials; ++trial) {
    const auto& rec = pool[static_cast<size_t>(pick.next() % pool.size())];
    builder.add_trial(trial, rec);
  }
  return assemble_stream(builder, n_trials, period_ps, det, seed);
}

}  // namespace spsim
