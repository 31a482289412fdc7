#pragma once

#include <map>
#include <string>
#include <vector>

#include "spsim/analysis.hpp"
#include "spsim/detector.hpp"
#include "spsim/master_equation.hpp"
#include "spsim/trajectory.hpp"

namespace spsim {

// Canonical time-tag format: CSV with header `time_ps,detector`; origin tags
// are exported as a third column only when debug_origins is set.
void write_click_stream(const std::string& path, const ClickStream& stream,
                        bool debug_origins = false);

// Reads the canonical format (with or without the origin column). Trial
// metadata is supplied by the caller since external exports do not carry it.
ClickStream read_click_stream(const std::string& path, double period_us,
                              std::uint64_t n_trials);

// time_us, pop_<level>..., flux_mode1, flux_mode2
void write_evolution_record(const std::string& path, const EvolutionRecord& rec);

// tau_us, counts (or g2), sigma; metadata as leading '#' lines.
void write_histogram(const std::string& path, const CorrelationHistogram& hist);

// t_us, probability; metadata as leading '#' lines.
void write_pulse_shape(const std::string& path, const PulseShape& shape);

// trial, time_us, channel
void write_emission_records(const std::string& path,
                            const std::vector<EmissionRecord>& records);

// Plain `key = value` lines, keys written in insertion order.
void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries);

std::string format_double(double v);

}  // namespace spsim
