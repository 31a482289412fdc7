#include "spsim/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spsim {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_click_stream(const std::string& path, const ClickStream& stream,
                        bool debug_origins) {
  auto f = open_out(path);
  f << "time_ps,detector";
  if (debug_origins) f << ",origin";
  f << "\n";
  for (const auto& c : stream.clicks) {
    f << c.time_ps << ',' << (c.detector == DetectorId::A ? 'A' : 'B');
    if (debug_origins) f << ',' << click_origin_name(c.origin);
    f << "\n";
  }
}

ClickStream read_click_stream(const std::string& path, double period_us,
                              std::uint64_t n_trials) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open time-tag file: " + path);
  ClickStream out;
  out.period_ps = static_cast<std::uint64_t>(std::llround(period_us * 1e6));
  out.n_trials = n_trials;
  out.span_ps = out.period_ps * n_trials;
  std::string line;
  bool header = true;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("time_ps", 0) == 0) continue;  // header row
    }
    std::istringstream ss(line);
    std::string t_str, det_str, origin_str;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, det_str, ','))
      throw std::runtime_error(path + ": malformed line " + std::to_string(lineno));
    std::getline(ss, origin_str, ',');
    Click c{};
    c.time_ps = std::stoull(t_str);
    if (det_str == "A") c.detector = DetectorId::A;
    else if (det_str == "B") c.detector = DetectorId::B;
    else throw std::runtime_error(path + ": bad detector id on line " + std::to_string(lineno));
    c.origin = ClickOrigin::Signal;
    if (origin_str == "dark") c.origin = ClickOrigin::Dark;
    else if (origin_str == "afterpulse") c.origin = ClickOrigin::Afterpulse;
    else if (origin_str == "reflection") c.origin = ClickOrigin::Reflection;
    out.clicks.push_back(c);
  }
  return out;
}

void write_evolution_record(const std::string& path, const EvolutionRecord& rec) {
  auto f = open_out(path);
  f << "time_us";
  for (const auto& l : rec.level_labels) f << ",pop_" << l;
  f << ",flux_mode1,flux_mode2\n";
  for (size_t k = 0; k < rec.times_us.size(); ++k) {
    f << format_double(rec.times_us[k]);
    for (const auto& pop : rec.populations) f << ',' << format_double(pop[k]);
    f << ',' << format_double(rec.flux_mode1[k]) << ','
      << format_double(rec.flux_mode2[k]) << "\n";
  }
}

void write_histogram(const std::string& path, const CorrelationHistogram& hist) {
  auto f = open_out(path);
  f << "# bin_us " << format_double(hist.bin_us) << "\n";
  f << "# normalized " << (hist.normalized ? 1 : 0) << "\n";
  f << "# background_subtracted " << (hist.background_subtracted ? 1 : 0) << "\n";
  f << "# rate_a_hz " << format_double(hist.rate_a_hz) << "\n";
  f << "# rate_b_hz " << format_double(hist.rate_b_hz) << "\n";
  f << "# acquisition_s " << format_double(hist.acquisition_s) << "\n";
  f << "tau_us," << (hist.normalized ? "g2" : "counts") << ",sigma\n";
  for (int i = 0; i < hist.n_bins(); ++i)
    f << format_double(hist.tau_us(i)) << ',' << format_double(hist.counts[i]) << ','
      << format_double(std::sqrt(std::max(0.0, hist.variance[i]))) << "\n";
}

void write_pulse_shape(const std::string& path, const PulseShape& shape) {
  auto f = open_out(path);
  f << "# bin_us " << format_double(shape.bin_us) << "\n";
  f << "# n_trials " << shape.n_trials << "\n";
  f << "# area " << format_double(shape.area()) << "\n";
  f << "t_us,probability\n";
  for (size_t i = 0; i < shape.probability.size(); ++i)
    f << format_double((static_cast<double>(i) + 0.5) * shape.bin_us) << ','
      << format_double(shape.probability[i]) << "\n";
}

void write_emission_records(const std::string& path,
                            const std::vector<EmissionRecord>& records) {
  auto f = open_out(path);
  f << "trial,time_us,channel\n";
  for (const auto& rec : records)
    for (const auto& e : rec.events)
      f << rec.trial << ',' << format_double(e.time_us) << ','
        << emission_channel_name(e.channel) << "\n";
}

void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
  auto f = open_out(path);
  for (const auto& [k, v] : entries) f << k << " = " << v << "\n";
}

}  // namespace spsim
