#include "spsim/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spsim/io.hpp"

namespace spsim {

namespace fs = std::filesystem;

double RunResult::get(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return std::stod(v);
  throw std::out_of_range("summary key not found: " + key);
}

bool RunResult::has(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return true;
  return false;
}

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void add(RunResult& r, const std::string& key, double value) {
  r.summary.emplace_back(key, format_double(value));
}

// Detection probability per pulse-shape bin implied by the master-equation
// flux, scaled by the detection chain efficiency.
PulseShape simulated_pulse_shape(const EvolutionRecord& rec, double period_us,
                                 double bin_us, double chain_efficiency) {
  PulseShape shape;
  shape.bin_us = bin_us;
  shape.n_trials = 1;
  const size_t n_bins = static_cast<size_t>(std::ceil(period_us / bin_us - 1e-9));
  shape.probability.assign(n_bins, 0.0);
  for (size_t k = 0; k + 1 < rec.times_us.size(); ++k) {
    const double ta = rec.times_us[k], tb = rec.times_us[k + 1];
    const double fa = rec.flux_mode1[k] + rec.flux_mode2[k];
    const double fb = rec.flux_mode1[k + 1] + rec.flux_mode2[k + 1];
    const double mid = 0.5 * (ta + tb);
    const auto bin = static_cast<size_t>(mid / bin_us);
    if (bin < n_bins)
      shape.probability[bin] += 0.5 * (fa + fb) * (tb - ta) * chain_efficiency;
  }
  return shape;
}

EvolutionRecord run_master_equation(const ExperimentConfig& c, const std::string& out,
                                    RunResult& result) {
  IntegrateOptions opts;
  opts.output_dt_us = c.run.output_dt_us;
  opts.atol = c.run.atol;
  opts.rtol = c.run.rtol;
  const DenseOp rho0 = initial_state(c.system, c.run.pump_infidelity);
  opts.reset_state = rho0;
  const EvolutionRecord rec = integrate(c.system, c.sequence, rho0, opts);

  write_evolution_record(join(out, "evolution.csv"), rec);
  result.files.push_back("evolution.csv");

  const PulseShape sim = simulated_pulse_shape(
      rec, c.sequence.period_us(), c.analysis.pulse_bin_us,
      c.detector.total_detection_efficiency());
  write_pulse_shape(join(out, "pulse_sim.csv"), sim);
  result.files.push_back("pulse_sim.csv");

  const Basis basis(c.system);
  const int target = basis.scheme.find(Manifold::D32, -1).index;
  const double drive_end =
      c.sequence.segment_start_us(c.sequence.drive_segment()) +
      c.sequence.segments[c.sequence.drive_segment()].duration_us;
  double final_target = 0.0;
  double max_p = 0.0;
  for (size_t k = 0; k < rec.times_us.size(); ++k) {
    double p_tot = 0.0;
    for (const auto& l : basis.scheme.levels())
      if (l.manifold == Manifold::P12) p_tot += rec.populations[l.index][k];
    max_p = std::max(max_p, p_tot);
    if (std::abs(rec.times_us[k] - drive_end) < 0.5 * c.run.output_dt_us)
      final_target = rec.populations[target][k];
  }

  add(result, "creation_efficiency", rec.efficiency);
  add(result, "final_target_population", final_target);
  add(result, "max_p_population", max_p);
  add(result, "simulated_eta_exp",
      rec.efficiency * c.detector.total_detection_efficiency());
  return rec;
}

void analyze_stream(const ExperimentConfig& c, ClickStream stream,
                    const std::string& out, RunResult& result) {
  const auto& ap = c.analysis;
  stream = apply_analysis_dead_time(stream, ap.analysis_dead_time_us);

  const double r_a = singles_rate(stream, DetectorId::A);
  const double r_b = singles_rate(stream, DetectorId::B);
  const double dark_a = dark_rate_from_tail(stream, DetectorId::A, ap.dark_tail_us);
  const double dark_b = dark_rate_from_tail(stream, DetectorId::B, ap.dark_tail_us);
  const double acq_s = stream.span_seconds();

  const auto a_times = stream.times(DetectorId::A);
  const auto b_times = stream.times(DetectorId::B);

  CorrelationHistogram raw = cross_correlate(
      a_times, b_times, ap.g2_bin_us, ap.g2_range_us, ap.reflection_delay_ns,
      ap.reflection_exclude_halfwidth_ns);
  write_histogram(join(out, "g2_raw.csv"), raw);
  result.files.push_back("g2_raw.csv");

  CorrelationHistogram subtracted =
      background_subtract(raw, dark_a, dark_b, r_a, r_b, acq_s);
  const auto supp_raw = suppression_metric(raw, ap.suppression_window_us);
  const auto supp_sub = suppression_metric(subtracted, ap.suppression_window_us);

  if (r_a > 0.0 && r_b > 0.0) {
    const CorrelationHistogram g2 = normalize_g2(subtracted, r_a, r_b, acq_s);
    write_histogram(join(out, "g2.csv"), g2);
    result.files.push_back("g2.csv");
  }

  const PulseShape shape = pulse_shape(stream, ap.pulse_bin_us);
  write_pulse_shape(join(out, "pulse_data.csv"), shape);
  result.files.push_back("pulse_data.csv");
  const auto eta_c =
      creation_efficiency_from_data(shape, ap.eta_det, ap.eta_det_uncertainty);

  add(result, "singles_total", static_cast<double>(stream.clicks.size()));
  add(result, "rate_a_hz", r_a);
  add(result, "rate_b_hz", r_b);
  add(result, "dark_rate_est_a_hz", dark_a);
  add(result, "dark_rate_est_b_hz", dark_b);
  add(result, "eta_exp", shape.area());
  add(result, "eta_c", eta_c.value);
  add(result, "eta_c_err", eta_c.error);
  add(result, "suppression_raw_counts", supp_raw.value);
  add(result, "suppression_raw_err", supp_raw.error);
  add(result, "suppression_subtracted_counts", supp_sub.value);
  add(result, "suppression_subtracted_err", supp_sub.error);
}

void run_trajectory_mode(const ExperimentConfig& c, const std::string& out,
                         const RunFlags& flags, RunResult& result) {
  const TrajectoryEngine engine(c.system, c.sequence, c.run.pump_infidelity);
  const auto ensemble = run_ensemble(engine, c.run.n_trials, c.run.master_seed);

  write_emission_records(join(out, "emissions.csv"), ensemble.records);
  result.files.push_back("emissions.csv");

  std::uint64_t cavity_events = 0, trials_with_photon = 0;
  for (const auto& rec : ensemble.records) {
    bool any = false;
    for (const auto& e : rec.events)
      if (e.channel == EmissionChannel::CavityMode1 ||
          e.channel == EmissionChannel::CavityMode2) {
        ++cavity_events;
        any = true;
      }
    if (any) ++trials_with_photon;
  }
  add(result, "n_trials", static_cast<double>(c.run.n_trials));
  add(result, "cavity_photons_per_trial",
      static_cast<double>(cavity_events) / static_cast<double>(c.run.n_trials));
  add(result, "trials_with_photon_fraction",
      static_cast<double>(trials_with_photon) / static_cast<double>(c.run.n_trials));

  ClickStream stream;
  if (flags.paper_scale) {
    stream = detect_resampled(ensemble.records, c.run.paper_scale_trials,
                              c.sequence.period_us(), c.detector, c.run.master_seed);
    add(result, "detected_trials", static_cast<double>(c.run.paper_scale_trials));
  } else {
    stream = detect(ensemble.records, c.sequence.period_us(), c.detector,
                    c.run.master_seed);
    add(result, "detected_trials", static_cast<double>(c.run.n_trials));
  }
  std::uint64_t signal_clicks = 0;
  for (const auto& click : stream.clicks)
    if (click.origin == ClickOrigin::Signal) ++signal_clicks;
  add(result, "signal_clicks", static_cast<double>(signal_clicks));

  write_click_stream(join(out, "clickstream.csv"), stream, flags.debug_origins);
  result.files.push_back("clickstream.csv");

  analyze_stream(c, std::move(stream), out, result);

  // Master-equation reference for the simulated pulse-shape overlay.
  run_master_equation(c, out, result);
}

void run_dark_study(const ExperimentConfig& c, const std::string& out, RunResult& result) {
  IntegrateOptions opts;
  opts.output_dt_us = std::max(c.run.output_dt_us, 0.1);
  opts.atol = c.run.atol;
  opts.rtol = c.run.rtol;

  std::ofstream table(join(out, "dark_study.csv"));
  table << "drive_us,efficiency,scatter_free_fraction\n";
  result.files.push_back("dark_study.csv");

  for (const double drive_us : {120.0, 12.0}) {
    const PulseSequence seq = with_drive_duration(c.sequence, drive_us);
    SystemParams with_dark = c.system;
    if (!with_dark.dark_enabled())
      with_dark.dark_decay_rate = c.dark_decay_rate_factor * effective_decay(c.system);
    SystemParams no_dark = with_dark;
    no_dark.dark_decay_rate = 0.0;

    const auto rec_off = integrate(no_dark, seq, initial_state(no_dark), opts);
    const auto rec_on = integrate(with_dark, seq, initial_state(with_dark), opts);
    const double eff = creation_efficiency(rec_off, seq);
    const double fraction = creation_efficiency(rec_on, seq) / eff;

    table << format_double(drive_us) << ',' << format_double(eff) << ','
          << format_double(fraction) << "\n";
    const std::string tag = (drive_us == 120.0) ? "120us" : "12us";
    add(result, "efficiency_" + tag, eff);
    add(result, "scatter_free_fraction_" + tag, fraction);
  }
}

}  // namespace

RunResult run(const ExperimentConfig& config, const std::string& out_dir,
              const RunFlags& flags) {
  fs::create_directories(out_dir);
  RunResult result;

  std::ofstream cfg(join(out_dir, "config_resolved.json"));
  cfg << serialize_config(config);
  result.files.push_back("config_resolved.json");

  switch (config.mode) {
    case RunMode::MasterEquation:
      run_master_equation(config, out_dir, result);
      break;
    case RunMode::Trajectory:
      run_trajectory_mode(config, out_dir, flags, result);
      break;
    case RunMode::AnalyzeOnly: {
      const std::uint64_t trials =
          flags.paper_scale ? config.run.paper_scale_trials : config.run.n_trials;
      ClickStream stream =
          read_click_stream(config.input_timetags, config.sequence.period_us(), trials);
      analyze_stream(config, std::move(stream), out_dir, result);
      break;
    }
    case RunMode::DarkLevelStudy:
      run_dark_study(config, out_dir, result);
      break;
  }

  write_summary(join(out_dir, "summary.txt"), result.summary);
  result.files.push_back("summary.txt");
  return result;
}

namespace {

void write_script(const std::string& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << body;
}

}  // namespace

std::vector<std::string> emit_figures(const std::string& bundle_dir) {
  std::vector<std::string> written;
  std::vector<std::string> missing;
  auto exists = [&](const char* name) { return fs::exists(fs::path(bundle_dir) / name); };

  if (!exists("g2.csv")) missing.push_back("fig_g2: needs g2.csv");
  if (!exists("pulse_data.csv") && !exists("pulse_sim.csv"))
    missing.push_back("fig_pulse: needs pulse_data.csv or pulse_sim.csv");
  if (!exists("evolution.csv")) missing.push_back("fig_populations: needs evolution.csv");
  if (!missing.empty()) {
    std::string msg = "missing figure inputs:";
    for (const auto& m : missing) msg += " [" + m + "]";
    throw std::runtime_error(msg);
  }

  {
    write_script(join(bundle_dir, "fig_g2.py"), R"(#!/usr/bin/env python3
# Normalized second-order correlation function, 1 us time bins.
import csv, matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

tau, g2 = [], []
with open("g2.csv") as f:
    for row in csv.reader(r for r in f if not r.startswith("#")):
        if row[0] == "tau_us":
            continue
        tau.append(float(row[0])); g2.append(float(row[1]))
plt.figure(figsize=(7, 4))
plt.plot(tau, g2, lw=0.8)
plt.xlabel("delay tau (us)")
plt.ylabel("g2(tau)")
plt.title("Second-order correlation (bin 1 us, period 414.5 us)")
plt.tight_layout()
plt.savefig("fig_g2.png", dpi=160)
)");
    written.push_back("fig_g2.py");
  }

  {
    write_script(join(bundle_dir, "fig_pulse.py"), R"(#!/usr/bin/env python3
# Photon pulse shape, 500 ns time bins; simulation overlaid when present.
import csv, os, matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

def load(name):
    t, p = [], []
    with open(name) as f:
        for row in csv.reader(r for r in f if not r.startswith("#")):
            if row[0] == "t_us":
                continue
            t.append(float(row[0])); p.append(float(row[1]))
    return t, p

plt.figure(figsize=(7, 4))
if os.path.exists("pulse_data.csv"):
    t, p = load("pulse_data.csv")
    plt.plot(t, p, ".-", ms=3, lw=0.6, label="click data")
if os.path.exists("pulse_sim.csv"):
    t, p = load("pulse_sim.csv")
    plt.plot(t, p, "r-", lw=1.2, label="master equation")
plt.xlim(0, 130)
plt.xlabel("time from drive-pulse start (us)")
plt.ylabel("detection probability per 500 ns bin")
plt.legend()
plt.tight_layout()
plt.savefig("fig_pulse.png", dpi=160)
)");
    written.push_back("fig_pulse.py");
  }

  {
    write_script(join(bundle_dir, "fig_populations.py"), R"(#!/usr/bin/env python3
# Atomic populations during the drive pulse: (a) S manifold, (b) D manifold.
import csv, matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

cols = {}
with open("evolution.csv") as f:
    reader = csv.reader(f)
    header = next(reader)
    for h in header:
        cols[h] = []
    for row in reader:
        for h, v in zip(header, row):
            cols[h].append(float(v))

t = cols["time_us"]
fig, (ax_s, ax_d) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
for name, label in [("pop_sp12", "S m=+1/2"), ("pop_sm12", "S m=-1/2")]:
    ax_s.plot(t, cols[name], label=label)
for name, label in [("pop_dm32", "D m=-3/2"), ("pop_dm12", "D m=-1/2"),
                    ("pop_dp12", "D m=+1/2"), ("pop_dp32", "D m=+3/2")]:
    ax_d.plot(t, cols[name], label=label)
ax_s.set_ylabel("population (S manifold)")
ax_d.set_ylabel("population (D manifold)")
ax_d.set_xlabel("time (us)")
ax_s.set_xlim(0, 120)
ax_s.legend(); ax_d.legend()
fig.tight_layout()
fig.savefig("fig_populations.png", dpi=160)
)");
    written.push_back("fig_populations.py");
  }

  return written;
}

}  // namespace spsim
