#include "spsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spsim/constants.hpp"
#include "spsim/rng.hpp"

namespace spsim {

using nlohmann::json;

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::MasterEquation: return "master_equation";
    case RunMode::Trajectory: return "trajectory";
    case RunMode::AnalyzeOnly: return "analyze_only";
    case RunMode::DarkLevelStudy: return "dark_level_study";
  }
  return "?";
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.system.g0 = mhz_to_angular(1.6);
  c.system.kappa = mhz_to_angular(0.054);
  c.system.gamma_total = mhz_to_angular(21.57);   // external to the modelled dataset
  c.system.branching_sd = 0.0647;                 // external to the modelled dataset
  c.system.omega_drive = mhz_to_angular(30.0);
  c.system.delta_drive = mhz_to_angular(-335.0);
  c.system.raman_offset = khz_to_angular(60.0);
  c.system.drive_linewidth = khz_to_angular(30.0);
  c.system.b_field = 0.2e-3;
  c.system.fock_cutoff = 3;
  c.system.cavity_length = 0.02;
  c.system.finesse = 70000.0;
  c.system.drive_polarization = DrivePolarization::Pi;
  c.raman_target = {1, -1};
  c.delta_cavity_mode = DeltaCavityMode::StarkCorrectedResonance;
  c.system.delta_cavity =
      delta_cavity_stark_corrected(c.system, c.raman_target);
  c.sequence = default_sequence();
  return c;
}

namespace {

struct Errors {
  std::ostringstream out;
  bool any = false;
  void add(const std::string& msg) {
    out << (any ? "; " : "") << msg;
    any = true;
  }
};

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed, Errors& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) errs.add("unknown key '" + path + it.key() + "'");
}

double num(const json& obj, const std::string& path, const char* key, double fallback,
           Errors& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    errs.add("'" + path + key + "' must be a number");
    return fallback;
  }
  return obj[key].get<double>();
}

std::uint64_t unsigned_int(const json& obj, const std::string& path, const char* key,
                           std::uint64_t fallback, Errors& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned()) {
    errs.add("'" + path + key + "' must be a non-negative integer");
    return fallback;
  }
  return obj[key].get<std::uint64_t>();
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback,
             Errors& errs) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) {
    errs.add("'" + path + key + "' must be a boolean");
    return fallback;
  }
  return obj[key].get<bool>();
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config root must be an object");

  Errors errs;
  ExperimentConfig c = default_config();

  check_keys(root, "",
             {"config_version", "mode", "system", "sequence", "detector", "analysis",
              "run", "input_timetags"},
             errs);

  if (root.contains("config_version")) {
    if (!root["config_version"].is_number_integer() ||
        root["config_version"].get<int>() != 1)
      errs.add("'config_version' must be 1");
  }

  if (root.contains("mode")) {
    const std::string m = root["mode"].is_string() ? root["mode"].get<std::string>() : "";
    if (m == "master_equation") c.mode = RunMode::MasterEquation;
    else if (m == "trajectory") c.mode = RunMode::Trajectory;
    else if (m == "analyze_only") c.mode = RunMode::AnalyzeOnly;
    else if (m == "dark_level_study") c.mode = RunMode::DarkLevelStudy;
    else errs.add("'mode' must be one of master_equation|trajectory|analyze_only|dark_level_study");
  }

  bool explicit_dark_rate = false;
  double dark_rate_mhz = 0.0;
  if (root.contains("system")) {
    const json& s = root["system"];
    const std::string p = "system.";
    check_keys(s, p,
               {"g0_mhz", "kappa_mhz", "gamma_total_mhz", "branching_sd",
                "omega_drive_mhz", "delta_drive_mhz", "delta_cavity_mhz",
                "raman_target_s_m2", "raman_target_d_m2", "raman_offset_khz",
                "drive_linewidth_khz", "b_field_mt", "g_factor_s", "g_factor_p",
                "g_factor_d", "fock_cutoff", "cavity_length_m", "finesse",
                "dark_level", "dark_decay_rate_factor", "dark_decay_rate_mhz",
                "drive_polarization"},
               errs);
    c.system.g0 = mhz_to_angular(num(s, p, "g0_mhz", angular_to_mhz(c.system.g0), errs));
    c.system.kappa =
        mhz_to_angular(num(s, p, "kappa_mhz", angular_to_mhz(c.system.kappa), errs));
    c.system.gamma_total = mhz_to_angular(
        num(s, p, "gamma_total_mhz", angular_to_mhz(c.system.gamma_total), errs));
    c.system.branching_sd = num(s, p, "branching_sd", c.system.branching_sd, errs);
    c.system.omega_drive = mhz_to_angular(
        num(s, p, "omega_drive_mhz", angular_to_mhz(c.system.omega_drive), errs));
    c.system.delta_drive = mhz_to_angular(
        num(s, p, "delta_drive_mhz", angular_to_mhz(c.system.delta_drive), errs));
    c.system.raman_offset = khz_to_angular(
        num(s, p, "raman_offset_khz", angular_to_mhz(c.system.raman_offset) * 1e3, errs));
    c.system.drive_linewidth = khz_to_angular(num(
        s, p, "drive_linewidth_khz", angular_to_mhz(c.system.drive_linewidth) * 1e3, errs));
    c.system.b_field = 1e-3 * num(s, p, "b_field_mt", c.system.b_field * 1e3, errs);
    c.system.g_factors.s = num(s, p, "g_factor_s", c.system.g_factors.s, errs);
    c.system.g_factors.p = num(s, p, "g_factor_p", c.system.g_factors.p, errs);
    c.system.g_factors.d = num(s, p, "g_factor_d", c.system.g_factors.d, errs);
    if (s.contains("fock_cutoff")) {
      if (!s["fock_cutoff"].is_number_integer())
        errs.add("'system.fock_cutoff' must be an integer");
      else
        c.system.fock_cutoff = s["fock_cutoff"].get<int>();
    }
    c.system.cavity_length = num(s, p, "cavity_length_m", c.system.cavity_length, errs);
    c.system.finesse = num(s, p, "finesse", c.system.finesse, errs);
    c.dark_level = boolean(s, p, "dark_level", c.dark_level, errs);
    c.dark_decay_rate_factor =
        num(s, p, "dark_decay_rate_factor", c.dark_decay_rate_factor, errs);
    if (s.contains("dark_decay_rate_mhz")) {
      explicit_dark_rate = true;
      dark_rate_mhz = num(s, p, "dark_decay_rate_mhz", 0.0, errs);
      if (s.contains("dark_decay_rate_factor"))
        errs.add("'system.dark_decay_rate_mhz' and 'system.dark_decay_rate_factor' are exclusive");
    }
    if (s.contains("drive_polarization")) {
      const std::string pol =
          s["drive_polarization"].is_string() ? s["drive_polarization"].get<std::string>() : "";
      if (pol == "sigma_minus") c.system.drive_polarization = DrivePolarization::SigmaMinus;
      else if (pol == "pi") c.system.drive_polarization = DrivePolarization::Pi;
      else if (pol == "sigma_plus") c.system.drive_polarization = DrivePolarization::SigmaPlus;
      else errs.add("'system.drive_polarization' must be sigma_minus|pi|sigma_plus");
    }
    if (s.contains("raman_target_s_m2")) {
      if (!s["raman_target_s_m2"].is_number_integer())
        errs.add("'system.raman_target_s_m2' must be an integer (doubled m)");
      else
        c.raman_target.s_m2 = s["raman_target_s_m2"].get<int>();
    }
    if (s.contains("raman_target_d_m2")) {
      if (!s["raman_target_d_m2"].is_number_integer())
        errs.add("'system.raman_target_d_m2' must be an integer (doubled m)");
      else
        c.raman_target.d_m2 = s["raman_target_d_m2"].get<int>();
    }
    if (s.contains("delta_cavity_mhz")) {
      const json& dc = s["delta_cavity_mhz"];
      if (dc.is_number()) {
        c.delta_cavity_mode = DeltaCavityMode::Explicit;
        c.system.delta_cavity = mhz_to_angular(dc.get<double>());
      } else if (dc.is_string() && dc.get<std::string>() == "bare_resonance") {
        c.delta_cavity_mode = DeltaCavityMode::BareResonance;
      } else if (dc.is_string() && dc.get<std::string>() == "stark_corrected_resonance") {
        c.delta_cavity_mode = DeltaCavityMode::StarkCorrectedResonance;
      } else {
        errs.add("'system.delta_cavity_mhz' must be a number, 'bare_resonance' or 'stark_corrected_resonance'");
      }
    }
  }

  if (root.contains("sequence")) {
    const json& seq = root["sequence"];
    if (!seq.is_array()) {
      errs.add("'sequence' must be an array of segments");
    } else {
      c.sequence.segments.clear();
      int i = 0;
      for (const auto& seg : seq) {
        const std::string p = "sequence[" + std::to_string(i++) + "].";
        if (!seg.is_object()) {
          errs.add("'" + p + "' must be an object");
          continue;
        }
        check_keys(seg, p, {"label", "duration_us", "drive_on", "reset"}, errs);
        Segment out;
        if (seg.contains("label") && seg["label"].is_string())
          out.label = seg["label"].get<std::string>();
        else
          errs.add("'" + p + "label' must be a string");
        out.duration_us = num(seg, p, "duration_us", 0.0, errs);
        out.drive_on = boolean(seg, p, "drive_on", false, errs);
        out.reset = boolean(seg, p, "reset", false, errs);
        c.sequence.segments.push_back(out);
      }
    }
  }

  if (root.contains("detector")) {
    const json& d = root["detector"];
    const std::string p = "detector.";
    check_keys(d, p,
               {"path_efficiency", "qe_a", "qe_b", "dark_rate_hz",
                "physical_dead_time_ns", "afterpulse_prob", "afterpulse_window_us",
                "reflection_prob", "reflection_delay_ns", "reflection_jitter_ns",
                "quantization_ps"},
               errs);
    c.detector.path_efficiency = num(d, p, "path_efficiency", c.detector.path_efficiency, errs);
    c.detector.qe_a = num(d, p, "qe_a", c.detector.qe_a, errs);
    c.detector.qe_b = num(d, p, "qe_b", c.detector.qe_b, errs);
    c.detector.dark_rate_hz = num(d, p, "dark_rate_hz", c.detector.dark_rate_hz, errs);
    c.detector.physical_dead_time_ns =
        num(d, p, "physical_dead_time_ns", c.detector.physical_dead_time_ns, errs);
    c.detector.afterpulse_prob = num(d, p, "afterpulse_prob", c.detector.afterpulse_prob, errs);
    c.detector.afterpulse_window_us =
        num(d, p, "afterpulse_window_us", c.detector.afterpulse_window_us, errs);
    c.detector.reflection_prob = num(d, p, "reflection_prob", c.detector.reflection_prob, errs);
    c.detector.reflection_delay_ns =
        num(d, p, "reflection_delay_ns", c.detector.reflection_delay_ns, errs);
    c.detector.reflection_jitter_ns =
        num(d, p, "reflection_jitter_ns", c.detector.reflection_jitter_ns, errs);
    c.detector.quantization_ps = num(d, p, "quantization_ps", c.detector.quantization_ps, errs);
  }

  if (root.contains("analysis")) {
    const json& a = root["analysis"];
    const std::string p = "analysis.";
    check_keys(a, p,
               {"g2_bin_us", "g2_range_us", "analysis_dead_time_us", "pulse_bin_us",
                "suppression_window_us", "reflection_delay_ns",
                "reflection_exclude_halfwidth_ns", "eta_det", "eta_det_uncertainty",
                "dark_tail_us"},
               errs);
    c.analysis.g2_bin_us = num(a, p, "g2_bin_us", c.analysis.g2_bin_us, errs);
    c.analysis.g2_range_us = num(a, p, "g2_range_us", c.analysis.g2_range_us, errs);
    c.analysis.analysis_dead_time_us =
        num(a, p, "analysis_dead_time_us", c.analysis.analysis_dead_time_us, errs);
    c.analysis.pulse_bin_us = num(a, p, "pulse_bin_us", c.analysis.pulse_bin_us, errs);
    c.analysis.suppression_window_us =
        num(a, p, "suppression_window_us", c.analysis.suppression_window_us, errs);
    c.analysis.reflection_delay_ns =
        num(a, p, "reflection_delay_ns", c.analysis.reflection_delay_ns, errs);
    c.analysis.reflection_exclude_halfwidth_ns = num(
        a, p, "reflection_exclude_halfwidth_ns", c.analysis.reflection_exclude_halfwidth_ns, errs);
    c.analysis.eta_det = num(a, p, "eta_det", c.analysis.eta_det, errs);
    c.analysis.eta_det_uncertainty =
        num(a, p, "eta_det_uncertainty", c.analysis.eta_det_uncertainty, errs);
    c.analysis.dark_tail_us = num(a, p, "dark_tail_us", c.analysis.dark_tail_us, errs);
  }

  if (root.contains("run")) {
    const json& r = root["run"];
    const std::string p = "run.";
    check_keys(r, p,
               {"n_trials", "paper_scale_trials", "master_seed", "output_dt_us", "atol",
                "rtol", "pump_infidelity", "rng"},
               errs);
    c.run.n_trials = unsigned_int(r, p, "n_trials", c.run.n_trials, errs);
    c.run.paper_scale_trials =
        unsigned_int(r, p, "paper_scale_trials", c.run.paper_scale_trials, errs);
    c.run.master_seed = unsigned_int(r, p, "master_seed", c.run.master_seed, errs);
    c.run.output_dt_us = num(r, p, "output_dt_us", c.run.output_dt_us, errs);
    c.run.atol = num(r, p, "atol", c.run.atol, errs);
    c.run.rtol = num(r, p, "rtol", c.run.rtol, errs);
    c.run.pump_infidelity = num(r, p, "pump_infidelity", c.run.pump_infidelity, errs);
    if (r.contains("rng")) {
      if (!r["rng"].is_string() || r["rng"].get<std::string>() != kRngAlgorithm)
        errs.add(std::string("'run.rng' must be \"") + kRngAlgorithm + "\"");
    }
  }

  if (root.contains("input_timetags")) {
    if (!root["input_timetags"].is_string())
      errs.add("'input_timetags' must be a string path");
    else
      c.input_timetags = root["input_timetags"].get<std::string>();
  }

  if (errs.any) throw std::invalid_argument("config errors: " + errs.out.str());

  // Resolve derived quantities.
  switch (c.delta_cavity_mode) {
    case DeltaCavityMode::Explicit:
      break;
    case DeltaCavityMode::BareResonance:
      c.system.delta_cavity = delta_cavity_bare_resonance(c.system, c.raman_target);
      break;
    case DeltaCavityMode::StarkCorrectedResonance:
      c.system.delta_cavity = delta_cavity_stark_corrected(c.system, c.raman_target);
      break;
  }
  if (c.dark_level) {
    c.system.dark_decay_rate = explicit_dark_rate
                                   ? mhz_to_angular(dark_rate_mhz)
                                   : c.dark_decay_rate_factor * effective_decay(c.system);
  } else {
    c.system.dark_decay_rate = 0.0;
  }

  std::vector<std::string> warnings;
  validate(c.system, &warnings);
  c.sequence.validate();
  c.detector.validate();
  c.analysis.validate();
  if (c.mode == RunMode::AnalyzeOnly && c.input_timetags.empty())
    throw std::invalid_argument("config errors: analyze_only mode requires 'input_timetags'");
  if (c.run.pump_infidelity < 0.0 || c.run.pump_infidelity > 1.0)
    throw std::invalid_argument("config errors: 'run.pump_infidelity' must be in [0,1]");
  if (!(c.run.output_dt_us > 0.0))
    throw std::invalid_argument("config errors: 'run.output_dt_us' must be > 0");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  root["config_version"] = c.config_version;
  root["mode"] = run_mode_name(c.mode);

  json s;
  s["g0_mhz"] = angular_to_mhz(c.system.g0);
  s["kappa_mhz"] = angular_to_mhz(c.system.kappa);
  s["gamma_total_mhz"] = angular_to_mhz(c.system.gamma_total);
  s["branching_sd"] = c.system.branching_sd;
  s["omega_drive_mhz"] = angular_to_mhz(c.system.omega_drive);
  s["delta_drive_mhz"] = angular_to_mhz(c.system.delta_drive);
  s["delta_cavity_mhz"] = angular_to_mhz(c.system.delta_cavity);
  s["raman_target_s_m2"] = c.raman_target.s_m2;
  s["raman_target_d_m2"] = c.raman_target.d_m2;
  s["raman_offset_khz"] = angular_to_mhz(c.system.raman_offset) * 1e3;
  s["drive_linewidth_khz"] = angular_to_mhz(c.system.drive_linewidth) * 1e3;
  s["b_field_mt"] = c.system.b_field * 1e3;
  s["g_factor_s"] = c.system.g_factors.s;
  s["g_factor_p"] = c.system.g_factors.p;
  s["g_factor_d"] = c.system.g_factors.d;
  s["fock_cutoff"] = c.system.fock_cutoff;
  s["cavity_length_m"] = c.system.cavity_length;
  s["finesse"] = c.system.finesse;
  s["dark_level"] = c.dark_level;
  s["dark_decay_rate_mhz"] = angular_to_mhz(c.system.dark_decay_rate);
  s["drive_polarization"] = polarization_name(c.system.drive_polarization);
  root["system"] = s;

  json seq = json::array();
  for (const auto& segment : c.sequence.segments) {
    json seg;
    seg["label"] = segment.label;
    seg["duration_us"] = segment.duration_us;
    seg["drive_on"] = segment.drive_on;
    seg["reset"] = segment.reset;
    seq.push_back(seg);
  }
  root["sequence"] = seq;

  json d;
  d["path_efficiency"] = c.detector.path_efficiency;
  d["qe_a"] = c.detector.qe_a;
  d["qe_b"] = c.detector.qe_b;
  d["dark_rate_hz"] = c.detector.dark_rate_hz;
  d["physical_dead_time_ns"] = c.detector.physical_dead_time_ns;
  d["afterpulse_prob"] = c.detector.afterpulse_prob;
  d["afterpulse_window_us"] = c.detector.afterpulse_window_us;
  d["reflection_prob"] = c.detector.reflection_prob;
  d["reflection_delay_ns"] = c.detector.reflection_delay_ns;
  d["reflection_jitter_ns"] = c.detector.reflection_jitter_ns;
  d["quantization_ps"] = c.detector.quantization_ps;
  root["detector"] = d;

  json a;
  a["g2_bin_us"] = c.analysis.g2_bin_us;
  a["g2_range_us"] = c.analysis.g2_range_us;
  a["analysis_dead_time_us"] = c.analysis.analysis_dead_time_us;
  a["pulse_bin_us"] = c.analysis.pulse_bin_us;
  a["suppression_window_us"] = c.analysis.suppression_window_us;
  a["reflection_delay_ns"] = c.analysis.reflection_delay_ns;
  a["reflection_exclude_halfwidth_ns"] = c.analysis.reflection_exclude_halfwidth_ns;
  a["eta_det"] = c.analysis.eta_det;
  a["eta_det_uncertainty"] = c.analysis.eta_det_uncertainty;
  a["dark_tail_us"] = c.analysis.dark_tail_us;
  root["analysis"] = a;

  json r;
  r["n_trials"] = c.run.n_trials;
  r["paper_scale_trials"] = c.run.paper_scale_trials;
  r["master_seed"] = c.run.master_seed;
  r["output_dt_us"] = c.run.output_dt_us;
  r["atol"] = c.run.atol;
  r["rtol"] = c.run.rtol;
  r["pump_infidelity"] = c.run.pump_infidelity;
  r["rng"] = c.run.rng;
  root["run"] = r;

  if (!c.input_timetags.empty()) root["input_timetags"] = c.input_timetags;
  return root.dump(2) + "\n";
}

}  // namespace spsim
