#include "spsim/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spsim/constants.hpp"

namespace spsim {

const char* polarization_name(DrivePolarization p) {
  switch (p) {
    case DrivePolarization::SigmaMinus: return "sigma_minus";
    case DrivePolarization::Pi: return "pi";
    case DrivePolarization::SigmaPlus: return "sigma_plus";
  }
  return "?";
}

int polarization_q(DrivePolarization p) {
  switch (p) {
    case DrivePolarization::SigmaMinus: return -1;
    case DrivePolarization::Pi: return 0;
    case DrivePolarization::SigmaPlus: return 1;
  }
  return 0;
}

void validate(const SystemParams& p, std::vector<std::string>* warnings) {
  std::ostringstream errs;
  auto require = [&](bool ok, const char* msg) {
    if (!ok) errs << msg << "; ";
  };
  require(p.g0 > 0.0, "g0 must be > 0");
  require(p.kappa > 0.0, "kappa must be > 0");
  require(p.gamma_total > 0.0, "gamma_total must be > 0");
  require(p.omega_drive > 0.0, "omega_drive must be > 0");
  require(p.fock_cutoff >= 1, "fock_cutoff must be >= 1");
  require(p.branching_sd > 0.0 && p.branching_sd < 1.0,
          "branching_sd must be in (0, 1)");
  require(p.cavity_length > 0.0, "cavity_length must be > 0");
  require(p.finesse > 0.0, "finesse must be > 0");
  require(p.dark_decay_rate >= 0.0, "dark_decay_rate must be >= 0");
  require(p.drive_linewidth >= 0.0, "drive_linewidth must be >= 0");
  const std::string msg = errs.str();
  if (!msg.empty()) throw std::invalid_argument("invalid SystemParams: " + msg);

  if (warnings) {
    const double strong = std::max(p.g0, p.omega_drive);
    if (std::abs(p.delta_drive) < 10.0 * strong)
      warnings->push_back("off-resonant regime questionable: |delta_drive| < 10*max(g0, omega_drive)");
    if (std::abs(p.delta_cavity) < 10.0 * strong)
      warnings->push_back("off-resonant regime questionable: |delta_cavity| < 10*max(g0, omega_drive)");
  }
}

double effective_rabi(const SystemParams& p) {
  if (p.delta_drive == 0.0)
    throw std::domain_error("effective_rabi: delta_drive must be nonzero");
  return p.g0 * p.omega_drive / (2.0 * std::abs(p.delta_drive));
}

double effective_decay(const SystemParams& p) {
  if (p.delta_drive == 0.0)
    throw std::domain_error("effective_decay: delta_drive must be nonzero");
  const double r = p.omega_drive / (2.0 * std::abs(p.delta_drive));
  return p.gamma_total * r * r;
}

double cavity_kappa_from_geometry(double length_m, double finesse) {
  if (length_m <= 0.0 || finesse <= 0.0)
    throw std::domain_error("cavity_kappa_from_geometry: inputs must be positive");
  const double fsr_hz = kSpeedOfLight / (2.0 * length_m);
  // Full linewidth 2*kappa/2pi = FSR/finesse.
  return kPi * fsr_hz / finesse * 1e-6;  // rad/us
}

std::vector<RamanResonance> raman_resonance_offsets(const SystemParams& p) {
  const LevelScheme scheme(false);
  const int qd = polarization_q(p.drive_polarization);
  std::vector<RamanResonance> out;
  for (const auto& s : scheme.levels()) {
    if (s.manifold != Manifold::S12) continue;
    const auto pu = scheme.try_find(Manifold::P12, s.m2 + 2 * qd);
    if (!pu) continue;
    for (int qc : {-1, 0, 1}) {
      const auto d = scheme.try_find(Manifold::D32, pu->m2 - 2 * qc);
      if (!d) continue;
      const double off = zeeman_shift(s, p.b_field, p.g_factors) -
                         zeeman_shift(*d, p.b_field, p.g_factors);
      out.push_back({s.m2, d->m2, off});
    }
  }
  return out;
}

namespace {

double target_offset(const SystemParams& p, const RamanPair& target) {
  const LevelScheme scheme(false);
  const auto& s = scheme.find(Manifold::S12, target.s_m2);
  const auto& d = scheme.find(Manifold::D32, target.d_m2);
  return zeeman_shift(s, p.b_field, p.g_factors) -
         zeeman_shift(d, p.b_field, p.g_factors);
}

}  // namespace

double delta_cavity_bare_resonance(const SystemParams& p, const RamanPair& target) {
  return p.delta_drive + target_offset(p, target);
}

double differential_stark_shift(const SystemParams& p, const RamanPair& target) {
  const LevelScheme scheme(false);
  const auto& s = scheme.find(Manifold::S12, target.s_m2);
  const auto& d = scheme.find(Manifold::D32, target.d_m2);
  const int qd = polarization_q(p.drive_polarization);
  const double delta_cavity0 = delta_cavity_bare_resonance(p, target);

  auto z = [&](const AtomicLevel& l) { return zeeman_shift(l, p.b_field, p.g_factors); };

  // Light shift of |S, 0 photons> from the drive.
  double stark_s = 0.0;
  if (const auto pu = scheme.try_find(Manifold::P12, s.m2 + 2 * qd)) {
    const double a = 0.5 * p.omega_drive * dipole_amplitude(*pu, s, qd);
    stark_s += a * a / (p.delta_drive + z(s) - z(*pu));
  }

  // Light shift of |D, 1 photon in the carrier mode> from the cavity coupling.
  const auto p_target = scheme.find(Manifold::P12, target.s_m2 + 2 * qd);
  const int q_carrier = (p_target.m2 - d.m2) / 2;
  double stark_d = 0.0;
  const auto qs = (q_carrier == 0) ? std::vector<int>{0} : std::vector<int>{-1, 1};
  const double w = (q_carrier == 0) ? 1.0 : 1.0 / std::sqrt(2.0);
  for (int q : qs) {
    const auto pu = scheme.try_find(Manifold::P12, d.m2 + 2 * q);
    if (!pu) continue;
    const double b = p.g0 * dipole_amplitude(*pu, d, q) * w;
    stark_d += b * b / (delta_cavity0 + z(d) - z(*pu) - p.raman_offset);
  }
  return stark_s - stark_d;
}

double delta_cavity_stark_corrected(const SystemParams& p, const RamanPair& target) {
  return delta_cavity_bare_resonance(p, target) + differential_stark_shift(p, target);
}

}  // namespace spsim
