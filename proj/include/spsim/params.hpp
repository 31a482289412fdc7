#pragma once

#include <string>
#include <vector>

#include "spsim/levels.hpp"

namespace spsim {

enum class DrivePolarization { SigmaMinus, Pi, SigmaPlus };

const char* polarization_name(DrivePolarization p);
int polarization_q(DrivePolarization p);

// Raman target pair: the (S, D) sublevels whose two-photon transition the
// cavity detuning is tuned to.
struct RamanPair {
  int s_m2 = 1;   // S(+1/2)
  int d_m2 = -1;  // D(-1/2)
};

// All rates/frequencies in rad/us (angular), fields in tesla, lengths in m.
struct SystemParams {
  double g0 = 0.0;              // maximum ion-cavity coupling
  double kappa = 0.0;           // cavity field decay (half linewidth)
  double gamma_total = 0.0;     // total P1/2 population decay rate
  double branching_sd = 0.0647; // fraction of P1/2 decay going to D3/2
  double omega_drive = 0.0;     // drive Rabi frequency (strongest component convention)
  double delta_drive = 0.0;     // drive detuning from P1/2 (field minus atom)
  double delta_cavity = 0.0;    // cavity detuning from P1/2
  double raman_offset = 0.0;    // residual two-photon detuning
  double drive_linewidth = 0.0; // drive-field dephasing rate
  double b_field = 0.0;         // tesla
  GFactors g_factors;
  int fock_cutoff = 3;          // photon numbers {0 .. fock_cutoff-1} per mode
  double cavity_length = 0.02;  // m
  double finesse = 70000.0;
  double dark_decay_rate = 0.0; // 0 disables the artificial dark level
  DrivePolarization drive_polarization = DrivePolarization::Pi;

  bool dark_enabled() const { return dark_decay_rate > 0.0; }
  LevelScheme scheme() const { return LevelScheme(dark_enabled()); }
};

// Structural validation. Throws std::invalid_argument listing every
// violation; appends non-fatal warnings (e.g. the off-resonance ratio check)
// to `warnings` if given.
void validate(const SystemParams& p, std::vector<std::string>* warnings = nullptr);

// Effective Raman-transition diagnostics, Omega_eff = g0*Omega_d/(2|Delta_d|)
// and gamma_eff = gamma*(Omega_d/(2|Delta_d|))^2.
// Throw std::domain_error when delta_drive == 0.
double effective_rabi(const SystemParams& p);
double effective_decay(const SystemParams& p);

// Cavity field decay rate from geometry, defined by 2*kappa/2pi = FSR/finesse
// with FSR = c/(2L). Returns kappa in rad/us. Throws std::domain_error for
// non-positive inputs.
double cavity_kappa_from_geometry(double length_m, double finesse);

struct RamanResonance {
  int s_m2;
  int d_m2;
  double offset;  // value of (delta_drive - delta_cavity) quoted as z_S - z_D
};

// Two-photon resonance offsets for every (S, D) pair reachable with one
// drive photon of the configured polarization plus one cavity photon.
// Six pairs for a pi-polarized drive, three for sigma+/-.
std::vector<RamanResonance> raman_resonance_offsets(const SystemParams& p);

// Cavity detuning that puts `target` on bare two-photon resonance, i.e. the
// S and D diagonal entries of the rotating-frame Hamiltonian differ exactly
// by raman_offset.
double delta_cavity_bare_resonance(const SystemParams& p, const RamanPair& target);

// Same, additionally compensating the second-order light shifts of the two
// dressed states so that the dressed splitting, not the bare one, equals
// raman_offset. This mirrors how the detunings are tuned in the lab: the
// resonance is located empirically, light shifts included.
double delta_cavity_stark_corrected(const SystemParams& p, const RamanPair& target);

// Differential second-order shift (Stark_S - Stark_D) entering the
// correction above; exposed for tests.
double differential_stark_shift(const SystemParams& p, const RamanPair& target);

}  // namespace spsim
