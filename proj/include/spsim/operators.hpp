#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "spsim/params.hpp"

namespace spsim {

using Complex = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<Complex>;
using DenseOp = Eigen::MatrixXcd;

// Composite basis atom (x) mode1 (x) mode2 with index
// ((level * F) + n1) * F + n2, F = fock_cutoff.
struct Basis {
  explicit Basis(const SystemParams& p)
      : scheme(p.scheme()), fock(p.fock_cutoff) {}

  LevelScheme scheme;
  int fock;

  int dim() const { return scheme.n_levels() * fock * fock; }
  int index(int level, int n1, int n2) const { return (level * fock + n1) * fock + n2; }
  int level_of(int idx) const { return idx / (fock * fock); }
  int n1_of(int idx) const { return (idx / fock) % fock; }
  int n2_of(int idx) const { return idx % fock; }
};

// Annihilation operator of cavity mode 1 or 2 on the composite space.
SparseOp mode_annihilation(const Basis& basis, int mode);

// |to><from| on the atomic factor, identity on both modes.
SparseOp atomic_projector(const Basis& basis, int level_to, int level_from);

// Rotating-frame Hamiltonian. Diagonal: Zeeman shifts, -delta_drive on P1/2,
// -(delta_drive-delta_cavity) - raman_offset on D3/2. Drive coupling
// (omega_drive/2)*amp on S<->P pairs selected by the drive polarization
// (only when drive_on). Cavity coupling g0*amp*(a_k sigma+ + a_k^ sigma-)
// on P<->D pairs, pi transitions through mode 1 and sigma+/- transitions
// through mode 2 with weight 1/sqrt(2) each.
SparseOp build_hamiltonian(const SystemParams& p, bool drive_on);

enum class ChannelKind { CavityMode1, CavityMode2, SpontS, SpontD, Dephasing, DarkDecay };

struct CollapseChannel {
  SparseOp op;
  ChannelKind kind;
  int source_level = -1;  // decaying P sublevel for Spont*, S(-1/2) for DarkDecay
  int target_level = -1;  // final atomic level for Spont* / DarkDecay
  int q = 0;              // photon polarization of the spontaneous channel
};

// Collapse operators: sqrt(2 kappa) a_k per mode, one spontaneous channel per
// (P sublevel, lower sublevel, q) with amplitude sqrt(gamma_branch)*amp,
// pure dephasing sqrt(drive_linewidth)*P_S, and the artificial
// sqrt(dark_decay_rate)|DARK><S,-1/2| channel when the dark level is enabled.
// Channels with zero rate are omitted.
std::vector<CollapseChannel> build_collapse_operators(const SystemParams& p);

// Max |H - H^dagger| relative to max |H|; 0 for an exactly Hermitian matrix.
double hermiticity_defect(const SparseOp& h);

}  // namespace spsim
