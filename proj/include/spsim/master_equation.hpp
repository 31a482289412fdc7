#pragma once

#include <functional>
#include <vector>

#include "spsim/ode.hpp"
#include "spsim/operators.hpp"
#include "spsim/sequence.hpp"

namespace spsim {

// Lindblad right-hand side -i[H,rho] + sum_k (C rho C^ - 1/2 {C^C, rho}).
// Works on any dimension; throws std::invalid_argument on mismatched shapes.
DenseOp lindblad_rhs(const DenseOp& rho, const SparseOp& h,
                     const std::vector<SparseOp>& collapse);

// The same generator precompiled as a sparse matrix acting on vec(rho)
// (column-major). Behaviour-identical to lindblad_rhs; used by the
// integrator for speed.
class Liouvillian {
 public:
  Liouvillian(const SparseOp& h, const std::vector<CollapseChannel>& channels);

  int dim() const { return dim_; }
  void apply(const Eigen::VectorXcd& vec_rho, Eigen::VectorXcd& out) const;

 private:
  int dim_;
  SparseOp super_;
};

struct EvolutionRecord {
  std::vector<double> times_us;
  // populations[level][time index], traced over both cavity modes.
  std::vector<std::vector<double>> populations;
  std::vector<double> flux_mode1;  // photons/us
  std::vector<double> flux_mode2;
  std::vector<std::string> level_labels;
  double efficiency = 0.0;  // integrated cavity flux over drive+wait
};

struct IntegrateOptions {
  double output_dt_us = 0.1;
  double atol = 1e-8;
  double rtol = 1e-8;
  // Replace the state by `reset_state` inside reset segments.
  // When empty, the initial state is reused.
  DenseOp reset_state;
};

// Pure |S,+1/2> (x) vacuum, optionally mixed with |S,-1/2> by the pump
// infidelity epsilon.
DenseOp initial_state(const SystemParams& p, double pump_infidelity = 0.0);

// Adaptive master-equation integration across one period of the sequence.
EvolutionRecord integrate(const SystemParams& p, const PulseSequence& seq,
                          const DenseOp& rho0, const IntegrateOptions& opts = {});

// Instantaneous cavity emission rate 2*kappa*<a_k^ a_k>.
double photon_flux(const DenseOp& rho, const SystemParams& p, int mode);

// Integrated cavity flux (both modes) over the drive and wait segments of
// the record; equals the mean number of photons emitted per attempt.
double creation_efficiency(const EvolutionRecord& rec, const PulseSequence& seq);

// Difference in final target-state population between the full model and a
// model with the spontaneous P -> D(-1/2) channels removed.
double decay_contribution_to_target(const SystemParams& p, const PulseSequence& seq,
                                    const IntegrateOptions& opts = {});

// Ratio of photon yield with the artificial dark level enabled to the yield
// with it disabled (master-equation estimator of the fraction of photons
// created without a preceding Raman scattering event).
// Throws std::domain_error if the dark level is disabled in `p`.
double scatter_free_fraction_me(const SystemParams& p, const PulseSequence& seq,
                                const IntegrateOptions& opts = {});

// Diagnostics for tests.
double trace_of(const DenseOp& rho);
double hermiticity_defect_dense(const DenseOp& rho);
double min_eigenvalue(const DenseOp& rho);

}  // namespace spsim
