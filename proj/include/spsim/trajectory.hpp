#pragma once

#include <cstdint>
#include <vector>

#include "spsim/master_equation.hpp"
#include "spsim/operators.hpp"
#include "spsim/sequence.hpp"

namespace spsim {

enum class EmissionChannel { CavityMode1, CavityMode2, FreeSpaceS, FreeSpaceD, DarkJump };

const char* emission_channel_name(EmissionChannel c);

struct EmissionEvent {
  double time_us;  // within [0, period)
  EmissionChannel channel;
};

struct EmissionRecord {
  std::uint64_t trial = 0;
  std::vector<EmissionEvent> events;
};

// Monte Carlo wave-function unraveling of the Liouvillian. The no-jump
// evolution under H_eff = H - i/2 sum C^C is propagated exactly through a
// cached eigendecomposition (H is piecewise constant across segments), and
// jump times are located by bisection on the squared-norm threshold to
// 1e-3 us. Jump channels are drawn proportional to <C^C>.
class TrajectoryEngine {
 public:
  TrajectoryEngine(const SystemParams& params, const PulseSequence& sequence,
                   double pump_infidelity = 0.0);

  const SystemParams& params() const { return params_; }
  const PulseSequence& sequence() const { return sequence_; }
  const Basis& basis() const { return basis_; }

  // Deterministic for fixed seed: one trajectory over one sequence period.
  EmissionRecord run_trajectory(std::uint64_t seed, std::uint64_t trial = 0) const;

  // State snapshots: normalized level populations at the given times for one
  // trajectory (same stochastic path as run_trajectory for the same seed).
  EmissionRecord run_trajectory_sampled(std::uint64_t seed, std::uint64_t trial,
                                        const std::vector<double>& sample_times_us,
                                        std::vector<std::vector<double>>* pops_out) const;

 private:
  struct Propagator {
    Eigen::MatrixXcd v;
    Eigen::MatrixXcd v_inv;
    Eigen::VectorXcd eigenvalues;
  };
  struct JumpChannel {
    Eigen::VectorXd weight;  // diagonal of C^dag C
    SparseOp op;
    EmissionChannel channel;
    bool emits;  // dephasing jumps produce no emission event
  };

  const Propagator& propagator(bool drive_on) const {
    return drive_on ? prop_on_ : prop_off_;
  }
  Eigen::VectorXcd initial_state_vector(class Xoshiro256pp& rng) const;

  SystemParams params_;
  PulseSequence sequence_;
  Basis basis_;
  double pump_infidelity_;
  Propagator prop_on_, prop_off_;
  std::vector<JumpChannel> jumps_;
  int idx_s_plus_, idx_s_minus_;
};

struct EnsembleResult {
  std::vector<double> times_us;
  // mean[level][time], standard_error[level][time]
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> standard_error;
  std::vector<EmissionRecord> records;
  std::uint64_t n_trials = 0;
};

// Runs n_trials independent trajectories (parallel over a small thread
// pool; per-trial RNG streams derived from (master_seed, trial)), collecting
// emission records and, when sample_times is non-empty, ensemble-averaged
// populations with per-point standard errors.
// Throws std::invalid_argument when populations are requested with
// n_trials < 100 (standard errors would be meaningless).
EnsembleResult run_ensemble(const TrajectoryEngine& engine, std::uint64_t n_trials,
                            std::uint64_t master_seed,
                            const std::vector<double>& sample_times_us = {},
                            int n_threads = 0);

// Fraction of cavity photons emitted in trials with no preceding dark-level
// jump, normalized by the cavity yield of a paired ensemble with the dark
// level disabled. Throws std::domain_error when the dark level is disabled
// or the reference ensemble produces no photons.
double raman_scatter_free_fraction(const SystemParams& params, const PulseSequence& seq,
                                   std::uint64_t n_trials, std::uint64_t master_seed,
                                   double pump_infidelity = 0.0, int n_threads = 0);

}  // namespace spsim
