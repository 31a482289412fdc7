#include "spsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "spsim/rng.hpp"

namespace spsim {

const char* emission_channel_name(EmissionChannel c) {
  switch (c) {
    case EmissionChannel::CavityMode1: return "cavity_mode1";
    case EmissionChannel::CavityMode2: return "cavity_mode2";
    case EmissionChannel::FreeSpaceS: return "free_space_s";
    case EmissionChannel::FreeSpaceD: return "free_space_d";
    case EmissionChannel::DarkJump: return "dark_jump";
  }
  return "?";
}

namespace {

constexpr double kJumpTimeTolUs = 1e-3;

Eigen::VectorXcd propagate(const Eigen::MatrixXcd& v, const Eigen::VectorXcd& lambda,
                           const Eigen::VectorXcd& w, double dt) {
  Eigen::VectorXcd phases(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    phases[i] = std::exp(Complex(0.0, -1.0) * lambda[i] * dt) * w[i];
  return v * phases;
}

}  // namespace

TrajectoryEngine::TrajectoryEngine(const SystemParams& params,
                                   const PulseSequence& sequence,
                                   double pump_infidelity)
    : params_(params), sequence_(sequence), basis_(params), pump_infidelity_(pump_infidelity) {
  sequence_.validate();
  const auto channels = build_collapse_operators(params_);

  const int dim = basis_.dim();
  Eigen::VectorXd decay_diag = Eigen::VectorXd::Zero(dim);
  for (const auto& ch : channels) {
    JumpChannel j;
    j.op = ch.op;
    j.weight = Eigen::VectorXd::Zero(dim);
    const SparseOp cdc = SparseOp(SparseOp(ch.op.adjoint()) * ch.op);
    for (int k = 0; k < cdc.outerSize(); ++k)
      for (SparseOp::InnerIterator it(cdc, k); it; ++it) {
        if (it.row() != it.col())
          throw std::logic_error("collapse operator with non-diagonal C^dag C");
        j.weight[it.row()] = it.value().real();
      }
    decay_diag += j.weight;
    switch (ch.kind) {
      case ChannelKind::CavityMode1: j.channel = EmissionChannel::CavityMode1; j.emits = true; break;
      case ChannelKind::CavityMode2: j.channel = EmissionChannel::CavityMode2; j.emits = true; break;
      case ChannelKind::SpontS: j.channel = EmissionChannel::FreeSpaceS; j.emits = true; break;
      case ChannelKind::SpontD: j.channel = EmissionChannel::FreeSpaceD; j.emits = true; break;
      case ChannelKind::DarkDecay: j.channel = EmissionChannel::DarkJump; j.emits = true; break;
      case ChannelKind::Dephasing: j.channel = EmissionChannel::FreeSpaceS; j.emits = false; break;
    }
    jumps_.push_back(std::move(j));
  }

  auto make_prop = [&](bool drive_on) {
    Eigen::MatrixXcd h_eff = Eigen::MatrixXcd(build_hamiltonian(params_, drive_on));
    h_eff -= Complex(0.0, 0.5) * decay_diag.cast<Complex>().asDiagonal().toDenseMatrix();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h_eff);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("H_eff eigendecomposition failed");
    Propagator p;
    p.v = es.eigenvectors();
    p.v_inv = p.v.inverse();
    p.eigenvalues = es.eigenvalues();
    const double resid =
        (h_eff * p.v - p.v * p.eigenvalues.asDiagonal().toDenseMatrix()).norm() /
        std::max(h_eff.norm(), 1e-300);
    if (resid > 1e-9)
      throw std::runtime_error("H_eff eigendecomposition ill-conditioned");
    return p;
  };
  prop_on_ = make_prop(true);
  prop_off_ = make_prop(false);

  idx_s_plus_ = basis_.index(basis_.scheme.find(Manifold::S12, 1).index, 0, 0);
  idx_s_minus_ = basis_.index(basis_.scheme.find(Manifold::S12, -1).index, 0, 0);
}

Eigen::VectorXcd TrajectoryEngine::initial_state_vector(Xoshiro256pp& rng) const {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis_.dim());
  int idx = idx_s_plus_;
  if (pump_infidelity_ > 0.0 && rng.bernoulli(pump_infidelity_)) idx = idx_s_minus_;
  psi[idx] = 1.0;
  return psi;
}

EmissionRecord TrajectoryEngine::run_trajectory(std::uint64_t seed, std::uint64_t trial) const {
  return run_trajectory_sampled(seed, trial, {}, nullptr);
}

EmissionRecord TrajectoryEngine::run_trajectory_sampled(
    std::uint64_t seed, std::uint64_t trial, const std::vector<double>& sample_times_us,
    std::vector<std::vector<double>>* pops_out) const {
  Xoshiro256pp rng(seed);
  EmissionRecord rec;
  rec.trial = trial;

  const int n_levels = basis_.scheme.n_levels();
  if (pops_out) {
    pops_out->assign(n_levels, std::vector<double>(sample_times_us.size(), 0.0));
  }
  size_t next_sample = 0;

  Eigen::VectorXcd psi = initial_state_vector(rng);
  double threshold = rng.uniform_pos();
  double t_global = 0.0;

  auto take_samples_until = [&](double t_limit, const Propagator& prop,
                                const Eigen::VectorXcd& w, double t_anchor) {
    if (!pops_out) return;
    while (next_sample < sample_times_us.size() &&
           sample_times_us[next_sample] <= t_limit + 1e-12) {
      const double ts = sample_times_us[next_sample];
      Eigen::VectorXcd snap = propagate(prop.v, prop.eigenvalues, w, ts - t_anchor);
      const double n2 = snap.squaredNorm();
      for (int i = 0; i < basis_.dim(); ++i)
        (*pops_out)[basis_.level_of(i)][next_sample] += std::norm(snap[i]) / n2;
      ++next_sample;
    }
  };

  for (const auto& seg : sequence_.segments) {
    const double t_end = t_global + seg.duration_us;
    if (seg.reset) {
      if (pops_out) {
        // State is held at the freshly prepared value during reset.
        Eigen::VectorXcd fresh = initial_state_vector(rng);
        while (next_sample < sample_times_us.size() &&
               sample_times_us[next_sample] <= t_end + 1e-12) {
          for (int i = 0; i < basis_.dim(); ++i)
            (*pops_out)[basis_.level_of(i)][next_sample] += std::norm(fresh[i]);
          ++next_sample;
        }
        psi = fresh;
      } else {
        psi = initial_state_vector(rng);
      }
      threshold = rng.uniform_pos();
      t_global = t_end;
      continue;
    }

    const Propagator& prop = propagator(seg.drive_on);
    double t_cur = t_global;
    Eigen::VectorXcd w = prop.v_inv * psi;

    while (true) {
      const Eigen::VectorXcd psi_end =
          propagate(prop.v, prop.eigenvalues, w, t_end - t_cur);
      if (psi_end.squaredNorm() > threshold) {
        take_samples_until(t_end, prop, w, t_cur);
        psi = psi_end;
        break;
      }
      // Norm crosses the threshold inside (t_cur, t_end]: bisect.
      double lo = 0.0, hi = t_end - t_cur;
      while (hi - lo > kJumpTimeTolUs) {
        const double mid = 0.5 * (lo + hi);
        if (propagate(prop.v, prop.eigenvalues, w, mid).squaredNorm() > threshold)
          lo = mid;
        else
          hi = mid;
      }
      const double tau = 0.5 * (lo + hi);
      take_samples_until(t_cur + tau, prop, w, t_cur);
      const Eigen::VectorXcd psi_jump =
          propagate(prop.v, prop.eigenvalues, w, tau);

      // Channel draw proportional to <C^dag C>.
      double total = 0.0;
      std::vector<double> rates(jumps_.size());
      for (size_t k = 0; k < jumps_.size(); ++k) {
        double r = 0.0;
        const auto& wgt = jumps_[k].weight;
        for (int i = 0; i < basis_.dim(); ++i) r += wgt[i] * std::norm(psi_jump[i]);
        rates[k] = r;
        total += r;
      }
      if (!(total > 0.0))
        throw std::runtime_error("norm underflow between jumps: no active decay channel");
      double u = rng.uniform() * total;
      size_t pick = 0;
      for (; pick + 1 < jumps_.size(); ++pick) {
        if (u < rates[pick]) break;
        u -= rates[pick];
      }

      psi = jumps_[pick].op * psi_jump;
      const double norm = psi.norm();
      if (!(norm > 0.0)) throw std::runtime_error("jump produced a null state");
      psi /= norm;
      if (jumps_[pick].emits)
        rec.events.push_back({t_cur + tau, jumps_[pick].channel});

      threshold = rng.uniform_pos();
      t_cur += tau;
      w = prop.v_inv * psi;
    }
    t_global = t_end;
  }

  return rec;
}

EnsembleResult run_ensemble(const TrajectoryEngine& engine, std::uint64_t n_trials,
                            std::uint64_t master_seed,
                            const std::vector<double>& sample_times_us, int n_threads) {
  const bool want_pops = !sample_times_us.empty();
  if (want_pops && n_trials < 100)
    throw std::invalid_argument("run_ensemble: population statistics require >= 100 trials");
  if (n_trials == 0) throw std::invalid_argument("run_ensemble: n_trials must be > 0");

  if (n_threads <= 0)
    n_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(n_threads), n_trials));

  const int n_levels = engine.basis().scheme.n_levels();
  const size_t n_samples = sample_times_us.size();

  struct Accum {
    std::vector<std::vector<double>> sum, sumsq;
    std::vector<EmissionRecord> records;
  };
  std::vector<Accum> acc(n_threads);
  std::vector<std::thread> workers;

  auto work = [&](int tid) {
    auto& a = acc[tid];
    if (want_pops) {
      a.sum.assign(n_levels, std::vector<double>(n_samples, 0.0));
      a.sumsq.assign(n_levels, std::vector<double>(n_samples, 0.0));
    }
    for (std::uint64_t trial = tid; trial < n_trials; trial += n_threads) {
      const std::uint64_t seed = Xoshiro256pp::stream(master_seed, trial).next();
      if (want_pops) {
        std::vector<std::vector<double>> pops;
        a.records.push_back(
            engine.run_trajectory_sampled(seed, trial, sample_times_us, &pops));
        for (int l = 0; l < n_levels; ++l)
          for (size_t s = 0; s < n_samples; ++s) {
            a.sum[l][s] += pops[l][s];
            a.sumsq[l][s] += pops[l][s] * pops[l][s];
          }
      } else {
        a.records.push_back(engine.run_trajectory(seed, trial));
      }
    }
  };
  for (int tid = 0; tid < n_threads; ++tid) workers.emplace_back(work, tid);
  for (auto& w : workers) w.join();

  EnsembleResult out;
  out.times_us = sample_times_us;
  out.n_trials = n_trials;
  for (auto& a : acc)
    for (auto& r : a.records) out.records.push_back(std::move(r));
  std::sort(out.records.begin(), out.records.end(),
            [](const EmissionRecord& x, const EmissionRecord& y) { return x.trial < y.trial; });

  if (want_pops) {
    out.mean.assign(n_levels, std::vector<double>(n_samples, 0.0));
    out.standard_error.assign(n_levels, std::vector<double>(n_samples, 0.0));
    const double n = static_cast<double>(n_trials);
    for (int l = 0; l < n_levels; ++l)
      for (size_t s = 0; s < n_samples; ++s) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& a : acc) {
          sum += a.sum[l][s];
          sumsq += a.sumsq[l][s];
        }
        const double mean = sum / n;
        const double var = std::max(0.0, sumsq / n - mean * mean);
        out.mean[l][s] = mean;
        out.standard_error[l][s] = std::sqrt(var / n);
      }
  }
  return out;
}

double raman_scatter_free_fraction(const SystemParams& params, const PulseSequence& seq,
                                   std::uint64_t n_trials, std::uint64_t master_seed,
                                   double pump_infidelity, int n_threads) {
  if (!params.dark_enabled())
    throw std::domain_error("raman_scatter_free_fraction: dark level disabled");
  SystemParams off = params;
  off.dark_decay_rate = 0.0;

  const TrajectoryEngine engine_on(params, seq, pump_infidelity);
  const TrajectoryEngine engine_off(off, seq, pump_infidelity);
  const auto on = run_ensemble(engine_on, n_trials, master_seed, {}, n_threads);
  const auto ref = run_ensemble(engine_off, n_trials, master_seed, {}, n_threads);

  auto is_cavity = [](const EmissionEvent& e) {
    return e.channel == EmissionChannel::CavityMode1 ||
           e.channel == EmissionChannel::CavityMode2;
  };

  std::uint64_t good = 0;
  for (const auto& rec : on.records) {
    bool dark_seen = false;
    for (const auto& e : rec.events) {
      if (e.channel == EmissionChannel::DarkJump) dark_seen = true;
      else if (is_cavity(e) && !dark_seen) ++good;
    }
  }
  std::uint64_t total_ref = 0;
  for (const auto& rec : ref.records)
    for (const auto& e : rec.events)
      if (is_cavity(e)) ++total_ref;

  if (total_ref == 0)
    throw std::domain_error("raman_scatter_free_fraction: reference ensemble produced no photons");
  return static_cast<double>(good) / static_cast<double>(total_ref);
}

}  // namespace spsim
