#include "spsim/master_equation.hpp"

#include <cmath>
#include <stdexcept>

namespace spsim {

DenseOp lindblad_rhs(const DenseOp& rho, const SparseOp& h,
                     const std::vector<SparseOp>& collapse) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("lindblad_rhs: rho not square");
  if (h.rows() != rho.rows() || h.cols() != rho.cols())
    throw std::invalid_argument("lindblad_rhs: H/rho dimension mismatch");
  const Complex mi(0.0, -1.0);
  DenseOp out = mi * (h * rho - rho * h);
  for (const auto& c : collapse) {
    if (c.rows() != rho.rows())
      throw std::invalid_argument("lindblad_rhs: collapse dimension mismatch");
    const DenseOp crho = c * rho;
    const SparseOp cdag = SparseOp(c.adjoint());
    const SparseOp cdc = SparseOp(cdag * c);
    out += crho * cdag - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

// kron(outer, inner) acting on column-major vec(rho):
// vec(A rho B) = kron(B^T, A) vec(rho).
void add_kron(Triplets& t, const SparseOp& outer, const SparseOp& inner,
              Complex scale) {
  const int n = static_cast<int>(inner.rows());
  for (int ko = 0; ko < outer.outerSize(); ++ko)
    for (SparseOp::InnerIterator io(outer, ko); io; ++io)
      for (int ki = 0; ki < inner.outerSize(); ++ki)
        for (SparseOp::InnerIterator ii(inner, ki); ii; ++ii)
          t.emplace_back(static_cast<int>(io.row()) * n + static_cast<int>(ii.row()),
                         static_cast<int>(io.col()) * n + static_cast<int>(ii.col()),
                         scale * io.value() * ii.value());
}

SparseOp identity(int n) {
  SparseOp id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

Liouvillian::Liouvillian(const SparseOp& h, const std::vector<CollapseChannel>& channels)
    : dim_(static_cast<int>(h.rows())), super_(dim_ * dim_, dim_ * dim_) {
  const SparseOp id = identity(dim_);
  Triplets t;
  const Complex mi(0.0, -1.0);
  add_kron(t, id, h, mi);                                // -i H rho
  add_kron(t, SparseOp(h.transpose()), id, -mi);         // +i rho H
  for (const auto& ch : channels) {
    const SparseOp cdag = SparseOp(ch.op.adjoint());
    const SparseOp cdc = SparseOp(cdag * ch.op);
    add_kron(t, SparseOp(ch.op.conjugate()), ch.op, 1.0);     // C rho C^dag
    add_kron(t, id, cdc, -0.5);                               // -1/2 C^dag C rho
    add_kron(t, SparseOp(cdc.transpose()), id, -0.5);         // -1/2 rho C^dag C
  }
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> rm(dim_ * dim_, dim_ * dim_);
  rm.setFromTriplets(t.begin(), t.end());
  rm.makeCompressed();
  super_ = rm;
}

void Liouvillian::apply(const Eigen::VectorXcd& vec_rho, Eigen::VectorXcd& out) const {
  out.noalias() = super_ * vec_rho;
}

DenseOp initial_state(const SystemParams& p, double pump_infidelity) {
  const Basis basis(p);
  DenseOp rho = DenseOp::Zero(basis.dim(), basis.dim());
  const int up = basis.index(basis.scheme.find(Manifold::S12, 1).index, 0, 0);
  const int down = basis.index(basis.scheme.find(Manifold::S12, -1).index, 0, 0);
  rho(up, up) = 1.0 - pump_infidelity;
  rho(down, down) = pump_infidelity;
  return rho;
}

namespace {

struct Observables {
  std::vector<double> pops;
  double flux1;
  double flux2;
};

Observables observe(const Basis& basis, const SystemParams& p,
                    const Eigen::VectorXcd& vec_rho) {
  const int dim = basis.dim();
  Observables o;
  o.pops.assign(basis.scheme.n_levels(), 0.0);
  double n1 = 0.0, n2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = vec_rho[i * dim + i].real();
    o.pops[basis.level_of(i)] += d;
    n1 += basis.n1_of(i) * d;
    n2 += basis.n2_of(i) * d;
  }
  o.flux1 = 2.0 * p.kappa * n1;
  o.flux2 = 2.0 * p.kappa * n2;
  return o;
}

// True when the state has negligible excited-state and photon content, so
// the remaining drive-off dynamics factorizes into diagonal phases,
// S-manifold dephasing and the dark-level transfer.
bool quiescent(const Basis& basis, const Observables& o, const SystemParams& p,
               double threshold) {
  double excited = (o.flux1 + o.flux2) / std::max(2.0 * p.kappa, 1e-300);
  for (const auto& l : basis.scheme.levels())
    if (l.manifold == Manifold::P12) excited += o.pops[l.index];
  return excited < threshold;
}

// Closed-form evolution of a quiescent state over dt (drive off): zero out
// the excited/photonic sectors and apply per-element phase rotation,
// dephasing decay and the S(-1/2) -> DARK transfer.
void fast_forward(const Basis& basis, const SystemParams& p, DenseOp& rho, double dt) {
  const int dim = basis.dim();
  const auto& scheme = basis.scheme;
  const int nl = scheme.n_levels();

  std::vector<int> keep;           // vacuum indices of S, D, DARK levels
  std::vector<double> energy(nl, 0.0);
  std::vector<bool> in_s(nl, false);
  for (const auto& l : scheme.levels()) {
    if (l.manifold == Manifold::P12) continue;
    keep.push_back(basis.index(l.index, 0, 0));
    in_s[l.index] = l.manifold == Manifold::S12;
    if (l.manifold == Manifold::DARK) continue;
    energy[l.index] = zeeman_shift(l, p.b_field, p.g_factors);
    if (l.manifold == Manifold::D32)
      energy[l.index] += -(p.delta_drive - p.delta_cavity) - p.raman_offset;
  }

  DenseOp next = DenseOp::Zero(dim, dim);
  const double gd = p.dark_decay_rate;
  const int sigma = basis.index(scheme.find(Manifold::S12, -1).index, 0, 0);
  const int dark_idx =
      p.dark_enabled() ? basis.index(scheme.find(Manifold::DARK, 0).index, 0, 0) : -1;

  for (int a : keep) {
    for (int b : keep) {
      const int la = basis.level_of(a), lb = basis.level_of(b);
      double decay = (in_s[la] != in_s[lb]) ? 0.5 * p.drive_linewidth : 0.0;
      if (p.dark_enabled()) {
        if (a == sigma) decay += 0.5 * gd;
        if (b == sigma) decay += 0.5 * gd;
      }
      const double phase = -(energy[la] - energy[lb]) * dt;
      next(a, b) = rho(a, b) * std::polar(std::exp(-decay * dt), phase);
    }
  }
  if (p.dark_enabled() && dark_idx >= 0)
    next(dark_idx, dark_idx) += rho(sigma, sigma).real() * (1.0 - std::exp(-gd * dt));
  rho = next;
}

constexpr double kQuiescentThreshold = 1e-9;

}  // namespace

EvolutionRecord integrate(const SystemParams& p, const PulseSequence& seq,
                          const DenseOp& rho0, const IntegrateOptions& opts) {
  seq.validate();
  const Basis basis(p);
  const int dim = basis.dim();
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw std::invalid_argument("integrate: rho0 dimension mismatch");
  if (!(opts.atol > 0.0) || !(opts.rtol > 0.0))
    throw std::invalid_argument("integrate: tolerances must be positive");

  const auto channels = build_collapse_operators(p);
  const Liouvillian l_on(build_hamiltonian(p, true), channels);
  const Liouvillian l_off(build_hamiltonian(p, false), channels);

  EvolutionRecord rec;
  for (const auto& l : basis.scheme.levels()) {
    rec.level_labels.push_back(basis.scheme.label(l.index));
    rec.populations.emplace_back();
  }

  auto record = [&](double t, const Eigen::VectorXcd& v) {
    if (!rec.times_us.empty() && t <= rec.times_us.back() + 0.5 * opts.output_dt_us)
      return;
    const auto o = observe(basis, p, v);
    rec.times_us.push_back(t);
    for (int l = 0; l < basis.scheme.n_levels(); ++l)
      rec.populations[l].push_back(o.pops[l]);
    rec.flux_mode1.push_back(o.flux1);
    rec.flux_mode2.push_back(o.flux2);
  };

  DenseOp rho = rho0;
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim * dim);
  record(0.0, v);

  double t = 0.0;
  double h = 0.0;
  for (const auto& seg : seq.segments) {
    const double t_end = t + seg.duration_us;
    if (seg.reset) {
      rho = (opts.reset_state.size() > 0) ? opts.reset_state : rho0;
      v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim * dim);
      for (double ts = std::ceil((t - 1e-9) / opts.output_dt_us) * opts.output_dt_us;
           ts <= t_end + 1e-9; ts += opts.output_dt_us)
        record(ts, v);
      t = t_end;
      continue;
    }

    const Liouvillian& liou = seg.drive_on ? l_on : l_off;
    auto rhs = [&](const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
      liou.apply(y, dydt);
    };

    double t_seg = t;
    while (t_seg < t_end - 1e-9) {
      if (!seg.drive_on) {
        rho = Eigen::Map<const DenseOp>(v.data(), dim, dim);
        if (quiescent(basis, observe(basis, p, v), p, kQuiescentThreshold)) {
          // Remaining dynamics is analytic; sample on the grid directly.
          DenseOp base = rho;
          const double t0 = t_seg;
          for (double ts = std::ceil((t0 + 1e-9) / opts.output_dt_us) * opts.output_dt_us;
               ts <= t_end + 1e-9; ts += opts.output_dt_us) {
            DenseOp snap = base;
            fast_forward(basis, p, snap, ts - t0);
            record(ts, Eigen::Map<const Eigen::VectorXcd>(snap.data(), dim * dim));
          }
          fast_forward(basis, p, rho, t_end - t0);
          v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), dim * dim);
          t_seg = t_end;
          break;
        }
      }
      // Integrate one sampling interval, then re-test for quiescence.
      const double t_next = seg.drive_on
                                ? t_end
                                : std::min(t_end, t_seg + 10.0 * opts.output_dt_us);
      integrate_dopri5(rhs, v, t_seg, t_next, opts.output_dt_us, opts.atol,
                       opts.rtol, record, &h);
      t_seg = t_next;
    }
    t = t_end;
  }

  rec.efficiency = creation_efficiency(rec, seq);
  return rec;
}

double photon_flux(const DenseOp& rho, const SystemParams& p, int mode) {
  const Basis basis(p);
  double n = 0.0;
  for (int i = 0; i < basis.dim(); ++i)
    n += ((mode == 1) ? basis.n1_of(i) : basis.n2_of(i)) * rho(i, i).real();
  return 2.0 * p.kappa * n;
}

double creation_efficiency(const EvolutionRecord& rec, const PulseSequence& seq) {
  const int drive = seq.drive_segment();
  const double t_lo = seq.segment_start_us(drive);
  double t_hi = seq.period_us();
  for (size_t i = drive + 1; i < seq.segments.size(); ++i)
    if (seq.segments[i].reset) {
      t_hi = seq.segment_start_us(static_cast<int>(i));
      break;
    }
  double integral = 0.0;
  for (size_t k = 0; k + 1 < rec.times_us.size(); ++k) {
    const double ta = rec.times_us[k], tb = rec.times_us[k + 1];
    if (ta < t_lo - 1e-9 || tb > t_hi + 1e-9) continue;
    const double fa = rec.flux_mode1[k] + rec.flux_mode2[k];
    const double fb = rec.flux_mode1[k + 1] + rec.flux_mode2[k + 1];
    integral += 0.5 * (fa + fb) * (tb - ta);
  }
  return integral;
}

double decay_contribution_to_target(const SystemParams& p, const PulseSequence& seq,
                                    const IntegrateOptions& opts) {
  const Basis basis(p);
  const int target = basis.scheme.find(Manifold::D32, -1).index;
  const int drive = seq.drive_segment();

  PulseSequence drive_only;
  drive_only.segments = {seq.segments.at(drive)};

  auto final_target_pop = [&](bool remove_spont_to_target) {
    SystemParams q = p;
    auto channels = build_collapse_operators(q);
    if (remove_spont_to_target) {
      std::erase_if(channels, [&](const CollapseChannel& ch) {
        return ch.kind == ChannelKind::SpontD && ch.target_level == target;
      });
    }
    const Liouvillian liou(build_hamiltonian(q, true), channels);
    auto rhs = [&](const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
      liou.apply(y, dydt);
    };
    DenseOp rho = initial_state(q);
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    integrate_dopri5(rhs, v, 0.0, drive_only.segments[0].duration_us,
                     drive_only.segments[0].duration_us, opts.atol, opts.rtol,
                     [](double, const Eigen::VectorXcd&) {});
    double pop = 0.0;
    const int dim = basis.dim();
    for (int n1 = 0; n1 < basis.fock; ++n1)
      for (int n2 = 0; n2 < basis.fock; ++n2) {
        const int i = basis.index(target, n1, n2);
        pop += v[i * dim + i].real();
      }
    return pop;
  };

  if (p.gamma_total == 0.0) return 0.0;
  return final_target_pop(false) - final_target_pop(true);
}

double scatter_free_fraction_me(const SystemParams& p, const PulseSequence& seq,
                                const IntegrateOptions& opts) {
  if (!p.dark_enabled())
    throw std::domain_error("scatter_free_fraction_me: dark level disabled");
  SystemParams off = p;
  off.dark_decay_rate = 0.0;
  IntegrateOptions o = opts;
  o.output_dt_us = std::max(opts.output_dt_us, 0.1);
  const auto rec_on = integrate(p, seq, initial_state(p), o);
  const auto rec_off = integrate(off, seq, initial_state(off), o);
  const double y_on = creation_efficiency(rec_on, seq);
  const double y_off = creation_efficiency(rec_off, seq);
  if (y_off <= 0.0)
    throw std::domain_error("scatter_free_fraction_me: no photons produced");
  return y_on / y_off;
}

double trace_of(const DenseOp& rho) { return rho.trace().real(); }

double hermiticity_defect_dense(const DenseOp& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DenseOp& rho) {
  Eigen::SelfAdjointEigenSolver<DenseOp> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff();
}

}  // namespace spsim
