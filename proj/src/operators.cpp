#include "spsim/operators.hpp"

#include <cmath>

namespace spsim {

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

SparseOp from_triplets(int dim, const Triplets& t) {
  SparseOp m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseOp mode_annihilation(const Basis& basis, int mode) {
  Triplets t;
  const int f = basis.fock;
  for (int l = 0; l < basis.scheme.n_levels(); ++l)
    for (int n1 = 0; n1 < f; ++n1)
      for (int n2 = 0; n2 < f; ++n2) {
        if (mode == 1 && n1 > 0)
          t.emplace_back(basis.index(l, n1 - 1, n2), basis.index(l, n1, n2),
                         std::sqrt(static_cast<double>(n1)));
        if (mode == 2 && n2 > 0)
          t.emplace_back(basis.index(l, n1, n2 - 1), basis.index(l, n1, n2),
                         std::sqrt(static_cast<double>(n2)));
      }
  return from_triplets(basis.dim(), t);
}

SparseOp atomic_projector(const Basis& basis, int level_to, int level_from) {
  Triplets t;
  for (int n1 = 0; n1 < basis.fock; ++n1)
    for (int n2 = 0; n2 < basis.fock; ++n2)
      t.emplace_back(basis.index(level_to, n1, n2), basis.index(level_from, n1, n2), 1.0);
  return from_triplets(basis.dim(), t);
}

SparseOp build_hamiltonian(const SystemParams& p, bool drive_on) {
  const Basis basis(p);
  const auto& scheme = basis.scheme;
  const int f = basis.fock;
  Triplets t;

  // Diagonal part.
  for (const auto& level : scheme.levels()) {
    double e = 0.0;
    if (level.manifold != Manifold::DARK)
      e += zeeman_shift(level, p.b_field, p.g_factors);
    if (level.manifold == Manifold::P12) e += -p.delta_drive;
    if (level.manifold == Manifold::D32)
      e += -(p.delta_drive - p.delta_cavity) - p.raman_offset;
    if (e == 0.0) continue;
    for (int n1 = 0; n1 < f; ++n1)
      for (int n2 = 0; n2 < f; ++n2) {
        const int i = basis.index(level.index, n1, n2);
        t.emplace_back(i, i, e);
      }
  }

  // Drive coupling on S<->P pairs matching the polarization.
  if (drive_on && p.omega_drive != 0.0) {
    const int qd = polarization_q(p.drive_polarization);
    for (const auto& s : scheme.levels()) {
      if (s.manifold != Manifold::S12) continue;
      const auto pu = scheme.try_find(Manifold::P12, s.m2 + 2 * qd);
      if (!pu) continue;
      const double amp = 0.5 * p.omega_drive * dipole_amplitude(*pu, s, qd);
      if (amp == 0.0) continue;
      for (int n1 = 0; n1 < f; ++n1)
        for (int n2 = 0; n2 < f; ++n2) {
          const int is = basis.index(s.index, n1, n2);
          const int ip = basis.index(pu->index, n1, n2);
          t.emplace_back(ip, is, amp);
          t.emplace_back(is, ip, amp);
        }
    }
  }

  // Cavity coupling on P<->D pairs: g0*amp*(a_k |P><D| + a_k^dag |D><P|).
  // Mode 1 is polarized along B (q=0), mode 2 carries q=+1 and q=-1 with
  // weight 1/sqrt(2) each.
  if (p.g0 != 0.0) {
    for (const auto& pu : scheme.levels()) {
      if (pu.manifold != Manifold::P12) continue;
      for (int q : {-1, 0, 1}) {
        const auto d = scheme.try_find(Manifold::D32, pu.m2 - 2 * q);
        if (!d) continue;
        const int mode = (q == 0) ? 1 : 2;
        const double w = (q == 0) ? 1.0 : 1.0 / std::sqrt(2.0);
        const double amp = p.g0 * w * dipole_amplitude(pu, *d, q);
        if (amp == 0.0) continue;
        for (int n1 = 0; n1 < f; ++n1)
          for (int n2 = 0; n2 < f; ++n2) {
            // a_k |P, n><D, n'| with n' = n + 1 in the coupled mode.
            const int n = (mode == 1) ? n1 : n2;
            if (n + 1 >= f) continue;
            const double root = std::sqrt(static_cast<double>(n + 1));
            const int ip = basis.index(pu.index, n1, n2);
            const int id = (mode == 1) ? basis.index(d->index, n1 + 1, n2)
                                       : basis.index(d->index, n1, n2 + 1);
            t.emplace_back(ip, id, amp * root);
            t.emplace_back(id, ip, amp * root);
          }
      }
    }
  }

  return from_triplets(basis.dim(), t);
}

std::vector<CollapseChannel> build_collapse_operators(const SystemParams& p) {
  const Basis basis(p);
  const auto& scheme = basis.scheme;
  std::vector<CollapseChannel> out;

  if (p.kappa > 0.0) {
    const double amp = std::sqrt(2.0 * p.kappa);
    out.push_back({SparseOp(amp * mode_annihilation(basis, 1)), ChannelKind::CavityMode1});
    out.push_back({SparseOp(amp * mode_annihilation(basis, 2)), ChannelKind::CavityMode2});
  }

  if (p.gamma_total > 0.0) {
    for (const auto& pu : scheme.levels()) {
      if (pu.manifold != Manifold::P12) continue;
      for (int q : {-1, 0, 1}) {
        for (Manifold lower_manifold : {Manifold::S12, Manifold::D32}) {
          const auto lo = scheme.try_find(lower_manifold, pu.m2 - 2 * q);
          if (!lo) continue;
          const double branch = (lower_manifold == Manifold::S12)
                                    ? p.gamma_total * (1.0 - p.branching_sd)
                                    : p.gamma_total * p.branching_sd;
          const double amp = std::sqrt(branch) * dipole_amplitude(pu, *lo, q);
          if (amp == 0.0) continue;
          CollapseChannel ch;
          ch.op = SparseOp(amp * atomic_projector(basis, lo->index, pu.index));
          ch.kind = (lower_manifold == Manifold::S12) ? ChannelKind::SpontS
                                                      : ChannelKind::SpontD;
          ch.source_level = pu.index;
          ch.target_level = lo->index;
          ch.q = q;
          out.push_back(std::move(ch));
        }
      }
    }
  }

  if (p.drive_linewidth > 0.0) {
    Triplets t;
    const double amp = std::sqrt(p.drive_linewidth);
    for (const auto& l : scheme.levels()) {
      if (l.manifold != Manifold::S12) continue;
      for (int n1 = 0; n1 < basis.fock; ++n1)
        for (int n2 = 0; n2 < basis.fock; ++n2) {
          const int i = basis.index(l.index, n1, n2);
          t.emplace_back(i, i, amp);
        }
    }
    out.push_back({from_triplets(basis.dim(), t), ChannelKind::Dephasing});
  }

  if (p.dark_enabled()) {
    const auto& dark = scheme.find(Manifold::DARK, 0);
    const auto& src = scheme.find(Manifold::S12, -1);
    CollapseChannel ch;
    ch.op = SparseOp(std::sqrt(p.dark_decay_rate) *
                     atomic_projector(basis, dark.index, src.index));
    ch.kind = ChannelKind::DarkDecay;
    ch.source_level = src.index;
    ch.target_level = dark.index;
    out.push_back(std::move(ch));
  }

  return out;
}

double hermiticity_defect(const SparseOp& h) {
  const DenseOp dense(h);
  const double scale = dense.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (dense - dense.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace spsim
