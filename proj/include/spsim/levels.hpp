#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spsim {

enum class Manifold { S12, P12, D32, DARK };

const char* manifold_name(Manifold m);

// One Zeeman sublevel. Magnetic quantum numbers are stored doubled (m2 = 2m)
// so half-integers stay exact.
struct AtomicLevel {
  Manifold manifold;
  int m2;
  int index;

  double m() const { return 0.5 * m2; }
};

// Total angular momentum (doubled) of a manifold; DARK is a single synthetic
// sublevel with no angular-momentum structure.
int manifold_j2(Manifold m);

// Lande g-factors per manifold, configurable. Defaults follow the Lande
// formula (g_S uses the free-electron value).
struct GFactors {
  double s = 2.0023;
  double p = 2.0 / 3.0;
  double d = 0.8;

  double of(Manifold m) const;
};

// Fixed basis ordering of the ion's internal states:
//   0 S(-1/2), 1 S(+1/2), 2 P(-1/2), 3 P(+1/2),
//   4 D(-3/2), 5 D(-1/2), 6 D(+1/2), 7 D(+3/2), [8 DARK]
class LevelScheme {
 public:
  explicit LevelScheme(bool with_dark_level);

  int n_levels() const { return static_cast<int>(levels_.size()); }
  bool has_dark() const { return with_dark_; }
  const std::vector<AtomicLevel>& levels() const { return levels_; }
  const AtomicLevel& level(int index) const { return levels_.at(index); }

  // Throws std::domain_error if the sublevel does not exist.
  const AtomicLevel& find(Manifold m, int m2) const;
  std::optional<AtomicLevel> try_find(Manifold m, int m2) const;

  std::string label(int index) const;

 private:
  bool with_dark_;
  std::vector<AtomicLevel> levels_;
};

// Wigner 3-j symbol with doubled arguments (j2x = 2*j, ...).
double wigner3j(int j2a, int j2b, int j2c, int m2a, int m2b, int m2c);

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j3 m3>, doubled arguments.
double clebsch_gordan(int j21, int m21, int j22, int m22, int j23, int m23);

// Dipole transition amplitude <j_l m_l; 1 q | j_u m_u> for decay/excitation
// between a P1/2 sublevel and an S1/2 or D3/2 sublevel. Normalized such that
// sum over (q, m_l) of |amp|^2 = 1 for each upper sublevel and each lower
// manifold separately. Zero whenever m_u - m_l != q.
// Throws std::domain_error for invalid manifolds, |m| out of range or |q| > 1.
double dipole_amplitude(const AtomicLevel& upper, const AtomicLevel& lower, int q);

// Linear Zeeman shift g_j * m * mu_B * B / hbar in rad/us.
// Throws std::domain_error for the DARK level.
double zeeman_shift(const AtomicLevel& level, double b_field_tesla, const GFactors& g);

}  // namespace spsim
