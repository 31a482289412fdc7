#include "spsim/levels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "spsim/constants.hpp"

namespace spsim {

const char* manifold_name(Manifold m) {
  switch (m) {
    case Manifold::S12: return "S12";
    case Manifold::P12: return "P12";
    case Manifold::D32: return "D32";
    case Manifold::DARK: return "DARK";
  }
  return "?";
}

int manifold_j2(Manifold m) {
  switch (m) {
    case Manifold::S12: return 1;
    case Manifold::P12: return 1;
    case Manifold::D32: return 3;
    case Manifold::DARK: return 0;
  }
  return 0;
}

double GFactors::of(Manifold m) const {
  switch (m) {
    case Manifold::S12: return s;
    case Manifold::P12: return p;
    case Manifold::D32: return d;
    case Manifold::DARK:
      throw std::domain_error("DARK level carries no g-factor");
  }
  return 0.0;
}

LevelScheme::LevelScheme(bool with_dark_level) : with_dark_(with_dark_level) {
  int idx = 0;
  for (int m2 : {-1, 1}) levels_.push_back({Manifold::S12, m2, idx++});
  for (int m2 : {-1, 1}) levels_.push_back({Manifold::P12, m2, idx++});
  for (int m2 : {-3, -1, 1, 3}) levels_.push_back({Manifold::D32, m2, idx++});
  if (with_dark_) levels_.push_back({Manifold::DARK, 0, idx++});
}

const AtomicLevel& LevelScheme::find(Manifold m, int m2) const {
  for (const auto& l : levels_)
    if (l.manifold == m && l.m2 == m2) return l;
  throw std::domain_error(std::string("no sublevel ") + manifold_name(m) +
                          " m2=" + std::to_string(m2));
}

std::optional<AtomicLevel> LevelScheme::try_find(Manifold m, int m2) const {
  for (const auto& l : levels_)
    if (l.manifold == m && l.m2 == m2) return l;
  return std::nullopt;
}

std::string LevelScheme::label(int index) const {
  const auto& l = level(index);
  if (l.manifold == Manifold::DARK) return "dark";
  std::string s;
  switch (l.manifold) {
    case Manifold::S12: s = "s"; break;
    case Manifold::P12: s = "p"; break;
    case Manifold::D32: s = "d"; break;
    default: break;
  }
  s += (l.m2 < 0) ? "m" : "p";
  s += std::to_string(std::abs(l.m2));
  s += "2";  // m in units of 1/2
  return s;
}

namespace {

double factorial(int n) {
  static const auto table = [] {
    std::array<double, 40> t{};
    t[0] = 1.0;
    for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  return table.at(static_cast<size_t>(n));
}

bool triangle_violated(int j2a, int j2b, int j2c) {
  return j2c > j2a + j2b || j2c < std::abs(j2a - j2b) || ((j2a + j2b + j2c) % 2) != 0;
}

}  // namespace

double wigner3j(int j2a, int j2b, int j2c, int m2a, int m2b, int m2c) {
  if ((j2a + m2a) % 2 || (j2b + m2b) % 2 || (j2c + m2c) % 2)
    throw std::domain_error("wigner3j: m must have the same parity as j");
  if (std::abs(m2a) > j2a || std::abs(m2b) > j2b || std::abs(m2c) > j2c) return 0.0;
  if (m2a + m2b + m2c != 0) return 0.0;
  if (triangle_violated(j2a, j2b, j2c)) return 0.0;

  // Racah's closed form. All (x) arguments below are guaranteed integral.
  auto f2 = [](int doubled) { return factorial(doubled / 2); };
  const double prefactor = std::sqrt(
      f2(j2a + j2b - j2c) * f2(j2a - j2b + j2c) * f2(-j2a + j2b + j2c) /
      f2(j2a + j2b + j2c + 2) * f2(j2a + m2a) * f2(j2a - m2a) * f2(j2b + m2b) *
      f2(j2b - m2b) * f2(j2c + m2c) * f2(j2c - m2c));

  const int kmin =
      std::max({0, (j2b - j2c - m2a) / 2, (j2a - j2c + m2b) / 2});
  const int kmax = std::min(
      {(j2a + j2b - j2c) / 2, (j2a - m2a) / 2, (j2b + m2b) / 2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double denom = factorial(k) * f2(j2a + j2b - j2c - 2 * k) *
                         f2(j2a - m2a - 2 * k) * f2(j2b + m2b - 2 * k) *
                         f2(j2c - j2b + m2a + 2 * k) * f2(j2c - j2a - m2b + 2 * k);
    sum += ((k % 2) ? -1.0 : 1.0) / denom;
  }
  const int phase2 = j2a - j2b - m2c;  // doubled exponent, guaranteed even
  const double sign = ((phase2 / 2) % 2) ? -1.0 : 1.0;
  return sign * prefactor * sum;
}

double clebsch_gordan(int j21, int m21, int j22, int m22, int j23, int m23) {
  if (m21 + m22 != m23) return 0.0;
  const int phase2 = j21 - j22 + m23;
  const double sign = ((phase2 / 2) % 2) ? -1.0 : 1.0;
  return sign * std::sqrt(static_cast<double>(j23 + 1)) *
         wigner3j(j21, j22, j23, m21, m22, -m23);
}

double dipole_amplitude(const AtomicLevel& upper, const AtomicLevel& lower, int q) {
  if (upper.manifold != Manifold::P12)
    throw std::domain_error("dipole_amplitude: upper level must be P1/2");
  if (lower.manifold != Manifold::S12 && lower.manifold != Manifold::D32)
    throw std::domain_error("dipole_amplitude: lower level must be S1/2 or D3/2");
  if (std::abs(q) > 1) throw std::domain_error("dipole_amplitude: |q| > 1");
  if (std::abs(upper.m2) > manifold_j2(upper.manifold) ||
      std::abs(lower.m2) > manifold_j2(lower.manifold))
    throw std::domain_error("dipole_amplitude: |m| out of range");
  if (upper.m2 - lower.m2 != 2 * q) return 0.0;
  return clebsch_gordan(manifold_j2(lower.manifold), lower.m2, 2, 2 * q,
                        manifold_j2(upper.manifold), upper.m2);
}

double zeeman_shift(const AtomicLevel& level, double b_field_tesla, const GFactors& g) {
  if (level.manifold == Manifold::DARK)
    throw std::domain_error("zeeman_shift: DARK level has no Zeeman structure");
  // mu_B/h in MHz/T, times 2*pi for rad/us.
  const double mhz_per_tesla = kBohrMagnetonGHzPerTesla * 1e3;
  return mhz_to_angular(g.of(level.manifold) * level.m() * mhz_per_tesla * b_field_tesla);
}

}  // namespace spsim
