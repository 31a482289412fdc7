#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spsim {

// Thrown when the adaptive controller can no longer make progress; carries
// the integration time reached.
struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& msg, double t)
      : std::runtime_error(msg + " at t=" + std::to_string(t) + " us"), time_reached(t) {}
  double time_reached;
};

struct OdeStats {
  std::uint64_t steps_accepted = 0;
  std::uint64_t steps_rejected = 0;
};

// Embedded Dormand-Prince 5(4) with PI step-size control on complex state
// vectors. Rhs signature: rhs(const VectorXcd& y, VectorXcd& dydt).
//
// Integrates y in place from t0 to t1 and invokes sample(t, y) at every
// point of the uniform grid t0 + k*sample_dt (including both endpoints when
// they fall on the grid). Steps are clamped so grid points are hit exactly.
template <class Rhs, class Sampler>
OdeStats integrate_dopri5(Rhs&& rhs, Eigen::VectorXcd& y, double t0, double t1,
                          double sample_dt, double atol, double rtol,
                          Sampler&& sample, double* h_inout = nullptr) {
  using Vec = Eigen::VectorXcd;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 5th-order minus embedded 4th-order weights.
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const auto n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

  OdeStats stats;
  double t = t0;
  double h = (h_inout && *h_inout > 0.0) ? *h_inout : sample_dt * 1e-3;
  double err_prev = 1.0;

  double next_sample = t0;
  auto emit_due_samples = [&](double tcur) {
    while (next_sample <= tcur + 1e-12 * std::max(1.0, std::abs(tcur))) {
      if (next_sample > t1 + 1e-12) break;
      sample(std::min(next_sample, t1), y);
      next_sample += sample_dt;
    }
  };
  emit_due_samples(t);

  rhs(y, k1);
  bool k1_fresh = true;

  while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    // Do not step past the segment end or the next sample point.
    double h_try = std::min({h, t1 - t, next_sample - t > 1e-14 ? next_sample - t : h});
    h_try = std::min(h_try, t1 - t);
    if (!(h_try > 0.0) || t + h_try == t)
      throw IntegrationError("step size underflow", t);

    if (!k1_fresh) {
      rhs(y, k1);
      k1_fresh = true;
    }

    ytmp = y + h_try * (a21 * k1);
    rhs(ytmp, k2);
    ytmp = y + h_try * (a31 * k1 + a32 * k2);
    rhs(ytmp, k3);
    ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(ytmp, k4);
    ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(ytmp, k5);
    ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(ytmp, k6);
    ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(ynew, k7);
    yerr = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // Scaled RMS error over real and imaginary parts.
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = std::abs(yerr[i]) / scale;
      acc += q * q;
    }
    const double err = std::sqrt(acc / static_cast<double>(n));

    if (err <= 1.0) {
      const bool clamped = h_try < h;
      t += h_try;
      y.swap(ynew);
      k1 = k7;  // FSAL
      k1_fresh = true;
      ++stats.steps_accepted;
      emit_due_samples(t);
      const double grow =
          0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      const double h_opt = h_try * std::clamp(grow, 0.2, 5.0);
      // A step clamped to a grid point must not drag the controller down.
      h = clamped ? std::max(h, h_opt) : h_opt;
      err_prev = std::max(err, 1e-10);
    } else {
      ++stats.steps_rejected;
      h = h_try * std::max(0.2, 0.9 * std::pow(err, -0.2));
      k1_fresh = true;  // y unchanged, k1 still valid
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow after rejection", t);
    }
  }
  emit_due_samples(t1);
  if (h_inout) *h_inout = h;
  return stats;
}

}  // namespace spsim
