#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace freefall::ode {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <std::size_t N>
using StateVec = std::array<double, N>;

template <std::size_t N>
struct StepControl {
  double rel_tol = 1e-12;
  StateVec<N> abs_tol{};  ///< per-component absolute tolerance floor
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
  double initial_step = 0.0;  ///< 0 => pick from the span
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;

  StepControl() { abs_tol.fill(1e-14); }
  StepControl(double rel, double abs) : rel_tol(rel) { abs_tol.fill(abs); }
};

enum class StepFlow { Continue, Stop };

/// Fehlberg's 13-stage embedded 7(8) pair.  The 8th-order result is
/// propagated; the difference against the embedded 7th-order result
/// provides the error estimate.
template <std::size_t N, class RHS>
class Rkf78 {
 public:
  explicit Rkf78(RHS rhs) : rhs_(rhs) {}

  /// Evaluate one trial step of size h from (u, y).  Writes the state
  /// increment (8th order) into `delta` and returns the scaled error norm
  /// (accept when <= 1).
  double try_step(double u, const StateVec<N>& y, double h, StateVec<N>& delta,
                  const StepControl<N>& ctrl) {
    constexpr int S = 13;
    static constexpr std::array<double, S> c = {
        0.0,       2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5, 5.0 / 6.0,
        1.0 / 6.0, 2.0 / 3.0,  1.0 / 3.0, 1.0,       0.0,        1.0};
    static constexpr std::array<std::array<double, 12>, S> a = {{
        {},
        {2.0 / 27.0},
        {1.0 / 36.0, 1.0 / 12.0},
        {1.0 / 24.0, 0.0, 1.0 / 8.0},
        {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
        {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
        {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
        {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
        {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
        {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0,
         -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0},
        {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0,
         2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0},
        {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0,
         3.0 / 41.0, 6.0 / 41.0, 0.0},
        {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0,
         2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0},
    }};
    static constexpr std::array<double, S> b8 = {
        0.0,        0.0,        0.0, 0.0,         0.0,         34.0 / 105.0, 9.0 / 35.0,
        9.0 / 35.0, 9.0 / 280.0, 9.0 / 280.0, 0.0, 41.0 / 840.0, 41.0 / 840.0};

    rhs_(u, y, k_[0]);
    StateVec<N> work;
    for (int s = 1; s < S; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += a[s][j] * k_[j][i];
        work[i] = y[i] + h * acc;
      }
      rhs_(u + c[s] * h, work, k_[s]);
    }

    double err_norm_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (int s = 0; s < S; ++s) acc += b8[s] * k_[s][i];
      delta[i] = h * acc;
      const double err_i =
          h * (41.0 / 840.0) * (k_[0][i] + k_[10][i] - k_[11][i] - k_[12][i]);
      const double scale =
          ctrl.abs_tol[i] + ctrl.rel_tol * std::max(std::abs(y[i]), std::abs(y[i] + delta[i]));
      const double q = err_i / scale;
      err_norm_sq += q * q;
    }
    return std::sqrt(err_norm_sq / static_cast<double>(N));
  }

 private:
  RHS rhs_;
  std::array<StateVec<N>, 13> k_{};
};

template <std::size_t N>
struct DriveResult {
  StateVec<N> y{};
  double u = 0.0;
  std::size_t accepted_steps = 0;
  bool stopped_by_callback = false;
  double last_step = 0.0;  ///< suggestion for resuming
};

/// Adaptive driver.  `cb(u_prev, y_prev, u_new, y_new)` runs after every
/// accepted step and may stop the integration.  State accumulation is
/// compensated (Kahan) so that secular rounding in long runs stays near
/// one ulp per step rather than growing with the step count.
template <std::size_t N, class RHS, class StepCb>
DriveResult<N> integrate(RHS rhs, StateVec<N> y, double u0, double u1,
                         const StepControl<N>& ctrl, StepCb&& cb) {
  DriveResult<N> out;
  out.y = y;
  out.u = u0;
  if (u0 == u1) return out;

  Rkf78<N, RHS&> stepper(rhs);
  const double dir = (u1 > u0) ? 1.0 : -1.0;
  const double span = std::abs(u1 - u0);
  double h = ctrl.initial_step > 0.0 ? ctrl.initial_step : std::min(span / 100.0, ctrl.max_step);
  h = std::min(h, span);

  StateVec<N> comp{};  // Kahan compensation per component
  StateVec<N> delta;
  double u = u0;
  double err_old = 1e-4;
  constexpr double kAlpha = 0.7 / 8.0;
  constexpr double kBeta = 0.4 / 8.0;
  int consecutive_rejects = 0;
  std::size_t attempts = 0;

  while (dir * (u1 - u) > 0.0) {
    if (++attempts > ctrl.max_steps) {
      throw IntegrationError("integrate(): step budget exhausted at u=" + std::to_string(u));
    }
    h = std::min({h, ctrl.max_step, std::abs(u1 - u)});
    if (h < 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(u), 1.0)) {
      throw IntegrationError("integrate(): step size underflow at u=" + std::to_string(u));
    }

    double err = stepper.try_step(u, y, dir * h, delta, ctrl);
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {  // accept
      const double u_prev = u;
      const StateVec<N> y_prev = y;
      for (std::size_t i = 0; i < N; ++i) {
        const double corrected = delta[i] + comp[i];
        const double t = y[i] + corrected;
        comp[i] = (std::abs(y[i]) >= std::abs(corrected)) ? (y[i] - t) + corrected
                                                          : (corrected - t) + y[i];
        y[i] = t;
      }
      u = u_prev + dir * h;
      ++out.accepted_steps;
      consecutive_rejects = 0;

      const double fac = ctrl.safety * std::pow(std::max(err, 1e-50), -kAlpha) *
                         std::pow(err_old, kBeta);
      err_old = std::max(err, 1e-4);
      const double h_used = h;
      h = h * std::min(ctrl.max_factor, std::max(ctrl.min_factor, fac));
      out.last_step = h_used;

      if (cb(u_prev, y_prev, u, y) == StepFlow::Stop) {
        out.stopped_by_callback = true;
        break;
      }
    } else {  // reject
      ++consecutive_rejects;
      if (consecutive_rejects > 200) {
        throw IntegrationError("integrate(): repeated step rejection at u=" + std::to_string(u));
      }
      const double fac = ctrl.safety * std::pow(err, -1.0 / 8.0);
      h = h * std::min(1.0, std::max(ctrl.min_factor, fac));
    }
  }

  out.y = y;
  out.u = u;
  return out;
}

template <std::size_t N, class RHS>
DriveResult<N> integrate_to(RHS rhs, const StateVec<N>& y, double u0, double u1,
                            const StepControl<N>& ctrl) {
  return integrate<N>(rhs, y, u0, u1, ctrl,
                      [](double, const StateVec<N>&, double, const StateVec<N>&) {
                        return StepFlow::Continue;
                      });
}

}  // namespace freefall::ode
