#include "freefall/rectilinear.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "freefall/ode.hpp"

namespace freefall::rectilinear {

namespace {
constexpr double kPi = std::numbers::pi;
}

Solution make_solution(double initial_separation, double mu) {
  if (initial_separation <= 0.0 || mu <= 0.0) {
    throw std::invalid_argument("make_solution(): separation and mu must be positive");
  }
  Solution sol;
  sol.initial_separation = initial_separation;
  sol.mu = mu;
  sol.semi_major = 0.5 * initial_separation;
  sol.time_unit = std::sqrt(sol.semi_major * sol.semi_major * sol.semi_major / mu);
  sol.collapse_time = kPi * sol.time_unit;
  return sol;
}

Point eval(const Solution& sol, double u) {
  if (u < 0.0 || u > kPi + 1e-9) {
    throw std::invalid_argument("eval(): u must lie in [0, pi]");
  }
  Point p;
  p.u = u;
  p.separation = sol.semi_major * (1.0 + std::cos(u));
  p.t = sol.time_unit * (u + std::sin(u));
  p.collision = (kPi - u) <= 1e-12;
  if (p.collision) {
    p.separation = 0.0;
    p.radial_velocity = 0.0;  // diverges; flagged instead of reported
  } else {
    p.radial_velocity = -std::sqrt(sol.mu / sol.semi_major) * std::tan(0.5 * u);
  }
  return p;
}

double anomaly_from_time(const Solution& sol, double t) {
  if (t < 0.0 || t > sol.collapse_time * (1.0 + 1e-12)) {
    throw std::invalid_argument("anomaly_from_time(): t outside [0, collapse time]");
  }
  const double target = t / sol.time_unit;  // solve u + sin u = target
  double lo = 0.0, hi = kPi;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid + std::sin(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double u = 0.5 * (lo + hi);
  // Newton polish where the derivative is healthy.
  for (int i = 0; i < 3; ++i) {
    const double f = u + std::sin(u) - target;
    const double fp = 1.0 + std::cos(u);
    if (fp < 1e-8) break;
    u -= f / fp;
    if (u < 0.0) u = 0.0;
    if (u > kPi) u = kPi;
  }
  return u;
}

double collapse_time(double initial_separation, double mu) {
  return make_solution(initial_separation, mu).collapse_time;
}

double near_collision_separation(double mu, double dt) {
  return std::cbrt(4.5 * mu * dt * dt);
}

double near_collision_speed(double mu, double dt) {
  return std::cbrt(4.0 * mu / (3.0 * dt));
}

double approach_invariant(const Solution& sol, double dt) {
  const double t = sol.collapse_time - dt;
  if (t < 0.0) {
    throw std::invalid_argument("approach_invariant(): dt exceeds the collapse time");
  }
  const double u = anomaly_from_time(sol, t);
  const double s = std::sin(0.5 * u);
  return 2.0 * sol.mu * s * s;
}

FundamentalBasis fundamental_basis(double u) {
  FundamentalBasis b;
  b.along_1 = 2.0 * std::tan(0.5 * u);
  b.transverse_1 = std::sin(u);
  b.transverse_2 = 0.5 * (1.0 + std::cos(u));
  return b;
}

namespace {

void variational_rhs(double u, const ode::StateVec<4>& y, ode::StateVec<4>& dy) {
  const double tan_half = std::tan(0.5 * u);
  const double cos_half = std::cos(0.5 * u);
  const double inv_cos_sq = 1.0 / (cos_half * cos_half);
  // y = {xi, xi', eta, eta'}
  dy[0] = y[1];
  dy[1] = -tan_half * y[1] + inv_cos_sq * y[0];
  dy[2] = y[3];
  dy[3] = -tan_half * y[3] - 0.5 * inv_cos_sq * y[2];
}

}  // namespace

VariationalState integrate_variational(const VariationalState& init, double u0, double u1,
                                       double tol) {
  ode::StateVec<4> y = {init.xi, init.xi_prime, init.eta, init.eta_prime};
  ode::StepControl<4> ctrl(tol, tol * 1e-2);
  const auto res = ode::integrate_to<4>(variational_rhs, y, u0, u1, ctrl);
  return {res.y[0], res.y[1], res.y[2], res.y[3]};
}

double second_along_solution(double u, double tol) {
  VariationalState s;
  s.xi = 1.0;
  s.xi_prime = 0.0;
  return integrate_variational(s, 0.0, u, tol).xi;
}

double along_wronskian(double u) {
  const double c = std::cos(0.5 * u);
  return -c * c;
}

}  // namespace freefall::rectilinear
