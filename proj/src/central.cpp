#include "freefall/central.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace freefall::central {

namespace {
constexpr double kPi = std::numbers::pi;
}

PlanarState equilateral_state(const std::array<double, 3>& masses, double side, double g,
                              double orientation) {
  if (side <= 0.0) throw std::invalid_argument("equilateral_state(): side must be positive");
  PlanarState s;
  s.g = g;
  const double circumradius = side / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    const double angle = orientation + i * (2.0 * kPi / 3.0);
    s.bodies[i].mass = masses[i];
    s.bodies[i].pos = {circumradius * std::cos(angle), circumradius * std::sin(angle)};
    s.bodies[i].vel = {0.0, 0.0};
  }
  return recentered(s);
}

double mu_particle(const std::array<double, 3>& masses, int body, double g) {
  const int j = (body + 1) % 3;
  const int k = (body + 2) % 3;
  const double mj = masses[j];
  const double mk = masses[k];
  const double m_total = masses[0] + masses[1] + masses[2];
  const double q = mj * mj + mk * mk + mj * mk;
  return g * q * std::sqrt(q) / (m_total * m_total);
}

double quintic_residual(const std::array<double, 3>& line_masses, double n) {
  const double m1 = line_masses[0];
  const double m2 = line_masses[1];
  const double m3 = line_masses[2];
  return ((((m1 + m2) * n + (3.0 * m1 + 2.0 * m2)) * n + (3.0 * m1 + m2)) * n * n * n) -
         ((m2 + 3.0 * m3) * n * n + (2.0 * m2 + 3.0 * m3) * n + (m2 + m3));
}

double euler_quintic_root(const std::array<double, 3>& line_masses) {
  for (const double m : line_masses) {
    if (!(m > 0.0)) {
      throw std::invalid_argument("euler_quintic_root(): masses must be positive");
    }
  }
  double lo = 1e-9;
  double hi = 1.0;
  while (quintic_residual(line_masses, hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("euler_quintic_root(): no sign change found");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (quintic_residual(line_masses, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double n = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {  // Newton polish
    const double f = quintic_residual(line_masses, n);
    const double h = 1e-7 * n;
    const double fp = (quintic_residual(line_masses, n + h) - quintic_residual(line_masses, n - h)) /
                      (2.0 * h);
    if (fp == 0.0) break;
    n -= f / fp;
  }
  return n;
}

double mu_eq_collinear(const std::array<double, 3>& line_masses, double g) {
  const double n = euler_quintic_root(line_masses);
  const double m_total = line_masses[0] + line_masses[1] + line_masses[2];
  return g * m_total * (2.0 + 1.0 / ((n + 1.0) * (n + 1.0)) - 1.0 / (n * n));
}

PlanarState collinear_state(const std::array<double, 3>& line_masses, double separation12,
                            double g) {
  if (separation12 <= 0.0) {
    throw std::invalid_argument("collinear_state(): separation must be positive");
  }
  const double n = euler_quintic_root(line_masses);
  const double m1 = line_masses[0];
  const double m2 = line_masses[1];
  const double m3 = line_masses[2];
  const double m_total = m1 + m2 + m3;
  const double x = separation12;
  PlanarState s;
  s.g = g;
  s.bodies[0].mass = m1;
  s.bodies[1].mass = m2;
  s.bodies[2].mass = m3;
  s.bodies[0].pos = {-x * (m2 + m3 * (1.0 + n)) / m_total, 0.0};
  s.bodies[1].pos = {x * (m1 - m3 * n) / m_total, 0.0};
  s.bodies[2].pos = {x * (n * m2 + m1 * (1.0 + n)) / m_total, 0.0};
  return s;  // centre of mass is at the origin by construction
}

CentralCertificate central_certificate(const PlanarState& state, double tol) {
  const PlanarState s = recentered(state);
  const auto acc = accelerations(s);
  const TriangleGeometry geo = triangle_geometry(s);
  CentralCertificate cert;
  if (geo.gyration_radius <= 0.0) return cert;  // fully collapsed; not certified
  const double len = geo.gyration_radius;
  const double acc_scale = s.g * total_mass(s) / (len * len);
  double lam_sum = 0.0;
  double lam_min = std::numeric_limits<double>::infinity();
  double lam_max = -lam_min;
  int used = 0;
  double max_residual = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 r = s.bodies[i].pos;
    const double r_mag = norm(r);
    const double a_mag = norm(acc[i]);
    if (r_mag <= 1e-12 * len) {
      // A body sitting at the barycentre is consistent with any common
      // ratio provided the net force on it also vanishes.
      max_residual = std::max(max_residual, a_mag / acc_scale);
      continue;
    }
    const double lam = -dot(acc[i], r) / (r_mag * r_mag);
    const Vec2 resid = acc[i] + lam * r;
    max_residual = std::max(max_residual, norm(resid) / std::max(a_mag, acc_scale));
    lam_sum += lam;
    lam_min = std::min(lam_min, lam);
    lam_max = std::max(lam_max, lam);
    ++used;
  }
  if (used == 0) return cert;
  const double lam_mean = lam_sum / used;
  cert.lambda = lam_mean;
  cert.max_direction_residual = max_residual;
  cert.lambda_spread = used > 1 ? (lam_max - lam_min) / std::abs(lam_mean) : 0.0;
  cert.central = lam_mean > 0.0 && max_residual <= tol && cert.lambda_spread <= tol;
  return cert;
}

double collapse_time_config(const PlanarState& state, double tol) {
  const PlanarState s = recentered(state);
  const TriangleGeometry geo = triangle_geometry(s);
  const double speed_scale =
      std::sqrt(s.g * total_mass(s) / std::max(geo.perimeter, 1e-300));
  for (const Body& b : s.bodies) {
    if (norm(b.vel) > tol * speed_scale) {
      throw std::invalid_argument("collapse_time_config(): bodies must start at rest");
    }
  }
  const CentralCertificate cert = central_certificate(s, tol);
  if (!cert.central) {
    throw std::invalid_argument("collapse_time_config(): not a central configuration");
  }
  return kPi / (2.0 * std::sqrt(2.0 * cert.lambda));
}

}  // namespace freefall::central
