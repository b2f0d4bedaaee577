#include "freefall/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freefall {

double total_mass(const PlanarState& s) {
  return s.bodies[0].mass + s.bodies[1].mass + s.bodies[2].mass;
}

Vec2 com_position(const PlanarState& s) {
  Vec2 acc{};
  for (const Body& b : s.bodies) acc += b.mass * b.pos;
  return acc / total_mass(s);
}

Vec2 com_velocity(const PlanarState& s) {
  Vec2 acc{};
  for (const Body& b : s.bodies) acc += b.mass * b.vel;
  return acc / total_mass(s);
}

PlanarState recentered(PlanarState s) {
  const Vec2 rc = com_position(s);
  const Vec2 vc = com_velocity(s);
  for (Body& b : s.bodies) {
    b.pos -= rc;
    b.vel -= vc;
  }
  return s;
}

ConservedSet conserved(const PlanarState& s, double singular_fraction) {
  const TriangleGeometry geo = triangle_geometry(s);
  const double largest = std::max({geo.side[0], geo.side[1], geo.side[2]});
  if (geo.min_side <= singular_fraction * largest || geo.min_side == 0.0) {
    throw SingularStateError("conserved(): state is at a two-body collision",
                             geo.min_side_pair, geo.min_side);
  }

  ConservedSet out;
  const Vec2 rc = com_position(s);
  const Vec2 vc = com_velocity(s);
  for (const Body& b : s.bodies) {
    out.kinetic += 0.5 * b.mass * norm_sq(b.vel);
    const Vec2 dr = b.pos - rc;
    const Vec2 dv = b.vel - vc;
    out.angular_momentum += b.mass * cross(dr, dv);
    out.moment_of_inertia += b.mass * norm_sq(dr);
  }
  for (int k = 0; k < 3; ++k) {
    const Body& bi = s.bodies[kPairs[k][0]];
    const Body& bj = s.bodies[kPairs[k][1]];
    out.potential -= s.g * bi.mass * bj.mass / geo.side[k];
  }
  out.energy = out.kinetic + out.potential;
  return out;
}

TriangleGeometry triangle_geometry(const PlanarState& s) {
  TriangleGeometry geo;
  for (int k = 0; k < 3; ++k) {
    const Vec2 d = s.bodies[kPairs[k][0]].pos - s.bodies[kPairs[k][1]].pos;
    geo.side[k] = norm(d);
  }
  geo.perimeter = geo.side[0] + geo.side[1] + geo.side[2];
  geo.min_side_pair = static_cast<int>(
      std::min_element(geo.side.begin(), geo.side.end()) - geo.side.begin());
  geo.min_side = geo.side[geo.min_side_pair];

  const Vec2 rc = com_position(s);
  double inertia = 0.0;
  for (int i = 0; i < 3; ++i) {
    geo.com_distance[i] = norm(s.bodies[i].pos - rc);
    inertia += s.bodies[i].mass * norm_sq(s.bodies[i].pos - rc);
  }
  geo.gyration_radius = std::sqrt(inertia / total_mass(s));

  const Vec2 e1 = s.bodies[1].pos - s.bodies[0].pos;
  const Vec2 e2 = s.bodies[2].pos - s.bodies[0].pos;
  geo.signed_area = 0.5 * cross(e1, e2);
  return geo;
}

std::array<double, 3> com_distance_sq_from_sides(const std::array<double, 3>& masses,
                                                 const std::array<double, 3>& side_sq) {
  const double m_total = masses[0] + masses[1] + masses[2];
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const double mj = masses[j];
    const double mk = masses[k];
    out[i] = (-mj * mk * side_sq[i] + mk * (mk + mj) * side_sq[j] +
              mj * (mj + mk) * side_sq[k]) /
             (m_total * m_total);
  }
  return out;
}

double virial_ratio(const PlanarState& s) {
  const ConservedSet c = conserved(s);
  return c.kinetic / std::abs(c.potential);
}

std::array<Vec2, 3> accelerations(const PlanarState& s) {
  std::array<Vec2, 3> acc{};
  for (int k = 0; k < 3; ++k) {
    const int i = kPairs[k][0];
    const int j = kPairs[k][1];
    const Vec2 d = s.bodies[j].pos - s.bodies[i].pos;
    const double r2 = norm_sq(d);
    const double r = std::sqrt(r2);
    if (r == 0.0) {
      throw SingularStateError("accelerations(): coincident bodies", k, 0.0);
    }
    const Vec2 per_mass = s.g / (r2 * r) * d;  // direction i -> j, scaled by G/r^3
    acc[i] += s.bodies[j].mass * per_mass;
    acc[j] -= s.bodies[i].mass * per_mass;
  }
  return acc;
}

}  // namespace freefall
