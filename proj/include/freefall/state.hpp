#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "freefall/vec2.hpp"

namespace freefall {

inline constexpr int kBodyCount = 3;

/// Pair k is the pair that excludes body k: {1,2}, {2,0}, {0,1}.
/// All per-pair arrays in the library (separations, binding energies,
/// pair events) are indexed by the excluded body.
inline constexpr std::array<std::array<int, 2>, 3> kPairs = {{{1, 2}, {2, 0}, {0, 1}}};

struct Body {
  double mass = 1.0;
  Vec2 pos{};
  Vec2 vel{};
};

/// Full phase-space point of the planar three-body problem at time t.
struct PlanarState {
  double t = 0.0;
  double g = 1.0;  ///< gravitational constant
  std::array<Body, kBodyCount> bodies{};
};

/// Thrown when an operation needs well-separated bodies but the state is
/// at (or numerically indistinguishable from) a collision.
class SingularStateError : public std::runtime_error {
 public:
  SingularStateError(std::string what, int pair, double separation)
      : std::runtime_error(std::move(what)), pair_index(pair), separation(separation) {}
  int pair_index;      ///< pair (excluded-body index) that collapsed; -1 for triple
  double separation;   ///< offending distance
};

/// Scalar integrals and related diagnostics evaluated on one state.
struct ConservedSet {
  double kinetic = 0.0;
  double potential = 0.0;           ///< negative of the potential well depth, V <= 0
  double energy = 0.0;              ///< kinetic + potential
  double angular_momentum = 0.0;    ///< z-component about the centre of mass
  double moment_of_inertia = 0.0;   ///< sum m_i |r_i - r_com|^2
};

/// Mutual geometry of the triangle formed by the three bodies.
struct TriangleGeometry {
  std::array<double, 3> side{};          ///< side[k] = |r_i - r_j| for pair k
  std::array<double, 3> com_distance{};  ///< |r_i - r_com| per body
  double signed_area = 0.0;              ///< positive for counter-clockwise labelling
  double perimeter = 0.0;
  double min_side = 0.0;
  int min_side_pair = 0;
  double gyration_radius = 0.0;          ///< sqrt(moment of inertia / total mass)
};

double total_mass(const PlanarState& s);
Vec2 com_position(const PlanarState& s);
Vec2 com_velocity(const PlanarState& s);

/// Shift positions/velocities so the centre of mass sits at rest at the origin.
PlanarState recentered(PlanarState s);

/// Evaluate the conserved quantities. Throws SingularStateError when the
/// smallest separation is below `singular_fraction` of the largest one.
ConservedSet conserved(const PlanarState& s, double singular_fraction = 1e-300);

TriangleGeometry triangle_geometry(const PlanarState& s);

/// Squared centre-of-mass distances of each body expressed through the
/// squared mutual separations alone:
///   M^2 |r_1|^2 = -m2 m3 s1^2 + m3 (m3 + m2) s2^2 + m2 (m2 + m3) s3^2,
/// and cyclic, where s_k is the side opposite body k.  Valid in the
/// centre-of-mass frame; serves as a coordinate-free cross-check.
std::array<double, 3> com_distance_sq_from_sides(const std::array<double, 3>& masses,
                                                 const std::array<double, 3>& side_sq);

/// Ratio of kinetic energy to the magnitude of the potential energy.
double virial_ratio(const PlanarState& s);

/// Newtonian gravitational accelerations of the three bodies.
std::array<Vec2, 3> accelerations(const PlanarState& s);

}  // namespace freefall
