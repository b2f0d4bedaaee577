#pragma once

#include <array>

#include "freefall/state.hpp"

namespace freefall::central {

/// Build a planar state with the three bodies at the vertices of an
/// equilateral triangle of the given side, at rest, centre of mass at the
/// origin.  `orientation` rotates the whole triangle; body 0 sits at angle
/// `orientation` as seen from the centroid direction fixed below.
PlanarState equilateral_state(const std::array<double, 3>& masses, double side,
                              double g = 1.0, double orientation = 0.0);

/// Effective gravitational parameter governing the radial fall of body i
/// in the equilateral configuration of side r:
///   mu_i = g (m_j^2 + m_k^2 + m_j m_k)^(3/2) / M^2.
/// Each body falls to the centre like a straight-line two-body problem
/// with this parameter and initial separation |r_i|.
double mu_particle(const std::array<double, 3>& masses, int body, double g = 1.0);

/// Residual of the collinear-configuration quintic at ratio n, for masses
/// listed in line order (masses[1] is the middle body):
///   (m1+m2) n^5 + (3m1+2m2) n^4 + (3m1+m2) n^3
///     - (m2+3m3) n^2 - (2m2+3m3) n - (m2+m3).
double quintic_residual(const std::array<double, 3>& line_masses, double n);

/// Unique positive root of the quintic above; n is the ratio of the
/// (middle, right) distance to the (left, middle) distance.
double euler_quintic_root(const std::array<double, 3>& line_masses);

/// Effective parameter of the collinear configuration as a single scalar
/// mu_eq = g M (2 + 1/(n+1)^2 - 1/n^2); equals 5/4 g M for equal masses.
double mu_eq_collinear(const std::array<double, 3>& line_masses, double g = 1.0);

/// Build the collinear central configuration on the x axis with the given
/// left-to-middle separation, bodies at rest, centre of mass at origin.
/// Body order along the line is masses[0], masses[1], masses[2] with
/// increasing x.
PlanarState collinear_state(const std::array<double, 3>& line_masses, double separation12,
                            double g = 1.0);

struct CentralCertificate {
  bool central = false;
  double lambda = 0.0;           ///< common ratio in  a_i = -lambda r_i
  double max_direction_residual = 0.0;  ///< max |a_i + lambda_i r_i| / |a_i|
  double lambda_spread = 0.0;           ///< max relative spread of the per-body ratios
};

/// Check whether the (recentred) positions form a central configuration:
/// every acceleration must point at the origin with a common ratio.
CentralCertificate central_certificate(const PlanarState& s, double tol = 1e-10);

/// Time to simultaneous total collapse for a central configuration
/// released from rest: T = pi / (2 sqrt(2 lambda)).  Works for both the
/// triangular and the collinear family.  Throws std::invalid_argument when
/// the state is not a central configuration at rest (tolerance `tol`).
double collapse_time_config(const PlanarState& s, double tol = 1e-10);

}  // namespace freefall::central
