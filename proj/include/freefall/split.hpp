#pragma once

#include <array>

#include "freefall/integrator.hpp"
#include "freefall/state.hpp"
#include "freefall/vec2.hpp"

namespace freefall::split {

/// Osculating two-body elements of a relative orbit (one body of mass m1
/// relative to another of mass m2, or a third body relative to a pair's
/// barycentre with the pair mass lumped).
struct TwoBodyElements {
  double mu = 0.0;                ///< g (m1 + m2)
  double energy_per_mass = 0.0;   ///< v^2/2 - mu/r
  double energy = 0.0;            ///< reduced-mass scaling: m1 m2 / (m1 + m2) * energy_per_mass
  double angular_momentum_per_mass = 0.0;  ///< cross(r, v)
  double angular_momentum = 0.0;  ///< reduced-mass scaling
  double semi_major = 0.0;        ///< -mu / (2 energy_per_mass); negative when unbound
  double eccentricity = 0.0;
  double semi_latus = 0.0;        ///< h^2 / mu
  bool bound = false;
  /// Barycentric shares of the pair energy: body 1 carries (m2/m) of it,
  /// body 2 the rest; they sum to `energy`.
  std::array<double, 2> body_energy{};
};

TwoBodyElements two_body_elements(double m1, double m2, const Vec2& rel_pos,
                                  const Vec2& rel_vel, double g);

/// Decomposition of the three-body state into an inner pair and the third
/// body orbiting the pair's barycentre, with the coupling remainder.
struct Decomposition {
  int pair = 0;                  ///< excluded-body index k
  TwoBodyElements inner;         ///< the pair itself
  TwoBodyElements outer;         ///< third body vs. pair barycentre (mass-lumped)
  double pair_binding_energy = 0.0;   ///< inner.energy
  double outer_energy = 0.0;          ///< outer.energy
  double coupling = 0.0;         ///< exact remainder: E_total - inner - outer
  double outer_distance = 0.0;   ///< third body to pair barycentre
  std::array<double, 2> single_to_member{};  ///< distances third body -> each pair member
};

Decomposition decompose(const PlanarState& s, int pair);

/// Pair whose two members are currently closest to each other.
int closest_pair(const PlanarState& s);

/// Pair with the most negative binding energy; ties broken by smaller
/// pair separation, then by lower pair index.
int choose_pair(const PlanarState& s);

/// Far-field limit of the ratio (distance from the escaper to pair member
/// j) / (distance from the escaper to the pair barycentre), when the pair
/// (i, j) stays bounded while the third body recedes on a straight line
/// through the system: ((m_i + m_j)/M) * sqrt((m_j + m_k)/m_j), with k the
/// escaper.  Equals sqrt(8/9) for equal masses.
double asymptotic_member_ratio(const std::array<double, 3>& masses, int pair, int member);

enum class Outcome {
  EllipticHyperbolic,   ///< bound pair + escaping third body
  TripleCollisionEnd,   ///< run terminated in a certified collapse
  PeriodicCandidate,    ///< returned near the initial state or mirrored through collapse
  Undecided,
};

const char* to_string(Outcome outcome);

struct OutcomeReport {
  Outcome outcome = Outcome::Undecided;
  int escaper = -1;              ///< body index, -1 when none
  double split_time = 0.0;       ///< last onset of the escape condition, 0 when none
  double outer_eccentricity = 0.0;
  double outer_energy = 0.0;
  double pair_binding_energy = 0.0;
  double final_outer_distance = 0.0;
  bool outer_receding = false;
};

struct OutcomeCriteria {
  /// Escape distance gate; 0 picks the initial maximum pairwise separation.
  double r_star = 0.0;
  double tail_fraction = 0.2;           ///< trailing window of the run checked for escape
  std::size_t min_tail_samples = 50;    ///< widen the window to at least this many samples
  double coupling_fraction = 0.01;      ///< |coupling| must stay below this x |E_total|
  double return_position_tol = 1e-3;    ///< relative, for the periodic-candidate check
  double return_speed_tol = 0.05;       ///< relative to sqrt(G M / perimeter)
};

/// Classify how a finished run ended, using its samples and events.
OutcomeReport classify_outcome(const Trajectory& traj,
                               const OutcomeCriteria& criteria = {});

}  // namespace freefall::split
