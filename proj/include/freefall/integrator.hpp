#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "freefall/state.hpp"

namespace freefall {

enum class EventKind {
  BinaryMinDistance,          ///< local minimum of one pair separation
  BinaryCollision,            ///< pair separation fell below the collision radius (terminal)
  CollinearConfiguration,     ///< the three bodies crossed a common line
  MinMomentOfInertia,         ///< local minimum of the central moment of inertia
  BodyAtRest,                 ///< local minimum of one body's speed
  AllAtRest,                  ///< local minimum of the total kinetic energy
  BindingEnergyZero,          ///< a pair's two-body energy changed sign
  BindingBelowTotal,          ///< a pair's two-body energy crossed the total energy
  PairEnergyPositive,         ///< the third body became unbound from a pair (outer energy > 0)
  AngularMomentumZeroOfBody,  ///< one body's angular momentum about the centre of mass crossed zero
  TripleCollision,            ///< certified simultaneous collapse (terminal unless mirrored)
};

const char* to_string(EventKind kind);

struct EventRecord {
  double t = 0.0;
  EventKind kind{};
  int subject = -1;   ///< body index, pair index (excluded body), or -1 for global
  double value = 0.0; ///< kind-specific payload (separation, speed, direction, ...)
};

enum class StopReason { ReachedEnd, BinaryCollision, TripleCollision };

const char* to_string(StopReason reason);

struct IntegratorSettings {
  double t_end = 10.0;
  double rel_tol = 1e-12;
  /// dt = s * r_min^exponent du with s the initial minimum separation;
  /// exponent 1 regularises close encounters, 0 disables the transform.
  double time_transform_exponent = 1.0;
  double collision_radius = 0.0;  ///< 0 => 1e-10 x initial perimeter
  double tc_radius = 0.0;         ///< 0 => 1e-9 x initial gyration radius
  /// Speed minima are recorded only below this fraction of the running
  /// peak; 1.0 records every minimum.
  double rest_speed_fraction = 1.0;
  bool detect_events = true;
  /// On a certified central collapse, mirror the state through the
  /// collision (velocities negated) and keep integrating.
  bool bounce_at_collapse = false;
  int max_bounces = 4;
  std::size_t max_steps = 50'000'000;
  /// Cap on the regularized independent-variable step (0 = uncapped).
  /// Forcing steps below the controller's choice trades speed for a
  /// smaller per-step truncation bias in the conserved quantities.
  double max_du = 0.0;
  /// 0 records every accepted step; otherwise the first step end past
  /// each multiple of the interval.
  double sample_interval = 0.0;
};

struct Trajectory {
  std::vector<PlanarState> samples;  ///< includes the initial and final states
  std::vector<EventRecord> events;
  StopReason stop = StopReason::ReachedEnd;
  double initial_energy = 0.0;
  double initial_angular_momentum = 0.0;
  double max_energy_drift = 0.0;           ///< max |E(t) - E(0)| over accepted steps
  double max_angular_momentum_drift = 0.0; ///< max |H(t) - H(0)|
  double min_pair_separation = 0.0;        ///< smallest separation seen anywhere
  std::size_t accepted_steps = 0;
  int bounce_count = 0;
  std::vector<std::string> warnings;

  const PlanarState& final_state() const { return samples.back(); }
};

/// Integrate the planar three-body problem from `init` to settings.t_end
/// (or a terminal event), recording samples and localised events.
Trajectory integrate(const PlanarState& init, const IntegratorSettings& settings);

struct CollapsePivot {
  PlanarState mirrored;      ///< same positions, velocities negated, t past the collapse
  double collapse_time = 0.0;
};

/// Given a state certified to be in central collapse (all bodies falling
/// radially in a central configuration), estimate the collapse instant
/// from the two-body fall of the closest pair and build the mirrored
/// continuation state.  Throws std::invalid_argument when the state is
/// not a central collapse within `tol`.
CollapsePivot bounce_continue(const PlanarState& near_collapse, double tol = 1e-3);

}  // namespace freefall
