#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "freefall/integrator.hpp"
#include "freefall/state.hpp"

namespace freefall::isosceles {

/// Reduced coordinates of the isosceles three-body problem with three
/// equal masses m: the apex body sits on the symmetry axis at (2x/3, 0),
/// the base pair at (-x/3, +-y).  x is the apex-to-base axial separation,
/// y the base half-separation; both carry signs/positivity as stated.
struct State {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;   ///< > 0 away from the base-pair collision
  double vx = 0.0;
  double vy = 0.0;
};

struct Accel {
  double ax = 0.0;
  double ay = 0.0;
};

/// Reduced equations of motion: ax = -3 mu x / rho^3,
/// ay = -mu/(4 y^2) - mu y / rho^3 with rho = sqrt(x^2 + y^2), mu = g m.
Accel reduced_acceleration(double x, double y, double m, double g);

/// Total energy in reduced coordinates:
/// E = m (vx^2/3 + vy^2 - mu/(2y) - 2 mu/rho).
double reduced_energy(const State& s, double m, double g);

/// Lift a reduced state to the symmetric planar three-body state.
PlanarState embed(const State& s, double m, double g);

/// Project a symmetric planar state back to reduced coordinates.  Throws
/// std::invalid_argument when the state lacks the mirror symmetry.
State extract(const PlanarState& s, double tol = 1e-9);

/// Free fall from rest with apex height x0 and apex angle alpha (degrees):
/// y0 = x0 tan(alpha/2).
State free_fall_state(double alpha_deg, double height = 1.0);

/// Shape coordinates: overall size (gyration radius) and the shape angle
/// that is 0 on the collinear configuration and 45 degrees on the
/// equilateral one.
struct ShapeCoords {
  double size = 0.0;        ///< gyration radius
  double size_rate = 0.0;
  double angle = 0.0;       ///< radians
  double angle_rate = 0.0;
};

ShapeCoords shape_coords(const State& s);

/// Shape factor of the potential: F(angle) = 1/cos a + 4/sqrt(1 + 2 sin^2 a);
/// F(0) = 5, F(pi/4) = 3 sqrt(2).
double shape_potential_factor(double angle);

/// Potential energy expressed through the shape coordinates:
/// V = -g m^2 F(angle) / (sqrt(6) size).
double potential_from_shape(double size, double angle, double m, double g);

/// Kinetic energy expressed through the shape coordinates:
/// T = (3/2) m (size_rate^2 + size^2 angle_rate^2).
double kinetic_from_shape(const ShapeCoords& sc, double m);

enum class SingularityKind { None, BinaryCollision, TripleCollision };

struct SingularityReport {
  SingularityKind kind = SingularityKind::None;
  /// Energy of the apex relative to the coalesced base pair at a binary
  /// collision: m (vx^2/3 - 2 mu/|x|); negative means the apex stays bound.
  double apex_energy = 0.0;
};

/// Classify a state that is about to become singular, using the given
/// length scale to set thresholds.
SingularityReport classify_singularity(const State& s, double m, double g,
                                       double length_scale);

/// One passage of the base pair through its collision, resolved
/// analytically: the recorded instant is the collision midpoint.
struct AxisArrival {
  double t = 0.0;
  double apex_x = 0.0;  ///< apex coordinate at the collision instant
  bool patched = true;  ///< false when the run ended (collapse) at this passage
};

struct Settings {
  double t_end = 50.0;
  double rel_tol = 1e-12;
  /// The base-pair collision is stepped over analytically once
  /// y < max(window_fraction |x|, window_floor); window_floor = 0 picks
  /// 1e-13 x the initial size.
  double window_fraction = 1e-8;
  double window_floor = 0.0;
  double tc_radius = 0.0;  ///< 0 => 1e-9 x initial gyration radius
  int max_passages = 100000;
  std::size_t max_steps = 20'000'000;
  bool record_samples = true;
  /// Stop right after this many base-pair passages (0 = no cap).
  int stop_after_passages = 0;
};

struct Run {
  std::vector<State> samples;
  std::vector<EventRecord> events;
  std::vector<AxisArrival> arrivals;
  StopReason stop = StopReason::ReachedEnd;
  std::optional<double> collapse_time;  ///< set when the run ended in total collapse
  double initial_energy = 0.0;
  double max_energy_drift = 0.0;
  std::size_t accepted_steps = 0;

  const State& final_state() const { return samples.back(); }
};

Run integrate(const State& init, double m, double g, const Settings& settings);

/// Apex angles whose free fall reaches total collapse exactly at base-pair
/// passage number (collision_count + 1); collision_count = 0 is the
/// reversal solution where the apex swings through before any collision.
/// Bisects the signed apex coordinate at that passage over the bracket.
double tc_angle_search(int collision_count, std::pair<double, double> bracket_deg,
                       double tol_deg = 1e-4, double m = 1.0 / 3.0, double g = 1.0,
                       double height = 1.0, double rel_tol = 1e-12);

struct FamilyVelocityResult {
  double base_velocity = 0.0;   ///< signed vy of the reduced coordinate (negative = inward)
  double collapse_time = 0.0;
};

/// For a fixed apex angle, find the initial base-pair velocity (apex at
/// rest) that funnels the free fall into total collapse at the first
/// base-pair passage.
FamilyVelocityResult family_velocity_for_tc(double alpha_deg, double height,
                                            std::pair<double, double> bracket_vy,
                                            double tol_vy = 1e-6, double m = 1.0 / 3.0,
                                            double g = 1.0, double rel_tol = 1e-12);

}  // namespace freefall::isosceles
