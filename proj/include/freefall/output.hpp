#pragma once

#include <array>
#include <iosfwd>
#include <string>

#include "freefall/integrator.hpp"
#include "freefall/split.hpp"

namespace freefall::output {

/// One row per sample: time, phase-space coordinates of every body, and
/// running diagnostics (energy, angular momentum, moment of inertia,
/// closest-pair binding energy, decomposition remainder).
void write_csv(std::ostream& os, const Trajectory& traj);

/// Parse a trajectory back from the layout written by write_csv.  Masses
/// and the gravitational constant are not stored in the file, so they are
/// supplied here; the diagnostic columns are read only to seed the initial
/// energy and angular momentum.  Throws std::runtime_error on malformed
/// input (with the offending line number).
Trajectory read_csv(std::istream& is, const std::array<double, 3>& masses, double g = 1.0);

/// Events, stop reason, drift summary, and classification as JSON.
void write_json(std::ostream& os, const Trajectory& traj,
                const split::OutcomeReport& report);

/// Orbit plot: one polyline per body plus event markers.
void write_svg(std::ostream& os, const Trajectory& traj, int size_px = 800);

}  // namespace freefall::output
