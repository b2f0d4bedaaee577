#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "freefall/state.hpp"

namespace freefall::scenarios {

/// The classic equal-G survey problem: masses 3, 4, 5 at rest at (1, 3),
/// (-2, -1), (1, -1); mutual distances 3, 4, 5, centre of mass at the origin.
PlanarState burrau();

/// Equilateral triangle inscribed in the unit circle (vertex 0 on the +x
/// axis), two left vertices displaced horizontally by delta (upper-left
/// outward, lower-left inward), recentred, released from rest.  Body 0 is
/// the right vertex, body 1 the lower-left (shifted inward), body 2 the
/// upper-left (shifted outward).
PlanarState near_equilateral(double delta = 0.01,
                             const std::array<double, 3>& masses = {1.0 / 3.0, 1.0 / 3.0,
                                                                    1.0 / 3.0});

/// Triangle given by two sides and the included angle; body 0 sits at the
/// angle vertex, body 1 across side_a on the +x axis, body 2 across
/// side_b.  Released from rest, recentred.
PlanarState standish(const std::array<double, 3>& masses = {3.0, 4.0, 5.0},
                     double angle_deg = 91.061, double side_a = 3.0,
                     double side_b = 4.689);

/// Homothetic-collapse initial conditions (central configurations at rest).
PlanarState equilateral_collapse(const std::array<double, 3>& masses = {1.0, 1.0, 1.0},
                                 double side = 1.0, double g = 1.0);
PlanarState collinear_collapse(const std::array<double, 3>& line_masses = {1.0, 1.0, 1.0},
                               double separation12 = 1.0, double g = 1.0);

/// Symmetric free fall: equal masses, apex angle alpha, embedded in the
/// full planar problem.
PlanarState isosceles_free_fall(double alpha_deg, double height = 1.0,
                                double mass = 1.0 / 3.0, double g = 1.0);

struct Info {
  std::string name;
  std::string summary;
};

const std::vector<Info>& catalogue();

/// Build a scenario by name with numeric parameter overrides
/// (keys: m1 m2 m3 delta angle side_a side_b side sep alpha height mass g).
PlanarState by_name(const std::string& name, const std::map<std::string, double>& params);

}  // namespace freefall::scenarios
