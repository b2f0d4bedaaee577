#include "freefall/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "freefall/central.hpp"
#include "freefall/isosceles.hpp"

namespace freefall::scenarios {

namespace {
constexpr double kPi = std::numbers::pi;

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}
}  // namespace

PlanarState burrau() {
  PlanarState s;
  s.g = 1.0;
  s.bodies[0] = {3.0, {1.0, 3.0}, {0.0, 0.0}};
  s.bodies[1] = {4.0, {-2.0, -1.0}, {0.0, 0.0}};
  s.bodies[2] = {5.0, {1.0, -1.0}, {0.0, 0.0}};
  return s;
}

PlanarState near_equilateral(double delta, const std::array<double, 3>& masses) {
  PlanarState s;
  s.g = 1.0;
  const double c120 = std::cos(2.0 * kPi / 3.0);  // -1/2
  const double s120 = std::sin(2.0 * kPi / 3.0);  // +sqrt(3)/2
  s.bodies[0] = {masses[0], {1.0, 0.0}, {0.0, 0.0}};
  s.bodies[1] = {masses[1], {c120 + delta, -s120}, {0.0, 0.0}};  // lower-left, pushed inward
  s.bodies[2] = {masses[2], {c120 - delta, +s120}, {0.0, 0.0}};  // upper-left, pushed outward
  return recentered(s);
}

PlanarState standish(const std::array<double, 3>& masses, double angle_deg, double side_a,
                     double side_b) {
  if (side_a <= 0.0 || side_b <= 0.0) {
    throw std::invalid_argument("standish(): sides must be positive");
  }
  const double angle = angle_deg * kPi / 180.0;
  PlanarState s;
  s.g = 1.0;
  s.bodies[0] = {masses[0], {0.0, 0.0}, {0.0, 0.0}};
  s.bodies[1] = {masses[1], {side_a, 0.0}, {0.0, 0.0}};
  s.bodies[2] = {masses[2], {side_b * std::cos(angle), side_b * std::sin(angle)}, {0.0, 0.0}};
  return recentered(s);
}

PlanarState equilateral_collapse(const std::array<double, 3>& masses, double side, double g) {
  return central::equilateral_state(masses, side, g);
}

PlanarState collinear_collapse(const std::array<double, 3>& line_masses, double separation12,
                               double g) {
  return central::collinear_state(line_masses, separation12, g);
}

PlanarState isosceles_free_fall(double alpha_deg, double height, double mass, double g) {
  return isosceles::embed(isosceles::free_fall_state(alpha_deg, height), mass, g);
}

const std::vector<Info>& catalogue() {
  static const std::vector<Info> infos = {
      {"burrau", "masses 3,4,5 at rest with mutual distances 3,4,5"},
      {"near_equilateral", "perturbed equilateral free fall (params: delta, m1..m3)"},
      {"standish",
       "two sides + included angle, released from rest (params: m1..m3, angle, side_a, side_b)"},
      {"equilateral_collapse", "homothetic triangular collapse (params: m1..m3, side, g)"},
      {"collinear_collapse", "homothetic straight-line collapse (params: m1..m3, sep, g)"},
      {"isosceles_free_fall", "symmetric free fall (params: alpha, height, mass, g)"},
  };
  return infos;
}

PlanarState by_name(const std::string& name, const std::map<std::string, double>& params) {
  const std::array<double, 3> default_masses = name == "burrau" || name == "standish"
                                                   ? std::array<double, 3>{3.0, 4.0, 5.0}
                                                   : std::array<double, 3>{1.0, 1.0, 1.0};
  const std::array<double, 3> masses = {param(params, "m1", default_masses[0]),
                                        param(params, "m2", default_masses[1]),
                                        param(params, "m3", default_masses[2])};
  if (name == "burrau") return burrau();
  if (name == "near_equilateral") {
    const double third = 1.0 / 3.0;
    return near_equilateral(param(params, "delta", 0.01),
                            {param(params, "m1", third), param(params, "m2", third),
                             param(params, "m3", third)});
  }
  if (name == "standish") {
    return standish(masses, param(params, "angle", 91.061), param(params, "side_a", 3.0),
                    param(params, "side_b", 4.689));
  }
  if (name == "equilateral_collapse") {
    return equilateral_collapse(masses, param(params, "side", 1.0), param(params, "g", 1.0));
  }
  if (name == "collinear_collapse") {
    return collinear_collapse(masses, param(params, "sep", 1.0), param(params, "g", 1.0));
  }
  if (name == "isosceles_free_fall") {
    return isosceles_free_fall(param(params, "alpha", 60.0), param(params, "height", 1.0),
                               param(params, "mass", 1.0 / 3.0), param(params, "g", 1.0));
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace freefall::scenarios
