#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "freefall/central.hpp"
#include "freefall/integrator.hpp"
#include "freefall/isosceles.hpp"
#include "freefall/scenarios.hpp"
#include "freefall/split.hpp"
#include "freefall/state.hpp"

using namespace freefall;
namespace sc = freefall::scenarios;

namespace {

bool starts_from_rest(const PlanarState& s) {
  for (const auto& b : s.bodies) {
    if (b.vel.x != 0.0 || b.vel.y != 0.0) return false;
  }
  return true;
}

bool same_state(const PlanarState& a, const PlanarState& b) {
  if (a.t != b.t || a.g != b.g) return false;
  for (int i = 0; i < kBodyCount; ++i) {
    const Body& p = a.bodies[i];
    const Body& q = b.bodies[i];
    if (p.mass != q.mass || p.pos.x != q.pos.x || p.pos.y != q.pos.y || p.vel.x != q.vel.x ||
        p.vel.y != q.vel.y) {
      return false;
    }
  }
  return true;
}

double vertex_angle_deg(const PlanarState& s, int at, int toward1, int toward2) {
  const Vec2 u = s.bodies[toward1].pos - s.bodies[at].pos;
  const Vec2 v = s.bodies[toward2].pos - s.bodies[at].pos;
  return std::acos(dot(u, v) / (norm(u) * norm(v))) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_CASE("survey triangle: masses, mutual distances, and energy") {
  const PlanarState s = sc::burrau();
  CHECK(s.g == 1.0);
  CHECK(s.bodies[0].mass == 3.0);
  CHECK(s.bodies[1].mass == 4.0);
  CHECK(s.bodies[2].mass == 5.0);
  CHECK(starts_from_rest(s));

  // Each pair's separation equals the mass of the body it excludes
  // shifted by the labelling: pair k excludes body k.
  const TriangleGeometry geo = triangle_geometry(s);
  CHECK(geo.side[0] == 3.0);  // bodies 1 and 2 (masses 4 and 5)
  CHECK(geo.side[1] == 4.0);  // bodies 2 and 0 (masses 5 and 3)
  CHECK(geo.side[2] == 5.0);  // bodies 0 and 1 (masses 3 and 4)

  const Vec2 rc = com_position(s);
  CHECK(rc.x == 0.0);
  CHECK(rc.y == 0.0);

  const ConservedSet c = conserved(s);
  CHECK(c.kinetic == 0.0);
  CHECK(c.angular_momentum == 0.0);
  CHECK(c.energy == doctest::Approx(-769.0 / 60.0).epsilon(1e-15));
}

TEST_CASE("perturbed equilateral: frozen energy and symmetric limit") {
  const PlanarState s = sc::near_equilateral();
  CHECK(starts_from_rest(s));
  const Vec2 rc = com_position(s);
  CHECK(std::abs(rc.x) < 1e-16);
  CHECK(std::abs(rc.y) < 1e-16);

  const double delta = 0.01;
  const TriangleGeometry geo = triangle_geometry(s);
  CHECK(geo.side[0] == doctest::Approx(std::sqrt(3.0 + 4.0 * delta * delta)).epsilon(1e-14));
  CHECK(geo.side[1] ==
        doctest::Approx(std::hypot(1.5 + delta, std::sqrt(3.0) / 2.0)).epsilon(1e-14));
  CHECK(geo.side[2] ==
        doctest::Approx(std::hypot(1.5 - delta, std::sqrt(3.0) / 2.0)).epsilon(1e-14));

  const ConservedSet c = conserved(s);
  CHECK(c.kinetic == 0.0);
  CHECK(c.angular_momentum == 0.0);
  CHECK(c.energy == doctest::Approx(-0.192448486410086).epsilon(1e-12));

  // The unperturbed limit is an exact central configuration: a triangle
  // inscribed in the unit circle with total mass one, so its homothetic
  // collapse time has a closed form.
  const PlanarState eq = sc::near_equilateral(0.0);
  CHECK(central::collapse_time_config(eq) == doctest::Approx(2.53189575268899).epsilon(1e-10));
}

TEST_CASE("two-sides-and-angle triangle: geometry, energy, and bad input") {
  const PlanarState s = sc::standish();
  CHECK(s.bodies[0].mass == 3.0);
  CHECK(s.bodies[1].mass == 4.0);
  CHECK(s.bodies[2].mass == 5.0);
  CHECK(starts_from_rest(s));

  const TriangleGeometry geo = triangle_geometry(s);
  CHECK(geo.side[2] == doctest::Approx(3.0).epsilon(1e-14));      // angle vertex to body 1
  CHECK(geo.side[1] == doctest::Approx(4.689).epsilon(1e-14));    // angle vertex to body 2
  CHECK(geo.side[0] == doctest::Approx(5.61316978575).epsilon(1e-10));
  CHECK(geo.perimeter == doctest::Approx(13.3021697857).epsilon(1e-10));
  CHECK(vertex_angle_deg(s, 0, 1, 2) == doctest::Approx(91.061).epsilon(1e-12));

  const ConservedSet c = conserved(s);
  CHECK(c.kinetic == 0.0);
  CHECK(c.energy == doctest::Approx(-10.7620255072).epsilon(1e-10));

  // A 90-degree angle with legs 3 and 4 closes with a hypotenuse of 5.
  const PlanarState right = sc::standish({1.0, 1.0, 1.0}, 90.0, 3.0, 4.0);
  CHECK(triangle_geometry(right).side[0] == doctest::Approx(5.0).epsilon(1e-14));

  CHECK_THROWS_AS(sc::standish({1.0, 1.0, 1.0}, 60.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sc::standish({1.0, 1.0, 1.0}, 60.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("homothetic collapse scenarios reproduce the central-configuration states") {
  CHECK(same_state(sc::equilateral_collapse(), central::equilateral_state({1, 1, 1}, 1.0, 1.0)));
  CHECK(same_state(sc::equilateral_collapse({2, 3, 4}, 1.5, 2.0),
                   central::equilateral_state({2, 3, 4}, 1.5, 2.0)));
  CHECK(same_state(sc::collinear_collapse(), central::collinear_state({1, 1, 1}, 1.0, 1.0)));
  CHECK(same_state(sc::collinear_collapse({1, 2, 3}, 0.5, 1.0),
                   central::collinear_state({1, 2, 3}, 0.5, 1.0)));
}

TEST_CASE("symmetric free fall embeds the reduced initial state") {
  const double alpha = 25.3663;
  const PlanarState s = sc::isosceles_free_fall(alpha, 1.0);
  CHECK(starts_from_rest(s));
  for (const auto& b : s.bodies) CHECK(b.mass == 1.0 / 3.0);

  const isosceles::State reduced = isosceles::extract(s);
  const isosceles::State direct = isosceles::free_fall_state(alpha, 1.0);
  CHECK(reduced.x == doctest::Approx(direct.x).epsilon(1e-14));
  CHECK(reduced.y == doctest::Approx(direct.y).epsilon(1e-14));
  CHECK(reduced.vx == 0.0);
  CHECK(reduced.vy == 0.0);

  const ConservedSet c = conserved(s);
  CHECK(c.angular_momentum == 0.0);
  CHECK(c.energy == doctest::Approx(isosceles::reduced_energy(direct, 1.0 / 3.0, 1.0))
                        .epsilon(1e-13));
}

TEST_CASE("scenario lookup by name: defaults, overrides, determinism, and errors") {
  CHECK(same_state(sc::by_name("burrau", {}), sc::burrau()));
  CHECK(same_state(sc::by_name("near_equilateral", {}), sc::near_equilateral()));
  CHECK(same_state(sc::by_name("standish", {}), sc::standish()));

  const PlanarState right =
      sc::by_name("standish", {{"angle", 90.0}, {"side_a", 3.0}, {"side_b", 4.0}});
  CHECK(triangle_geometry(right).side[0] == doctest::Approx(5.0).epsilon(1e-14));

  const PlanarState eq = sc::by_name("near_equilateral", {{"delta", 0.0}});
  const TriangleGeometry eq_geo = triangle_geometry(eq);
  for (int k = 0; k < 3; ++k) {
    CHECK(eq_geo.side[k] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  }

  const PlanarState line = sc::by_name("collinear_collapse", {{"sep", 1.5}});
  CHECK(std::abs(triangle_geometry(line).signed_area) < 1e-14);
  CHECK(triangle_geometry(line).side[2] == doctest::Approx(1.5).epsilon(1e-14));

  const PlanarState iso =
      sc::by_name("isosceles_free_fall", {{"alpha", 40.0}, {"height", 2.0}, {"mass", 0.25}});
  for (const auto& b : iso.bodies) CHECK(b.mass == 0.25);
  CHECK(isosceles::extract(iso).x == doctest::Approx(2.0).epsilon(1e-14));

  // Same name and parameters must reproduce the state exactly.
  const std::map<std::string, double> params = {{"delta", 0.02}, {"m1", 0.5}, {"m2", 0.25}};
  CHECK(same_state(sc::by_name("near_equilateral", params),
                   sc::by_name("near_equilateral", params)));

  CHECK_THROWS_AS(sc::by_name("no_such_scenario", {}), std::invalid_argument);
}

TEST_CASE("catalogue lists unique, buildable, rest-start scenarios") {
  const auto& infos = sc::catalogue();
  REQUIRE(!infos.empty());

  std::set<std::string> names;
  for (const auto& info : infos) {
    CHECK(!info.name.empty());
    CHECK(!info.summary.empty());
    CHECK(names.insert(info.name).second);  // unique

    const PlanarState s = sc::by_name(info.name, {});
    CHECK(starts_from_rest(s));
    const Vec2 rc = com_position(s);
    CHECK(std::abs(rc.x) < 1e-14);
    CHECK(std::abs(rc.y) < 1e-14);
    const ConservedSet c = conserved(s);
    CHECK(c.kinetic == 0.0);
    CHECK(c.angular_momentum == 0.0);
    CHECK(c.energy < 0.0);
  }
}

TEST_CASE("unequal-mass perturbed triangle ejects the light body opposite the pair") {
  IntegratorSettings settings;
  settings.t_end = 6.0;
  settings.rel_tol = 1e-12;
  const Trajectory traj =
      integrate(sc::near_equilateral(0.01, {1.0 / 6.0, 1.0 / 3.0, 1.0 / 2.0}), settings);
  const split::OutcomeReport report = split::classify_outcome(traj, {});

  REQUIRE(report.outcome == split::Outcome::EllipticHyperbolic);
  CHECK(report.escaper == 0);  // the lightest body leaves

  const PlanarState& last = traj.final_state();
  const auto& pair = kPairs[report.escaper];
  const double pair_mass = last.bodies[pair[0]].mass + last.bodies[pair[1]].mass;
  const Vec2 pair_velocity = (last.bodies[pair[0]].mass * last.bodies[pair[0]].vel +
                              last.bodies[pair[1]].mass * last.bodies[pair[1]].vel) /
                             pair_mass;
  const Vec2 escaper_velocity = last.bodies[report.escaper].vel;

  // The single recedes opposite the pair, and the momenta balance because
  // the centre of mass stays at rest.
  CHECK(dot(escaper_velocity, pair_velocity) < 0.0);
  const Vec2 total = last.bodies[report.escaper].mass * escaper_velocity +
                     pair_mass * pair_velocity;
  CHECK(norm(total) < 1e-9);
}
