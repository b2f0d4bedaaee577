#include <doctest.h>

#include <cmath>
#include <random>

#include "freefall/scenarios.hpp"
#include "freefall/state.hpp"
#include "test_util.hpp"

using namespace freefall;

TEST_CASE("triangle geometry of the 3-4-5 survey triangle") {
  const PlanarState s = scenarios::burrau();
  const TriangleGeometry geo = triangle_geometry(s);
  // Pair k excludes body k.
  CHECK(geo.side[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(geo.side[1] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(geo.side[2] == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(geo.perimeter == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(geo.min_side == doctest::Approx(3.0));
  CHECK(geo.min_side_pair == 0);
  CHECK(std::abs(geo.signed_area) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("conserved quantities of the survey state") {
  const PlanarState s = scenarios::burrau();
  const ConservedSet c = conserved(s);
  CHECK(c.kinetic == 0.0);
  // -(3*4/5 + 3*5/4 + 4*5/3) = -769/60
  CHECK(c.energy == doctest::Approx(-769.0 / 60.0).epsilon(1e-14));
  CHECK(c.angular_momentum == 0.0);
  CHECK(c.moment_of_inertia == doctest::Approx(60.0).epsilon(1e-14));
}

TEST_CASE("recentering places the centre of mass at rest at the origin") {
  PlanarState s = scenarios::burrau();
  for (auto& b : s.bodies) {
    b.pos += Vec2{10.0, -7.0};
    b.vel += Vec2{2.0, 3.0};
  }
  const PlanarState r = recentered(s);
  CHECK(norm(com_position(r)) < 1e-13);
  CHECK(norm(com_velocity(r)) < 1e-13);
  const PlanarState orig = scenarios::burrau();
  for (int i = 0; i < kBodyCount; ++i) {
    CHECK(norm(r.bodies[i].pos - orig.bodies[i].pos) < 1e-12);
    CHECK(norm(r.bodies[i].vel - orig.bodies[i].vel) < 1e-12);
  }
}

TEST_CASE("barycentric distances recovered from the mutual separations") {
  std::mt19937 rng(20260815);
  for (int trial = 0; trial < 1000; ++trial) {
    const PlanarState s = testutil::random_state(rng);
    const TriangleGeometry geo = triangle_geometry(s);
    std::array<double, 3> masses{};
    std::array<double, 3> side_sq{};
    for (int i = 0; i < 3; ++i) {
      masses[i] = s.bodies[i].mass;
      side_sq[i] = geo.side[i] * geo.side[i];
    }
    const auto dist_sq = com_distance_sq_from_sides(masses, side_sq);
    for (int i = 0; i < 3; ++i) {
      const double direct = geo.com_distance[i] * geo.com_distance[i];
      CHECK(testutil::rel_diff(dist_sq[i], direct) < 1e-10);
    }
  }
}

TEST_CASE("accelerations: equal-mass equilateral pulls at the centroid") {
  PlanarState s;
  const double r = 1.0;  // circumradius
  for (int i = 0; i < 3; ++i) {
    const double ang = 2.0 * M_PI * i / 3.0;
    s.bodies[i].mass = 1.0 / 3.0;
    s.bodies[i].pos = {r * std::cos(ang), r * std::sin(ang)};
  }
  const auto acc = accelerations(s);
  // Two pulls of magnitude G m / side^2 at 60 degrees: resultant
  // sqrt(3) G m / side^2 = sqrt(3)/9 pointing at the centroid.
  const double expected = std::sqrt(3.0) / 9.0;
  for (int i = 0; i < 3; ++i) {
    CHECK(norm(acc[i]) == doctest::Approx(expected).epsilon(1e-14));
    const Vec2 inward = -1.0 / norm(s.bodies[i].pos) * s.bodies[i].pos;
    CHECK(dot(acc[i], inward) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("accelerations satisfy Newton's third law on random states") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const PlanarState s = testutil::random_state(rng);
    const auto acc = accelerations(s);
    Vec2 net{};
    for (int i = 0; i < 3; ++i) net += s.bodies[i].mass * acc[i];
    CHECK(norm(net) < 1e-13);
  }
}

TEST_CASE("coincident bodies raise the singular-state error") {
  PlanarState s = scenarios::burrau();
  s.bodies[1].pos = s.bodies[2].pos;
  CHECK_THROWS_AS(accelerations(s), SingularStateError);
  CHECK_THROWS_AS(conserved(s), SingularStateError);
  try {
    accelerations(s);
  } catch (const SingularStateError& err) {
    CHECK(err.pair_index == 0);
    CHECK(err.separation == 0.0);
  }
}

TEST_CASE("virial ratio is zero at rest and one on a circular two-body-like orbit") {
  CHECK(virial_ratio(scenarios::burrau()) == 0.0);
  // Kinetic = |potential| happens for twice the circular speed... instead
  // check the defining ratio directly on a state with known energies.
  PlanarState s;
  s.bodies[0] = {1.0, {1.0, 0.0}, {0.0, 1.0}};
  s.bodies[1] = {1.0, {-1.0, 0.0}, {0.0, -1.0}};
  s.bodies[2] = {1.0, {0.0, 1e6}, {0.0, 0.0}};  // spectator far away
  const ConservedSet c = conserved(s);
  CHECK(virial_ratio(s) == doctest::Approx(c.kinetic / std::abs(c.potential)).epsilon(1e-14));
}

TEST_CASE("signed area changes sign under relabeling and vanishes on a line") {
  PlanarState s;
  s.bodies[0].pos = {0.0, 0.0};
  s.bodies[1].pos = {1.0, 0.0};
  s.bodies[2].pos = {0.0, 1.0};
  CHECK(triangle_geometry(s).signed_area == doctest::Approx(0.5).epsilon(1e-14));
  std::swap(s.bodies[1], s.bodies[2]);
  CHECK(triangle_geometry(s).signed_area == doctest::Approx(-0.5).epsilon(1e-14));
  s.bodies[2].pos = {2.0, 0.0};
  s.bodies[1].pos = {1.0, 0.0};
  CHECK(triangle_geometry(s).signed_area == doctest::Approx(0.0));
}
