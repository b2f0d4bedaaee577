#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "freefall/central.hpp"
#include "freefall/isosceles.hpp"
#include "freefall/state.hpp"
#include "test_util.hpp"

using namespace freefall;
namespace iso = freefall::isosceles;

namespace {

iso::State random_reduced(std::mt19937& rng) {
  std::uniform_real_distribution<double> x_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> y_dist(0.2, 2.0);
  std::uniform_real_distribution<double> v_dist(-1.0, 1.0);
  iso::State s;
  s.x = x_dist(rng);
  s.y = y_dist(rng);
  s.vx = v_dist(rng);
  s.vy = v_dist(rng);
  return s;
}

}  // namespace

TEST_CASE("reduced acceleration equals the embedded three-body acceleration") {
  std::mt19937 rng(101);
  const double m = 1.0 / 3.0;
  const double g = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const iso::State s = random_reduced(rng);
    if (std::abs(s.x) < 0.1) continue;
    const iso::Accel red = iso::reduced_acceleration(s.x, s.y, m, g);
    const PlanarState full = iso::embed(s, m, g);
    const auto acc = accelerations(full);
    // x = apex_x - base_x  =>  x'' = (3/2) apex acceleration.
    CHECK(red.ax == doctest::Approx(1.5 * acc[0].x).epsilon(1e-12));
    CHECK(red.ay == doctest::Approx(acc[1].y).epsilon(1e-12));
    // Symmetry of the embedded pair.
    CHECK(acc[1].x == doctest::Approx(acc[2].x).epsilon(1e-12));
    CHECK(acc[1].y == doctest::Approx(-acc[2].y).epsilon(1e-12));
    CHECK(std::abs(acc[0].y) < 1e-15);
  }
}

TEST_CASE("reduced energy equals the embedded three-body energy") {
  std::mt19937 rng(102);
  const double m = 1.0 / 3.0;
  for (int trial = 0; trial < 50; ++trial) {
    const iso::State s = random_reduced(rng);
    const double reduced = iso::reduced_energy(s, m, 1.0);
    const double full = conserved(iso::embed(s, m, 1.0)).energy;
    CHECK(testutil::rel_diff(reduced, full) < 1e-13);
  }
}

TEST_CASE("embedding round trip") {
  std::mt19937 rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const iso::State s = random_reduced(rng);
    const iso::State back = iso::extract(iso::embed(s, 0.4, 1.3));
    CHECK(back.x == doctest::Approx(s.x).epsilon(1e-13));
    CHECK(back.y == doctest::Approx(s.y).epsilon(1e-13));
    CHECK(back.vx == doctest::Approx(s.vx).epsilon(1e-13));
    CHECK(back.vy == doctest::Approx(s.vy).epsilon(1e-13));
  }
  CHECK_THROWS_AS(iso::extract(PlanarState{}), std::invalid_argument);
}

TEST_CASE("free-fall construction: apex angle fixes the aspect ratio") {
  // alpha = 60 degrees is the equilateral triangle.
  const iso::State eq = iso::free_fall_state(60.0, 1.0);
  const TriangleGeometry geo = triangle_geometry(iso::embed(eq, 1.0 / 3.0, 1.0));
  for (int k = 0; k < 3; ++k) CHECK(geo.side[k] == doctest::Approx(geo.side[0]).epsilon(1e-13));
  CHECK(eq.y == doctest::Approx(std::tan(std::numbers::pi / 6.0)).epsilon(1e-14));
  CHECK(eq.vx == 0.0);
  CHECK(eq.vy == 0.0);
}

TEST_CASE("shape identities: kinetic and potential against the direct forms") {
  std::mt19937 rng(104);
  const double m = 1.0 / 3.0;
  const double g = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const iso::State s = random_reduced(rng);
    const iso::ShapeCoords sc = iso::shape_coords(s);

    const PlanarState full = iso::embed(s, m, g);
    const ConservedSet c = conserved(full);
    CHECK(testutil::rel_diff(iso::kinetic_from_shape(sc, m), c.kinetic) < 1e-12);
    CHECK(testutil::rel_diff(iso::potential_from_shape(sc.size, sc.angle, m, g), c.potential) <
          1e-12);
    // The size coordinate is the gyration radius of the embedded state.
    CHECK(testutil::rel_diff(sc.size, triangle_geometry(full).gyration_radius) < 1e-12);
  }
}

TEST_CASE("shape potential factor at the landmark angles") {
  CHECK(iso::shape_potential_factor(0.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(iso::shape_potential_factor(std::numbers::pi / 4.0) ==
        doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  // The equilateral shape sits at the minimum of the factor.
  const double f45 = iso::shape_potential_factor(std::numbers::pi / 4.0);
  CHECK(iso::shape_potential_factor(std::numbers::pi / 4.0 - 0.05) > f45);
  CHECK(iso::shape_potential_factor(std::numbers::pi / 4.0 + 0.05) > f45);
}

TEST_CASE("shape angle landmarks: collinear zero, equilateral 45 degrees") {
  iso::State collinear;
  collinear.x = 0.0;
  collinear.y = 0.8;
  CHECK(iso::shape_coords(collinear).angle == doctest::Approx(0.0));
  const iso::State eq = iso::free_fall_state(60.0, 2.0);
  CHECK(iso::shape_coords(eq).angle == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-13));
}

namespace {

// Samples bracketing an analytic collision step share the window height
// exactly and flip the base-pair velocity sign across a tiny time gap.
struct PatchPair {
  iso::State before;
  iso::State after;
};

std::vector<PatchPair> patch_pairs(const iso::Run& run) {
  std::vector<PatchPair> pairs;
  for (std::size_t i = 0; i + 1 < run.samples.size(); ++i) {
    const iso::State& s0 = run.samples[i];
    const iso::State& s1 = run.samples[i + 1];
    if (s0.y == s1.y && s0.vy < 0.0 && s1.vy > 0.0 && s1.t > s0.t && s1.t - s0.t < 1e-2) {
      pairs.push_back({s0, s1});
    }
  }
  return pairs;
}

}  // namespace

TEST_CASE("each base-pair reflection conserves energy to 1e-9") {
  const iso::State init = iso::free_fall_state(40.0, 1.0);
  iso::Settings settings;
  settings.t_end = 12.0;
  const iso::Run run = iso::integrate(init, 1.0 / 3.0, 1.0, settings);
  CHECK(run.stop == StopReason::ReachedEnd);
  CHECK(run.arrivals.size() >= 3);

  const std::vector<PatchPair> pairs = patch_pairs(run);
  REQUIRE(pairs.size() >= 3);
  for (const PatchPair& p : pairs) {
    const double e0 = iso::reduced_energy(p.before, 1.0 / 3.0, 1.0);
    const double e1 = iso::reduced_energy(p.after, 1.0 / 3.0, 1.0);
    CHECK(std::abs(e1 - e0) < 1e-9);
  }

  // The smooth phase pays a tolerance-amplification price of roughly
  // rel_tol * m * mu / (2 y_window) per approach, so the run-level drift
  // is orders looser than the per-reflection budget.  Cap it coarsely.
  CHECK(run.max_energy_drift < 1e-2 * std::abs(run.initial_energy));
}

TEST_CASE("patch arrival times are insensitive to the patch window") {
  const iso::State init = iso::free_fall_state(40.0, 1.0);
  iso::Settings narrow;
  narrow.t_end = 12.0;
  narrow.window_fraction = 1e-8;
  iso::Settings wide = narrow;
  wide.window_fraction = 1e-7;
  const iso::Run a = iso::integrate(init, 1.0 / 3.0, 1.0, narrow);
  const iso::Run b = iso::integrate(init, 1.0 / 3.0, 1.0, wide);
  REQUIRE(a.arrivals.size() >= 3);
  REQUIRE(a.arrivals.size() == b.arrivals.size());
  // The first approach carries no accumulated drift: the analytic step
  // must land on the same collision instant regardless of where the
  // window was opened.
  CHECK(a.arrivals[0].t == doctest::Approx(b.arrivals[0].t).epsilon(1e-10));
  CHECK(a.arrivals[0].apex_x == doctest::Approx(b.arrivals[0].apex_x).epsilon(1e-9));
  // Later arrivals shadow each other only coarsely: the window edge
  // amplifies integration error by mu/(2 y_window) each passage.
  for (std::size_t i = 1; i < a.arrivals.size(); ++i) {
    CHECK(std::abs(a.arrivals[i].t - b.arrivals[i].t) < 0.05);
  }
}

TEST_CASE("the base pair reflects elastically through every passage") {
  const iso::State init = iso::free_fall_state(35.0, 1.0);
  iso::Settings settings;
  settings.t_end = 8.0;
  const iso::Run run = iso::integrate(init, 1.0 / 3.0, 1.0, settings);
  REQUIRE(run.arrivals.size() >= 2);

  const std::vector<PatchPair> pairs = patch_pairs(run);
  REQUIRE(pairs.size() == run.arrivals.size());
  for (const PatchPair& p : pairs) {
    // Exact specular exit: same window height, reversed approach speed.
    CHECK(p.after.y == p.before.y);
    CHECK(p.after.vy == -p.before.vy);
    CHECK(p.after.t > p.before.t);
    const double e0 = iso::reduced_energy(p.before, 1.0 / 3.0, 1.0);
    const double e1 = iso::reduced_energy(p.after, 1.0 / 3.0, 1.0);
    CHECK(std::abs(e1 - e0) < 1e-9);
  }
}

TEST_CASE("equilateral reduced fall collapses totally") {
  const iso::State init = iso::free_fall_state(60.0, 1.0);
  iso::Settings settings;
  settings.t_end = 5.0;
  const iso::Run run = iso::integrate(init, 1.0 / 3.0, 1.0, settings);
  CHECK(run.stop == StopReason::TripleCollision);
  REQUIRE(run.collapse_time.has_value());
  // Independent route: the closed-form collapse time of the embedded
  // central configuration.
  const double expected = central::collapse_time_config(iso::embed(init, 1.0 / 3.0, 1.0));
  CHECK(*run.collapse_time == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("singularity classification separates the two collision types") {
  iso::State near_bc;
  near_bc.x = 0.8;
  near_bc.y = 1e-9;
  near_bc.vy = -1.0;
  const iso::SingularityReport bc = iso::classify_singularity(near_bc, 1.0 / 3.0, 1.0, 1.0);
  CHECK(bc.kind == iso::SingularityKind::BinaryCollision);
  CHECK(bc.apex_energy < 0.0);  // apex bound to the coalesced pair

  iso::State near_tc;
  near_tc.x = 1e-10;
  near_tc.y = 1e-10;
  near_tc.vx = -1.0;
  near_tc.vy = -1.0;
  CHECK(iso::classify_singularity(near_tc, 1.0 / 3.0, 1.0, 1.0).kind ==
        iso::SingularityKind::TripleCollision);

  iso::State regular;
  regular.x = 1.0;
  regular.y = 0.5;
  CHECK(iso::classify_singularity(regular, 1.0 / 3.0, 1.0, 1.0).kind ==
        iso::SingularityKind::None);
}

TEST_CASE("the reversal functional changes sign across the steep-fall boundary") {
  // Near 140 degrees the apex either has or has not swung through the
  // base line by the time of the first base-pair collision.
  const iso::State low = iso::free_fall_state(138.5, 1.0);
  const iso::State high = iso::free_fall_state(141.5, 1.0);
  iso::Settings settings;
  settings.stop_after_passages = 1;
  settings.t_end = 1e9;  // passage-capped
  const iso::Run a = iso::integrate(low, 1.0 / 3.0, 1.0, settings);
  const iso::Run b = iso::integrate(high, 1.0 / 3.0, 1.0, settings);
  REQUIRE(a.arrivals.size() >= 1);
  REQUIRE(b.arrivals.size() >= 1);
  CHECK(a.arrivals[0].apex_x * b.arrivals[0].apex_x < 0.0);
}

TEST_CASE("angle search tolerances nest") {
  // One collision before the collapse: the family whose first member
  // sits between 25 and 26 degrees.
  const double coarse = iso::tc_angle_search(1, {25.0, 26.0}, 1e-2);
  const double fine = iso::tc_angle_search(1, {25.0, 26.0}, 1e-4);
  CHECK(std::abs(coarse - fine) < 2e-2);
  CHECK(fine > 25.0);
  CHECK(fine < 26.0);
  CHECK(fine == doctest::Approx(25.3663).epsilon(2e-4));
}

TEST_CASE("family velocity shooting: right-angle anchor and mechanical similarity") {
  // Right-angle apex over a base of length 3 (reduced half-width 1.5,
  // apex height 1.5): the inward shot whose first base encounter is a
  // total collapse.
  const auto a90 = iso::family_velocity_for_tc(90.0, 1.5, {-0.25, -0.20}, 1e-8);
  CHECK(a90.base_velocity < 0.0);  // wide apex: the shot points inward
  CHECK(std::abs(a90.base_velocity) > 0.218);
  CHECK(std::abs(a90.base_velocity) < 0.225);
  CHECK(std::abs(a90.base_velocity) == doctest::Approx(0.2203652).epsilon(5e-5));
  CHECK(a90.collapse_time == doctest::Approx(3.0722296).epsilon(1e-6));

  // Scaling all lengths by 4 scales speeds by 1/2 and times by 8.
  const auto big = iso::family_velocity_for_tc(90.0, 6.0, {-0.125, -0.10}, 1e-8);
  CHECK(big.base_velocity == doctest::Approx(a90.base_velocity / 2.0).epsilon(1e-5));
  CHECK(big.collapse_time == doctest::Approx(a90.collapse_time * 8.0).epsilon(1e-5));

  // Equilateral apex: the zero shot, collapsing at the closed-form time
  // of the embedded configuration.
  const auto eq = iso::family_velocity_for_tc(60.0, 1.0, {-0.05, 0.05}, 1e-9);
  CHECK(std::abs(eq.base_velocity) < 1e-8);
  const double expected =
      central::collapse_time_config(iso::embed(iso::free_fall_state(60.0, 1.0), 1.0 / 3.0, 1.0));
  CHECK(eq.collapse_time == doctest::Approx(expected).epsilon(1e-9));

  // A bracket on the wrong side of the root carries no sign change.
  CHECK_THROWS_AS(iso::family_velocity_for_tc(90.0, 1.5, {0.20, 0.24}, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("outward family member turns near rest at the steep-fall collapse shape") {
  // Past the reversal boundary the collapsing shot points outward: the
  // pair climbs, the triangle opens up, and the system falls back to a
  // single encounter that is the total collapse.
  const auto out = iso::family_velocity_for_tc(130.68, 1.0, {0.10, 0.20}, 1e-8);
  CHECK(out.base_velocity > 0.0);
  CHECK(out.base_velocity == doctest::Approx(0.15014451).epsilon(1e-4));
  CHECK(out.collapse_time == doctest::Approx(8.7386039).epsilon(1e-4));

  iso::State s = iso::free_fall_state(130.68, 1.0);
  s.vy = out.base_velocity;
  iso::Settings settings;
  settings.t_end = out.collapse_time + 0.5;
  settings.rel_tol = 1e-11;
  settings.record_samples = true;
  const iso::Run run = iso::integrate(s, 1.0 / 3.0, 1.0, settings);
  REQUIRE(run.collapse_time.has_value());

  const double initial_energy = iso::reduced_energy(s, 1.0 / 3.0, 1.0);
  double max_size = 0.0, kinetic_at_turn = 0.0, turn_time = 0.0;
  for (const iso::State& q : run.samples) {
    const double size = std::sqrt(q.x * q.x / 3.0 + q.y * q.y);
    if (size > max_size) {
      max_size = size;
      kinetic_at_turn = (q.vx * q.vx / 3.0 + q.vy * q.vy) / 3.0;
      turn_time = q.t;
    }
  }
  CHECK(max_size > 1.5);  // a genuine excursion beyond the initial size
  CHECK(kinetic_at_turn < 0.02 * std::abs(initial_energy));  // rest-like turn

  // Between the turn and the collapse the apex angle sweeps through the
  // steep-fall free-fall collapse angle.
  bool crossed = false;
  double prev_angle = 0.0;
  bool first = true;
  for (const iso::State& q : run.samples) {
    if (q.t < turn_time || q.t > out.collapse_time - 0.5) continue;
    const double angle = 2.0 * std::atan2(q.y, q.x) * 180.0 / std::numbers::pi;
    if (!first && (prev_angle - 140.05955) * (angle - 140.05955) < 0.0) crossed = true;
    prev_angle = angle;
    first = false;
  }
  CHECK(crossed);
}
