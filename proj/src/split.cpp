#include "freefall/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace freefall::split {

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::EllipticHyperbolic: return "elliptic_hyperbolic";
    case Outcome::TripleCollisionEnd: return "triple_collision";
    case Outcome::PeriodicCandidate: return "periodic_candidate";
    case Outcome::Undecided: return "undecided";
  }
  return "unknown";
}

TwoBodyElements two_body_elements(double m1, double m2, const Vec2& rel_pos,
                                  const Vec2& rel_vel, double g) {
  const double r = norm(rel_pos);
  if (r == 0.0) throw std::invalid_argument("two_body_elements(): zero separation");
  TwoBodyElements el;
  el.mu = g * (m1 + m2);
  el.energy_per_mass = 0.5 * norm_sq(rel_vel) - el.mu / r;
  const double reduced = m1 * m2 / (m1 + m2);
  el.energy = reduced * el.energy_per_mass;
  el.angular_momentum_per_mass = cross(rel_pos, rel_vel);
  el.angular_momentum = reduced * el.angular_momentum_per_mass;
  el.semi_major = el.energy_per_mass != 0.0
                      ? -el.mu / (2.0 * el.energy_per_mass)
                      : std::numeric_limits<double>::infinity();
  const double h = el.angular_momentum_per_mass;
  el.semi_latus = h * h / el.mu;
  const double ecc_sq = 1.0 + 2.0 * el.energy_per_mass * h * h / (el.mu * el.mu);
  el.eccentricity = std::sqrt(std::max(0.0, ecc_sq));
  el.bound = el.energy_per_mass < 0.0;
  el.body_energy = {el.energy * m2 / (m1 + m2), el.energy * m1 / (m1 + m2)};
  return el;
}

Decomposition decompose(const PlanarState& s, int pair) {
  if (pair < 0 || pair > 2) throw std::invalid_argument("decompose(): pair out of range");
  const int i = kPairs[pair][0];
  const int j = kPairs[pair][1];
  const int k = pair;  // the excluded body
  const Body& bi = s.bodies[i];
  const Body& bj = s.bodies[j];
  const Body& bk = s.bodies[k];

  Decomposition dec;
  dec.pair = pair;
  dec.inner = two_body_elements(bi.mass, bj.mass, bj.pos - bi.pos, bj.vel - bi.vel, s.g);

  const double m_pair = bi.mass + bj.mass;
  const Vec2 pair_pos = (bi.mass * bi.pos + bj.mass * bj.pos) / m_pair;
  const Vec2 pair_vel = (bi.mass * bi.vel + bj.mass * bj.vel) / m_pair;
  dec.outer = two_body_elements(m_pair, bk.mass, bk.pos - pair_pos, bk.vel - pair_vel, s.g);

  dec.pair_binding_energy = dec.inner.energy;
  dec.outer_energy = dec.outer.energy;
  dec.outer_distance = norm(bk.pos - pair_pos);
  dec.single_to_member = {norm(bk.pos - bi.pos), norm(bk.pos - bj.pos)};
  // Exact remainder of the energy decomposition: the third body's
  // potential against the pair members, minus its potential against the
  // pair barycentre with the pair mass lumped there.
  dec.coupling = s.g * bk.mass *
                 (m_pair / dec.outer_distance - bi.mass / dec.single_to_member[0] -
                  bj.mass / dec.single_to_member[1]);
  return dec;
}

int closest_pair(const PlanarState& s) {
  return triangle_geometry(s).min_side_pair;
}

int choose_pair(const PlanarState& s) {
  const TriangleGeometry geo = triangle_geometry(s);
  int best = 0;
  double best_energy = std::numeric_limits<double>::infinity();
  double best_side = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double e = decompose(s, k).pair_binding_energy;
    if (e < best_energy || (e == best_energy && geo.side[k] < best_side)) {
      best = k;
      best_energy = e;
      best_side = geo.side[k];
    }
  }
  return best;
}

double asymptotic_member_ratio(const std::array<double, 3>& masses, int pair, int member) {
  if (pair < 0 || pair > 2) {
    throw std::invalid_argument("asymptotic_member_ratio(): pair out of range");
  }
  const int i0 = kPairs[pair][0];
  const int j0 = kPairs[pair][1];
  if (member != i0 && member != j0) {
    throw std::invalid_argument("asymptotic_member_ratio(): member not in pair");
  }
  const int j = member;
  const int i = (member == i0) ? j0 : i0;
  const int k = pair;
  const double m_total = masses[0] + masses[1] + masses[2];
  return ((masses[i] + masses[j]) / m_total) * std::sqrt((masses[j] + masses[k]) / masses[j]);
}

OutcomeReport classify_outcome(const Trajectory& traj, const OutcomeCriteria& criteria) {
  OutcomeReport report;
  if (traj.samples.empty()) return report;

  if (traj.stop == StopReason::TripleCollision) {
    report.outcome = Outcome::TripleCollisionEnd;
    return report;
  }

  const PlanarState& first = traj.samples.front();
  const PlanarState& last = traj.samples.back();
  const TriangleGeometry geo0 = triangle_geometry(first);
  const double perimeter0 = geo0.perimeter;

  if (traj.bounce_count > 0) {
    report.outcome = Outcome::PeriodicCandidate;
    return report;
  }

  const int best = choose_pair(last);
  const Decomposition dec = decompose(last, best);
  report.escaper = best;
  report.outer_eccentricity = dec.outer.eccentricity;
  report.outer_energy = dec.outer.energy;
  report.pair_binding_energy = dec.pair_binding_energy;
  report.final_outer_distance = dec.outer_distance;

  const double e_total = conserved(first).energy;
  const double r_star = criteria.r_star > 0.0
                            ? criteria.r_star
                            : *std::max_element(geo0.side.begin(), geo0.side.end());

  // The escape certificate is a conjunction over a trailing window: the
  // pair holds more binding than the whole system, the third body is
  // unbound from it, the coupling remainder is negligible, and the outer
  // separation grows past the escape distance.
  std::size_t tail_begin = traj.samples.size();
  const double t_tail = last.t - criteria.tail_fraction * (last.t - first.t);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    if (traj.samples[i].t >= t_tail) {
      tail_begin = i;
      break;
    }
  }
  if (traj.samples.size() > criteria.min_tail_samples) {
    tail_begin = std::min(tail_begin, traj.samples.size() - criteria.min_tail_samples);
  } else {
    tail_begin = 0;
  }

  bool receding = true;
  bool bound_pair = true;
  bool unbound_outer = true;
  bool small_coupling = true;
  bool far_enough = true;
  double prev_dist = -1.0;
  for (std::size_t i = tail_begin; i < traj.samples.size(); ++i) {
    const Decomposition d = decompose(traj.samples[i], best);
    if (!(d.pair_binding_energy < e_total)) bound_pair = false;
    if (!(d.outer.energy > 0.0)) unbound_outer = false;
    if (!(std::abs(d.coupling) < criteria.coupling_fraction * std::abs(e_total))) {
      small_coupling = false;
    }
    if (!(d.outer_distance > r_star)) far_enough = false;
    if (prev_dist >= 0.0 && d.outer_distance <= prev_dist) receding = false;
    prev_dist = d.outer_distance;
  }
  report.outer_receding = receding;

  const bool escaped = bound_pair && unbound_outer && small_coupling && far_enough && receding;
  if (escaped) {
    report.outcome = Outcome::EllipticHyperbolic;
    // Last onset of the escape condition (pair energy below the total)
    // that persists to the end of the run.
    double onset = 0.0;
    bool active = false;
    for (const EventRecord& ev : traj.events) {
      if (ev.kind != EventKind::BindingBelowTotal || ev.subject != best) continue;
      if (ev.value < 0.0) {
        if (!active) {
          onset = ev.t;
          active = true;
        }
      } else {
        active = false;
      }
    }
    if (active) {
      report.split_time = onset;
    } else {
      // Fallback for runs without event tracking: scan the samples.
      const ConservedSet c0 = conserved(first);
      double onset_t = 0.0;
      bool below = false;
      for (const PlanarState& s : traj.samples) {
        const double e_pair = decompose(s, best).pair_binding_energy;
        const bool now_below = e_pair < c0.energy;
        if (now_below && !below) onset_t = s.t;
        below = now_below;
      }
      if (below) report.split_time = onset_t;
    }
    return report;
  }

  // Near-return test: back to the initial positions, nearly at rest.
  bool returned = true;
  const double v_scale = std::sqrt(first.g * total_mass(first) / perimeter0);
  for (int i = 0; i < 3; ++i) {
    if (norm(last.bodies[i].pos - first.bodies[i].pos) >
            criteria.return_position_tol * perimeter0 ||
        norm(last.bodies[i].vel) > criteria.return_speed_tol * v_scale) {
      returned = false;
      break;
    }
  }
  if (returned) {
    report.outcome = Outcome::PeriodicCandidate;
    return report;
  }

  report.outcome = Outcome::Undecided;
  return report;
}

}  // namespace freefall::split
