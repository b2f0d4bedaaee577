#include "freefall/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>

#include "freefall/central.hpp"
#include "freefall/ode.hpp"
#include "freefall/split.hpp"

namespace freefall {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::BinaryMinDistance: return "binary_min_distance";
    case EventKind::BinaryCollision: return "binary_collision";
    case EventKind::CollinearConfiguration: return "collinear_configuration";
    case EventKind::MinMomentOfInertia: return "min_moment_of_inertia";
    case EventKind::BodyAtRest: return "body_at_rest";
    case EventKind::AllAtRest: return "all_at_rest";
    case EventKind::BindingEnergyZero: return "binding_energy_zero";
    case EventKind::BindingBelowTotal: return "binding_below_total";
    case EventKind::PairEnergyPositive: return "pair_energy_positive";
    case EventKind::AngularMomentumZeroOfBody: return "angular_momentum_zero";
    case EventKind::TripleCollision: return "triple_collision";
  }
  return "unknown";
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ReachedEnd: return "reached_end";
    case StopReason::BinaryCollision: return "binary_collision";
    case StopReason::TripleCollision: return "triple_collision";
  }
  return "unknown";
}

namespace {

constexpr double kPi = std::numbers::pi;

using Y = ode::StateVec<13>;
// Layout: y[0] = t, y[1..6] positions (x,y per body), y[7..12] velocities.

struct Model {
  std::array<double, 3> m{};
  double g = 1.0;
  double s_ref = 1.0;  ///< fixed length scale of the time transform
  double expo = 1.0;   ///< dt = s_ref * r_min^expo du
};

void unpack(const Y& y, const Model& mod, PlanarState& s) {
  s.t = y[0];
  s.g = mod.g;
  for (int i = 0; i < 3; ++i) {
    s.bodies[i].mass = mod.m[i];
    s.bodies[i].pos = {y[1 + 2 * i], y[2 + 2 * i]};
    s.bodies[i].vel = {y[7 + 2 * i], y[8 + 2 * i]};
  }
}

Y pack(const PlanarState& s) {
  Y y{};
  y[0] = s.t;
  for (int i = 0; i < 3; ++i) {
    y[1 + 2 * i] = s.bodies[i].pos.x;
    y[2 + 2 * i] = s.bodies[i].pos.y;
    y[7 + 2 * i] = s.bodies[i].vel.x;
    y[8 + 2 * i] = s.bodies[i].vel.y;
  }
  return y;
}

/// Right-hand side in the regularising parameter u.
struct Rhs {
  const Model* mod;

  void operator()(double /*u*/, const Y& y, Y& dy) const {
    std::array<double, 3> ax{}, ay{};
    double r_min = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      const int i = kPairs[k][0];
      const int j = kPairs[k][1];
      const double dx = y[1 + 2 * j] - y[1 + 2 * i];
      const double dyy = y[2 + 2 * j] - y[2 + 2 * i];
      const double r2 = dx * dx + dyy * dyy;
      const double r = std::sqrt(r2);
      r_min = std::min(r_min, r);
      const double inv_r3 = mod->g / (r2 * r);
      ax[i] += mod->m[j] * inv_r3 * dx;
      ay[i] += mod->m[j] * inv_r3 * dyy;
      ax[j] -= mod->m[i] * inv_r3 * dx;
      ay[j] -= mod->m[i] * inv_r3 * dyy;
    }
    double factor = mod->s_ref;
    if (mod->expo == 1.0) {
      factor *= r_min;
    } else if (mod->expo != 0.0) {
      factor *= std::pow(r_min, mod->expo);
    }
    dy[0] = factor;
    for (int i = 0; i < 3; ++i) {
      dy[1 + 2 * i] = factor * y[7 + 2 * i];
      dy[2 + 2 * i] = factor * y[8 + 2 * i];
      dy[7 + 2 * i] = factor * ax[i];
      dy[8 + 2 * i] = factor * ay[i];
    }
  }
};

constexpr int kNumFns = 27;
// 0..2   pair radial rate (separation minima)
// 3..5   pair separation - collision radius (terminal)
// 6      signed triangle area
// 7      moment-of-inertia rate
// 8..10  body speed-squared rate
// 11     kinetic-energy rate
// 12..14 pair two-body energy
// 15..17 pair two-body energy - total energy
// 18..20 outer (third body vs pair barycentre) two-body energy
// 21..23 body angular momentum about the centre of mass
// 24     gyration radius - collapse radius (terminal)
// 25     t - t_end (terminal, internal)
// 26     gyration radius - certification radius (internal)

struct FnMeta {
  EventKind kind{};
  int subject = -1;
  int direction = 0;  ///< +1: rising through zero, -1: falling, 0: either
  bool terminal = false;
  bool internal = false;  ///< bookkeeping only, never emitted
  bool enabled = true;
  double arm_eps = 0.0;
};

struct EvalCtx {
  double total_energy = 0.0;
  double collision_radius = 0.0;
  double tc_radius = 0.0;
  double cert_radius = 0.0;
  double t_end = 0.0;
};

std::array<double, kNumFns> eval_all(const PlanarState& s, const EvalCtx& ctx) {
  std::array<double, kNumFns> g{};
  const double m_total = total_mass(s);
  const Vec2 rc = com_position(s);
  const Vec2 vc = com_velocity(s);

  std::array<double, 3> sep{};
  for (int k = 0; k < 3; ++k) {
    const int i = kPairs[k][0];
    const int j = kPairs[k][1];
    const Vec2 rel = s.bodies[j].pos - s.bodies[i].pos;
    const Vec2 relv = s.bodies[j].vel - s.bodies[i].vel;
    sep[k] = norm(rel);
    g[0 + k] = dot(rel, relv);
    g[3 + k] = sep[k] - ctx.collision_radius;

    const double mi = s.bodies[i].mass;
    const double mj = s.bodies[j].mass;
    const double mu = s.g * (mi + mj);
    const double e_per_mass = 0.5 * norm_sq(relv) - mu / sep[k];
    const double e_pair = (mi * mj / (mi + mj)) * e_per_mass;
    g[12 + k] = e_pair;
    g[15 + k] = e_pair - ctx.total_energy;

    const int third = k;
    const double m_pair = mi + mj;
    const Vec2 pair_com = (mi * s.bodies[i].pos + mj * s.bodies[j].pos) / m_pair;
    const Vec2 pair_vel = (mi * s.bodies[i].vel + mj * s.bodies[j].vel) / m_pair;
    const Vec2 outer_rel = s.bodies[third].pos - pair_com;
    const Vec2 outer_vel = s.bodies[third].vel - pair_vel;
    const double r_outer = norm(outer_rel);
    const double e_outer_per_mass = 0.5 * norm_sq(outer_vel) - s.g * m_total / r_outer;
    g[18 + k] = (m_pair * s.bodies[third].mass / m_total) * e_outer_per_mass;
  }

  const Vec2 e1 = s.bodies[1].pos - s.bodies[0].pos;
  const Vec2 e2 = s.bodies[2].pos - s.bodies[0].pos;
  g[6] = 0.5 * cross(e1, e2);

  const auto acc = accelerations(s);
  double inertia = 0.0;
  double inertia_rate = 0.0;
  double kinetic_rate = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 dr = s.bodies[i].pos - rc;
    const Vec2 dv = s.bodies[i].vel - vc;
    inertia += s.bodies[i].mass * norm_sq(dr);
    inertia_rate += s.bodies[i].mass * dot(dr, dv);
    kinetic_rate += s.bodies[i].mass * dot(s.bodies[i].vel, acc[i]);
    g[8 + i] = dot(s.bodies[i].vel, acc[i]);
    g[21 + i] = cross(dr, dv);
  }
  g[7] = inertia_rate;
  g[11] = kinetic_rate;

  const double r_g = std::sqrt(inertia / m_total);
  g[24] = r_g - ctx.tc_radius;
  g[25] = s.t - ctx.t_end;
  g[26] = r_g - ctx.cert_radius;
  return g;
}

int middle_body(const PlanarState& s) {
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const Vec2 a = s.bodies[j].pos - s.bodies[i].pos;
    const Vec2 b = s.bodies[k].pos - s.bodies[i].pos;
    if (dot(a, b) < 0.0) return i;
  }
  return -1;
}

struct LocatedRoot {
  double u = 0.0;
  Y y{};
  int fn = -1;
};

}  // namespace

Trajectory integrate(const PlanarState& init, const IntegratorSettings& settings) {
  if (!(settings.t_end > init.t)) {
    throw std::invalid_argument("integrate(): t_end must exceed the initial time");
  }

  Trajectory traj;
  Model mod;
  for (int i = 0; i < 3; ++i) mod.m[i] = init.bodies[i].mass;
  mod.g = init.g;
  mod.expo = settings.time_transform_exponent;

  const TriangleGeometry geo0 = triangle_geometry(init);
  mod.s_ref = geo0.min_side;
  const double m_total = total_mass(init);
  const double length_scale = geo0.perimeter;
  const double speed_scale = std::sqrt(2.0 * init.g * m_total / (length_scale / 3.0));
  const double time_scale = length_scale / speed_scale;
  const double accel_scale = init.g * m_total / ((length_scale / 3.0) * (length_scale / 3.0));

  EvalCtx ctx;
  const ConservedSet c0 = conserved(init);
  ctx.total_energy = c0.energy;
  ctx.collision_radius =
      settings.collision_radius > 0.0 ? settings.collision_radius : 1e-10 * geo0.perimeter;
  ctx.tc_radius =
      settings.tc_radius > 0.0 ? settings.tc_radius : 1e-9 * geo0.gyration_radius;
  ctx.cert_radius = std::max(1e-5 * geo0.gyration_radius, 10.0 * ctx.tc_radius);
  ctx.t_end = settings.t_end;

  traj.initial_energy = c0.energy;
  traj.initial_angular_momentum = c0.angular_momentum;
  traj.min_pair_separation = geo0.min_side;
  traj.samples.push_back(init);

  // A mirrored continuation through total collapse is only meaningful for
  // homothetic solutions; remember whether the run began as one.
  bool init_central_rest = false;
  try {
    central::collapse_time_config(init, 1e-8);
    init_central_rest = true;
  } catch (const std::exception&) {
  }

  std::array<FnMeta, kNumFns> meta{};
  {
    const double eps_rate = 1e-12 * length_scale * speed_scale;
    const double eps_energy = 1e-12 * init.g * m_total * m_total / length_scale;
    for (int k = 0; k < 3; ++k) {
      meta[0 + k] = {EventKind::BinaryMinDistance, k, +1, false, false, true, eps_rate};
      meta[3 + k] = {EventKind::BinaryCollision, k, -1, true, false, true, 0.0};
      meta[12 + k] = {EventKind::BindingEnergyZero, k, 0, false, false, true, eps_energy};
      meta[15 + k] = {EventKind::BindingBelowTotal, k, 0, false, false, true, eps_energy};
      meta[18 + k] = {EventKind::PairEnergyPositive, k, +1, false, false, true, eps_energy};
    }
    meta[6] = {EventKind::CollinearConfiguration, -1, 0, false, false, true,
               1e-12 * length_scale * length_scale};
    meta[7] = {EventKind::MinMomentOfInertia, -1, +1, false, false, true,
               1e-12 * m_total * length_scale * speed_scale};
    for (int i = 0; i < 3; ++i) {
      meta[8 + i] = {EventKind::BodyAtRest, i, +1, false, false, true,
                     1e-12 * speed_scale * accel_scale};
      meta[21 + i] = {EventKind::AngularMomentumZeroOfBody, i, 0, false, false, true,
                      1e-12 * length_scale * speed_scale};
    }
    meta[11] = {EventKind::AllAtRest, -1, +1, false, false, true,
                1e-12 * m_total * speed_scale * accel_scale};
    meta[24] = {EventKind::TripleCollision, -1, -1, true, false, true, 0.0};
    meta[25] = {EventKind::TripleCollision, -1, +1, true, true, true, 0.0};  // t_end sentinel
    meta[26] = {EventKind::TripleCollision, -1, -1, false, true, true, 0.0}; // certification probe
    if (!settings.detect_events) {
      for (auto& fm : meta) {
        if (!fm.terminal && !fm.internal) fm.enabled = false;
      }
    }
  }

  Rhs rhs{&mod};
  ode::StepControl<13> ctrl;
  ctrl.rel_tol = settings.rel_tol;
  ctrl.abs_tol[0] = settings.rel_tol * time_scale;
  for (int i = 1; i <= 6; ++i) ctrl.abs_tol[i] = settings.rel_tol * length_scale * 1e-2;
  for (int i = 7; i <= 12; ++i) ctrl.abs_tol[i] = settings.rel_tol * speed_scale * 1e-2;
  ctrl.max_steps = settings.max_steps;
  if (settings.max_du > 0.0) ctrl.max_step = settings.max_du;
  const double factor0 =
      mod.s_ref * (mod.expo == 0.0 ? 1.0 : std::pow(geo0.min_side, mod.expo));
  ctrl.initial_step = time_scale / (1000.0 * factor0);

  const auto advance = [&](const Y& y, double ua, double ub) -> Y {
    if (ub == ua) return y;
    return ode::integrate_to<13>(rhs, y, ua, ub, ctrl).y;
  };

  // Hybrid secant/bisection refinement of g(fn) = 0 inside one accepted step.
  const auto locate = [&](int fn, double ua, Y ya, double ga, double ub, Y yb,
                          double gb) -> std::pair<double, Y> {
    PlanarState probe;
    for (int it = 0; it < 80; ++it) {
      if (std::abs(yb[0] - ya[0]) <= 1e-12 * std::max(1.0, std::abs(yb[0]))) break;
      double um = 0.5 * (ua + ub);
      if (gb != ga) {
        const double secant = ub - gb * (ub - ua) / (gb - ga);
        const double margin = 0.05 * (ub - ua);
        if (secant > ua + margin && secant < ub - margin) um = secant;
      }
      Y ym = advance(ya, ua, um);
      unpack(ym, mod, probe);
      const double gm = eval_all(probe, ctx)[fn];
      if (gm == 0.0) return {um, ym};
      if ((ga < 0.0) != (gm < 0.0)) {
        ub = um;
        yb = std::move(ym);
        gb = gm;
      } else {
        ua = um;
        ya = std::move(ym);
        ga = gm;
      }
    }
    return {ub, yb};
  };

  PlanarState resume = init;
  bool want_resume = true;
  std::optional<central::CentralCertificate> cached_cert;
  double cached_virial = 0.0;
  std::array<double, 3> peak_speed{};
  double peak_max_speed = 0.0;
  double next_sample_t =
      settings.sample_interval > 0.0 ? init.t + settings.sample_interval : 0.0;

  while (want_resume) {
    want_resume = false;
    Y y = pack(resume);
    PlanarState s0 = resume;
    std::array<double, kNumFns> g_prev = eval_all(s0, ctx);
    std::array<bool, kNumFns> armed{};
    for (int f = 0; f < kNumFns; ++f) {
      armed[f] = meta[f].enabled && std::abs(g_prev[f]) > meta[f].arm_eps;
    }

    const auto on_step = [&](double u0, const Y& y0, double u1, const Y& y1) -> ode::StepFlow {
      PlanarState s1;
      unpack(y1, mod, s1);
      auto g_new = eval_all(s1, ctx);

      std::vector<LocatedRoot> roots;
      for (int f = 0; f < kNumFns; ++f) {
        if (!meta[f].enabled) continue;
        if (!armed[f]) {
          if (std::abs(g_new[f]) > meta[f].arm_eps) armed[f] = true;
          continue;
        }
        if (g_prev[f] == 0.0) continue;
        int crossed = 0;
        if (g_prev[f] < 0.0 && g_new[f] >= 0.0) crossed = +1;
        if (g_prev[f] > 0.0 && g_new[f] <= 0.0) crossed = -1;
        if (crossed == 0) continue;
        if (meta[f].direction != 0 && crossed != meta[f].direction) continue;
        auto [ur, yr] = locate(f, u0, y0, g_prev[f], u1, y1, g_new[f]);
        roots.push_back({ur, std::move(yr), f});
      }
      std::sort(roots.begin(), roots.end(),
                [](const LocatedRoot& a, const LocatedRoot& b) { return a.u < b.u; });

      for (const LocatedRoot& root : roots) {
        PlanarState sr;
        unpack(root.y, mod, sr);
        const FnMeta& fm = meta[root.fn];

        if (root.fn == 26) {  // certification probe: remember how central the shape is
          cached_cert = central::central_certificate(sr, 1e-3);
          cached_virial = virial_ratio(sr);
          // Mirroring a homothetic fall is exact at any depth, and the
          // shape is known far more accurately here than at the collapse
          // radius, so a requested bounce pivots at the probe already.
          if (cached_cert->central && std::abs(cached_virial - 1.0) < 1e-3 &&
              settings.bounce_at_collapse && init_central_rest &&
              traj.bounce_count < settings.max_bounces) {
            CollapsePivot pivot = bounce_continue(sr, 1e-3);
            traj.events.push_back({pivot.collapse_time, EventKind::TripleCollision, -1,
                                   triangle_geometry(sr).gyration_radius});
            traj.samples.push_back(sr);
            traj.samples.push_back(pivot.mirrored);
            ++traj.bounce_count;
            resume = pivot.mirrored;
            want_resume = true;
            return ode::StepFlow::Stop;
          }
          continue;
        }
        if (root.fn == 25) {  // reached t_end
          traj.samples.push_back(sr);
          traj.stop = StopReason::ReachedEnd;
          return ode::StepFlow::Stop;
        }
        if (fm.kind == EventKind::BinaryCollision) {
          const TriangleGeometry geo = triangle_geometry(sr);
          traj.events.push_back({sr.t, EventKind::BinaryCollision, fm.subject,
                                 geo.side[fm.subject]});
          traj.min_pair_separation =
              std::min(traj.min_pair_separation, geo.side[fm.subject]);
          traj.samples.push_back(sr);
          traj.stop = StopReason::BinaryCollision;
          return ode::StepFlow::Stop;
        }
        if (root.fn == 24) {  // total-collapse radius crossed
          const TriangleGeometry geo = triangle_geometry(sr);
          auto cert = cached_cert ? *cached_cert : central::central_certificate(sr, 1e-3);
          const double virial = cached_cert ? cached_virial : virial_ratio(sr);
          const bool certified = cert.central && std::abs(virial - 1.0) < 1e-3;
          if (certified && settings.bounce_at_collapse && init_central_rest &&
              traj.bounce_count < settings.max_bounces) {
            CollapsePivot pivot = bounce_continue(sr, 1e-3);
            traj.events.push_back({pivot.collapse_time, EventKind::TripleCollision, -1,
                                   geo.gyration_radius});
            traj.samples.push_back(sr);
            traj.samples.push_back(pivot.mirrored);
            ++traj.bounce_count;
            resume = pivot.mirrored;
            want_resume = true;
            return ode::StepFlow::Stop;
          }
          if (!certified) {
            traj.warnings.push_back(
                "collapse radius crossed without certification (virial " +
                std::to_string(virial) + ")");
          }
          traj.events.push_back(
              {sr.t, EventKind::TripleCollision, -1, geo.gyration_radius});
          traj.samples.push_back(sr);
          traj.stop = StopReason::TripleCollision;
          return ode::StepFlow::Stop;
        }

        // Non-terminal catalogue events.
        EventRecord rec;
        rec.t = sr.t;
        rec.kind = fm.kind;
        rec.subject = fm.subject;
        const auto gr = eval_all(sr, ctx);
        switch (fm.kind) {
          case EventKind::BinaryMinDistance: {
            const TriangleGeometry geo = triangle_geometry(sr);
            rec.value = geo.side[fm.subject];
            traj.min_pair_separation = std::min(traj.min_pair_separation, rec.value);
            break;
          }
          case EventKind::CollinearConfiguration: {
            rec.subject = middle_body(sr);
            // value: rate of change of the signed area at the crossing
            const Vec2 e1 = sr.bodies[1].pos - sr.bodies[0].pos;
            const Vec2 e2 = sr.bodies[2].pos - sr.bodies[0].pos;
            const Vec2 f1 = sr.bodies[1].vel - sr.bodies[0].vel;
            const Vec2 f2 = sr.bodies[2].vel - sr.bodies[0].vel;
            rec.value = 0.5 * (cross(f1, e2) + cross(e1, f2));
            break;
          }
          case EventKind::MinMomentOfInertia: {
            const ConservedSet c = conserved(sr);
            rec.value = c.moment_of_inertia;
            break;
          }
          case EventKind::BodyAtRest: {
            const double sp = norm(sr.bodies[fm.subject].vel);
            if (sp > settings.rest_speed_fraction * peak_speed[fm.subject]) continue;
            rec.value = sp;
            break;
          }
          case EventKind::AllAtRest: {
            double max_sp = 0.0;
            for (const Body& b : sr.bodies) max_sp = std::max(max_sp, norm(b.vel));
            if (max_sp > settings.rest_speed_fraction * peak_max_speed) continue;
            rec.value = max_sp;
            break;
          }
          case EventKind::BindingEnergyZero:
          case EventKind::BindingBelowTotal:
          case EventKind::AngularMomentumZeroOfBody:
            rec.value = (g_prev[root.fn] < 0.0) ? +1.0 : -1.0;
            break;
          case EventKind::PairEnergyPositive: {
            const auto dec = split::decompose(sr, fm.subject);
            rec.value = dec.outer.eccentricity;
            break;
          }
          default:
            rec.value = gr[root.fn];
            break;
        }
        traj.events.push_back(rec);
      }

      // Bookkeeping on the accepted step end.
      g_prev = g_new;
      const ConservedSet c = conserved(s1);
      traj.max_energy_drift =
          std::max(traj.max_energy_drift, std::abs(c.energy - traj.initial_energy));
      traj.max_angular_momentum_drift =
          std::max(traj.max_angular_momentum_drift,
                   std::abs(c.angular_momentum - traj.initial_angular_momentum));
      const TriangleGeometry geo = triangle_geometry(s1);
      traj.min_pair_separation = std::min(traj.min_pair_separation, geo.min_side);
      double max_sp = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double sp = norm(s1.bodies[i].vel);
        peak_speed[i] = std::max(peak_speed[i], sp);
        max_sp = std::max(max_sp, sp);
      }
      peak_max_speed = std::max(peak_max_speed, max_sp);
      ++traj.accepted_steps;

      if (settings.sample_interval <= 0.0) {
        traj.samples.push_back(s1);
      } else if (s1.t >= next_sample_t) {
        traj.samples.push_back(s1);
        while (next_sample_t <= s1.t) next_sample_t += settings.sample_interval;
      }
      return ode::StepFlow::Continue;
    };

    const auto result =
        ode::integrate<13>(rhs, y, 0.0, std::numeric_limits<double>::max(), ctrl, on_step);
    if (!result.stopped_by_callback) {
      throw ode::IntegrationError("integrate(): driver halted without reaching t_end");
    }
    if (want_resume && traj.bounce_count >= settings.max_bounces) {
      traj.warnings.push_back("bounce limit reached; stopping at collapse");
      traj.stop = StopReason::TripleCollision;
      want_resume = false;
    }
    if (want_resume) {
      cached_cert.reset();
    }
  }

  return traj;
}

CollapsePivot bounce_continue(const PlanarState& near_collapse, double tol) {
  const PlanarState s = recentered(near_collapse);
  const auto cert = central::central_certificate(s, tol);
  if (!cert.central) {
    throw std::invalid_argument("bounce_continue(): state is not a central configuration");
  }

  const TriangleGeometry geo = triangle_geometry(s);
  const double speed_char =
      std::sqrt(s.g * total_mass(s) / std::max(geo.min_side, 1e-300));
  for (const Body& b : s.bodies) {
    const double sp = norm(b.vel);
    if (sp < 1e-12 * speed_char) continue;  // effectively at rest: radial by default
    const double misalign = std::abs(cross(b.vel, b.pos)) / (sp * norm(b.pos));
    if (misalign > tol) {
      throw std::invalid_argument("bounce_continue(): velocities are not radial");
    }
    if (dot(b.vel, b.pos) > tol * sp * norm(b.pos)) {
      throw std::invalid_argument("bounce_continue(): bodies are not falling inward");
    }
  }

  // The closest pair falls like a straight-line two-body problem whose
  // gravitational parameter follows from the common acceleration ratio.
  const int k = geo.min_side_pair;
  const Vec2 rel = s.bodies[kPairs[k][1]].pos - s.bodies[kPairs[k][0]].pos;
  const Vec2 relv = s.bodies[kPairs[k][1]].vel - s.bodies[kPairs[k][0]].vel;
  const double d = geo.min_side;
  const double d_rate = dot(rel, relv) / d;
  const double mu_d = cert.lambda * d * d * d;
  // q = v^2 d / (2 mu) reaches 1 at a parabolic approach; deep in a bound
  // fall it tends to 1 from below while 2/d - v^2/mu loses all its digits
  // to cancellation, so the remainder switches to the parabolic limit.
  const double q = d_rate * d_rate * d / (2.0 * mu_d);
  const double inv_a = 2.0 / d - d_rate * d_rate / mu_d;
  double dt_remaining = 0.0;
  if (std::abs(q - 1.0) < 0.01) {
    if (d_rate >= 0.0) {
      throw std::invalid_argument("bounce_continue(): pair is not approaching");
    }
    dt_remaining = (2.0 / 3.0) * d * std::sqrt(d / (2.0 * mu_d));
  } else if (inv_a > 0.0) {
    const double a = 1.0 / inv_a;
    const double n = std::sqrt(a * a * a / mu_d);
    const double cos_u = std::clamp(d / a - 1.0, -1.0, 1.0);
    const double u = std::acos(cos_u);
    dt_remaining = n * (kPi - u - std::sin(u));
  } else {
    throw std::invalid_argument("bounce_continue(): fall is not bound");
  }

  CollapsePivot out;
  out.collapse_time = near_collapse.t + dt_remaining;
  out.mirrored = near_collapse;
  out.mirrored.t = out.collapse_time + dt_remaining;
  for (Body& b : out.mirrored.bodies) b.vel = -b.vel;
  return out;
}

}  // namespace freefall
