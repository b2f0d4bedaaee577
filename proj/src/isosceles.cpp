#include "freefall/isosceles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "freefall/ode.hpp"

namespace freefall::isosceles {

namespace {

constexpr double kPi = std::numbers::pi;

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

/// Gauss-Legendre nodes/weights on [0, 1].
const std::vector<std::pair<double, double>>& quadrature_rule() {
  static const std::vector<std::pair<double, double>> rule = [] {
    constexpr int n = 48;
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double deriv = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
        }
        deriv = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / deriv;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
      pts[i] = {x, w};
      pts[n - 1 - i] = {-x, w};
    }
    for (auto& [node, weight] : pts) {  // map [-1,1] -> [0,1]
      node = 0.5 * (node + 1.0);
      weight *= 0.5;
    }
    return pts;
  }();
  return rule;
}

}  // namespace

Accel reduced_acceleration(double x, double y, double m, double g) {
  const double mu = g * m;
  const double rho2 = x * x + y * y;
  const double rho = std::sqrt(rho2);
  const double inv_rho3 = 1.0 / (rho2 * rho);
  Accel a;
  a.ax = -3.0 * mu * x * inv_rho3;
  a.ay = -mu / (4.0 * y * y) - mu * y * inv_rho3;
  return a;
}

double reduced_energy(const State& s, double m, double g) {
  const double mu = g * m;
  const double rho = std::hypot(s.x, s.y);
  return m * (s.vx * s.vx / 3.0 + s.vy * s.vy - mu / (2.0 * s.y) - 2.0 * mu / rho);
}

PlanarState embed(const State& s, double m, double g) {
  PlanarState p;
  p.t = s.t;
  p.g = g;
  for (Body& b : p.bodies) b.mass = m;
  p.bodies[0].pos = {2.0 * s.x / 3.0, 0.0};
  p.bodies[0].vel = {2.0 * s.vx / 3.0, 0.0};
  p.bodies[1].pos = {-s.x / 3.0, s.y};
  p.bodies[1].vel = {-s.vx / 3.0, s.vy};
  p.bodies[2].pos = {-s.x / 3.0, -s.y};
  p.bodies[2].vel = {-s.vx / 3.0, -s.vy};
  return p;
}

State extract(const PlanarState& input, double tol) {
  const PlanarState p = recentered(input);
  const double scale = triangle_geometry(p).perimeter + 1e-300;
  const double mass_scale = total_mass(p);
  const auto close = [&](double a, double b, double s) { return std::abs(a - b) <= tol * s; };
  const Body& apex = p.bodies[0];
  const Body& b1 = p.bodies[1];
  const Body& b2 = p.bodies[2];
  const bool symmetric =
      close(b1.mass, b2.mass, mass_scale) && close(apex.mass, b1.mass, mass_scale) &&
      close(apex.pos.y, 0.0, scale) && close(apex.vel.y, 0.0, scale) &&
      close(b1.pos.x, b2.pos.x, scale) && close(b1.pos.y, -b2.pos.y, scale) &&
      close(b1.vel.x, b2.vel.x, scale) && close(b1.vel.y, -b2.vel.y, scale);
  if (!symmetric) {
    throw std::invalid_argument("extract(): state lacks the mirror symmetry");
  }
  if (!(std::abs(b1.pos.y) > 0.0)) {
    throw std::invalid_argument("extract(): base pair is coincident");
  }
  State s;
  s.t = p.t;
  s.x = 1.5 * apex.pos.x;
  s.vx = 1.5 * apex.vel.x;
  s.y = std::abs(b1.pos.y);
  s.vy = b1.pos.y >= 0.0 ? b1.vel.y : -b1.vel.y;
  return s;
}

State free_fall_state(double alpha_deg, double height) {
  if (height <= 0.0) throw std::invalid_argument("free_fall_state(): height must be positive");
  State s;
  s.x = height;
  s.y = height * std::tan(0.5 * alpha_deg * kPi / 180.0);
  if (s.y <= 0.0) throw std::invalid_argument("free_fall_state(): angle must be in (0, 180)");
  return s;
}

ShapeCoords shape_coords(const State& s) {
  ShapeCoords sc;
  const double q = s.x * s.x / 3.0 + s.y * s.y;
  const double root = std::sqrt(q);
  sc.size = std::sqrt(2.0 / 3.0) * root;
  sc.size_rate = std::sqrt(2.0 / 3.0) * (s.x * s.vx / 3.0 + s.y * s.vy) / root;
  sc.angle = std::atan2(s.x, std::sqrt(3.0) * s.y);
  sc.angle_rate = std::sqrt(3.0) * (s.y * s.vx - s.x * s.vy) / (s.x * s.x + 3.0 * s.y * s.y);
  return sc;
}

double shape_potential_factor(double angle) {
  const double sa = std::sin(angle);
  return 1.0 / std::cos(angle) + 4.0 / std::sqrt(1.0 + 2.0 * sa * sa);
}

double potential_from_shape(double size, double angle, double m, double g) {
  return -g * m * m * shape_potential_factor(angle) / (std::sqrt(6.0) * size);
}

double kinetic_from_shape(const ShapeCoords& sc, double m) {
  return 1.5 * m * (sc.size_rate * sc.size_rate +
                    sc.size * sc.size * sc.angle_rate * sc.angle_rate);
}

SingularityReport classify_singularity(const State& s, double m, double g,
                                       double length_scale) {
  SingularityReport report;
  const double size = shape_coords(s).size;
  if (size < 1e-6 * length_scale) {
    report.kind = SingularityKind::TripleCollision;
    return report;
  }
  if (s.y < 1e-6 * length_scale && std::abs(s.x) > 1e-3 * length_scale) {
    report.kind = SingularityKind::BinaryCollision;
    report.apex_energy = m * (s.vx * s.vx / 3.0 - 2.0 * g * m / std::abs(s.x));
  }
  return report;
}

namespace {

using Y = ode::StateVec<5>;
// Layout: {t, x, y, vx, vy}

struct Model {
  double m = 1.0;
  double g = 1.0;
  double s_ref = 1.0;
};

struct Rhs {
  const Model* mod;
  void operator()(double /*u*/, const Y& y, Y& dy) const {
    const double rho = std::hypot(y[1], y[2]);
    const double r_min = std::min(2.0 * y[2], rho);
    const double factor = mod->s_ref * r_min;
    const Accel a = reduced_acceleration(y[1], y[2], mod->m, mod->g);
    dy[0] = factor;
    dy[1] = factor * y[3];
    dy[2] = factor * y[4];
    dy[3] = factor * a.ax;
    dy[4] = factor * a.ay;
  }
};

State to_state(const Y& y) { return {y[0], y[1], y[2], y[3], y[4]}; }

Y from_state(const State& s) { return {s.t, s.x, s.y, s.vx, s.vy}; }

struct PatchOutcome {
  State after;
  double t_mid = 0.0;
  double x_mid = 0.0;
};

/// Step the base pair analytically through its collision: fall from the
/// window height to zero and back (time by quadrature of the exact
/// one-dimensional energy law), elastic reflection in vy, apex advanced
/// ballistically under its axial attraction toward the coalesced pair.
PatchOutcome collision_patch(const State& w, double m, double g) {
  const double mu = g * m;
  const double mu_y = 0.25 * mu;
  const double vy_in_sq = w.vy * w.vy;
  const double y_w = w.y;

  double t_fall = 0.0;
  for (const auto& [tau, weight] : quadrature_rule()) {
    const double speed_sq = vy_in_sq + 2.0 * mu_y * (1.0 - tau * tau) / (y_w * tau * tau);
    t_fall += weight * 2.0 * y_w * tau / std::sqrt(speed_sq);
  }

  const double ax = (w.x != 0.0) ? -3.0 * mu * sign_of(w.x) / (w.x * w.x) : 0.0;
  PatchOutcome out;
  out.t_mid = w.t + t_fall;
  out.x_mid = w.x + w.vx * t_fall + 0.5 * ax * t_fall * t_fall;

  const double dt = 2.0 * t_fall;
  out.after = w;
  out.after.t = w.t + dt;
  out.after.x = w.x + w.vx * dt + 0.5 * ax * dt * dt;
  out.after.vx = w.vx + ax * dt;
  out.after.y = y_w;
  out.after.vy = std::abs(w.vy);
  return out;
}

constexpr int kNumFns = 5;
// 0: y - collision window (patch)
// 1: x (all three bodies on one line)
// 2: vx (apex momentarily at rest)
// 3: size - collapse radius (terminal)
// 4: t - t_end (terminal)

struct EvalCtx {
  double window_fraction = 0.0;
  double window_floor = 0.0;
  double tc_radius = 0.0;
  double t_end = 0.0;
};

std::array<double, kNumFns> eval_all(const State& s, const EvalCtx& ctx) {
  std::array<double, kNumFns> g{};
  g[0] = s.y - std::max(ctx.window_fraction * std::abs(s.x), ctx.window_floor);
  g[1] = s.x;
  g[2] = s.vx;
  g[3] = shape_coords(s).size - ctx.tc_radius;
  g[4] = s.t - ctx.t_end;
  return g;
}

}  // namespace

Run integrate(const State& init, double m, double g, const Settings& settings) {
  if (init.y <= 0.0) throw std::invalid_argument("integrate(): y must start positive");
  if (!(settings.t_end > init.t)) {
    throw std::invalid_argument("integrate(): t_end must exceed the initial time");
  }

  Model mod;
  mod.m = m;
  mod.g = g;
  const double rho0 = std::hypot(init.x, init.y);
  mod.s_ref = std::min(2.0 * init.y, rho0);

  const double size0 = shape_coords(init).size;
  EvalCtx ctx;
  ctx.window_fraction = settings.window_fraction;
  ctx.window_floor =
      settings.window_floor > 0.0 ? settings.window_floor : 1e-13 * size0;
  ctx.tc_radius = settings.tc_radius > 0.0 ? settings.tc_radius : 1e-9 * size0;
  ctx.t_end = settings.t_end;

  const double speed_scale = std::sqrt(g * 3.0 * m / size0);
  const double time_scale = size0 / speed_scale;

  Rhs rhs{&mod};
  ode::StepControl<5> ctrl;
  ctrl.rel_tol = settings.rel_tol;
  ctrl.abs_tol[0] = settings.rel_tol * time_scale;
  ctrl.abs_tol[1] = ctrl.abs_tol[2] = settings.rel_tol * size0 * 1e-2;
  ctrl.abs_tol[3] = ctrl.abs_tol[4] = settings.rel_tol * speed_scale * 1e-2;
  ctrl.max_steps = settings.max_steps;
  ctrl.initial_step = time_scale / (1000.0 * mod.s_ref * mod.s_ref);

  Run run;
  run.samples.push_back(init);
  run.initial_energy = reduced_energy(init, m, g);

  const auto advance = [&](const Y& y, double ua, double ub) -> Y {
    if (ub == ua) return y;
    return ode::integrate_to<5>(rhs, y, ua, ub, ctrl).y;
  };
  const auto locate = [&](int fn, double ua, Y ya, double ga, double ub, Y yb,
                          double gb) -> std::pair<double, Y> {
    for (int it = 0; it < 80; ++it) {
      if (std::abs(yb[0] - ya[0]) <= 1e-13 * std::max(time_scale, std::abs(yb[0]))) break;
      double um = 0.5 * (ua + ub);
      if (gb != ga) {
        const double secant = ub - gb * (ub - ua) / (gb - ga);
        const double margin = 0.05 * (ub - ua);
        if (secant > ua + margin && secant < ub - margin) um = secant;
      }
      Y ym = advance(ya, ua, um);
      const double gm = eval_all(to_state(ym), ctx)[fn];
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

  State cur = init;
  bool done = false;
  int passages = 0;

  while (!done) {
    Y y = from_state(cur);
    std::array<double, kNumFns> g_prev = eval_all(cur, ctx);
    std::array<bool, kNumFns> armed{};
    const std::array<double, kNumFns> arm_eps = {
        0.0, 1e-12 * size0, 1e-12 * speed_scale, 0.0, 0.0};
    for (int f = 0; f < kNumFns; ++f) armed[f] = std::abs(g_prev[f]) > arm_eps[f];

    bool restart = false;
    const auto on_step = [&](double u0, const Y& y0, double u1, const Y& y1) -> ode::StepFlow {
      const State s1 = to_state(y1);
      const auto g_new = eval_all(s1, ctx);

      struct Root {
        double u;
        Y y;
        int fn;
      };
      std::vector<Root> roots;
      for (int f = 0; f < kNumFns; ++f) {
        if (!armed[f]) {
          if (std::abs(g_new[f]) > arm_eps[f]) armed[f] = true;
          continue;
        }
        if (g_prev[f] == 0.0) continue;
        const bool crossed_down = g_prev[f] > 0.0 && g_new[f] <= 0.0;
        const bool crossed_up = g_prev[f] < 0.0 && g_new[f] >= 0.0;
        bool take = false;
        if (f == 0 || f == 3) take = crossed_down;        // window / collapse
        else if (f == 4) take = crossed_up;               // t_end
        else take = crossed_down || crossed_up;           // line / apex rest
        if (!take) continue;
        auto [ur, yr] = locate(f, u0, y0, g_prev[f], u1, y1, g_new[f]);
        roots.push_back({ur, std::move(yr), f});
      }
      std::sort(roots.begin(), roots.end(),
                [](const Root& a, const Root& b) { return a.u < b.u; });

      for (const Root& root : roots) {
        const State sr = to_state(root.y);
        switch (root.fn) {
          case 1:
            run.events.push_back({sr.t, EventKind::CollinearConfiguration, 0, sr.vx});
            continue;
          case 2:
            run.events.push_back({sr.t, EventKind::BodyAtRest, 0, sr.x});
            continue;
          case 4:
            run.samples.push_back(sr);
            run.stop = StopReason::ReachedEnd;
            return ode::StepFlow::Stop;
          case 3: {
            // Total collapse: freeze here and estimate the true collapse
            // instant from the asymptotic contraction of the triangle.
            const double side = std::sqrt(3.0) * shape_coords(sr).size;
            const double dt_rem =
                std::sqrt(side * side * side / (4.5 * g * 3.0 * m));
            run.samples.push_back(sr);
            run.collapse_time = sr.t + dt_rem;
            run.events.push_back(
                {*run.collapse_time, EventKind::TripleCollision, -1, shape_coords(sr).size});
            run.arrivals.push_back({*run.collapse_time, sr.x, false});
            run.stop = StopReason::TripleCollision;
            return ode::StepFlow::Stop;
          }
          case 0: {
            const PatchOutcome patch = collision_patch(sr, m, g);
            run.samples.push_back(sr);
            run.samples.push_back(patch.after);
            run.events.push_back(
                {patch.t_mid, EventKind::BinaryCollision, 0, patch.x_mid});
            run.arrivals.push_back({patch.t_mid, patch.x_mid, true});
            ++passages;
            cur = patch.after;
            restart = true;
            if (passages >= settings.max_passages) {
              run.stop = StopReason::BinaryCollision;
              restart = false;
            }
            if (settings.stop_after_passages > 0 &&
                passages >= settings.stop_after_passages) {
              run.stop = StopReason::ReachedEnd;
              restart = false;
            }
            return ode::StepFlow::Stop;
          }
          default:
            continue;
        }
      }

      g_prev = g_new;
      run.max_energy_drift =
          std::max(run.max_energy_drift,
                   std::abs(reduced_energy(s1, m, g) - run.initial_energy));
      ++run.accepted_steps;
      if (settings.record_samples) run.samples.push_back(s1);
      return ode::StepFlow::Continue;
    };

    const auto result =
        ode::integrate<5>(rhs, y, 0.0, std::numeric_limits<double>::max(), ctrl, on_step);
    if (!result.stopped_by_callback) {
      throw ode::IntegrationError("isosceles integrate(): driver halted unexpectedly");
    }
    done = !restart;
  }

  return run;
}

namespace {

struct PassageProbe {
  double apex_x = 0.0;
  double t = 0.0;
  bool collapsed = false;
};

PassageProbe passage_functional(const State& init, double m, double g, int target_passage,
                                double rel_tol) {
  Settings st;
  const double size0 = shape_coords(init).size;
  const double t_char = std::sqrt(size0 * size0 * size0 / (g * 3.0 * m));
  st.t_end = init.t + 500.0 * t_char;
  st.rel_tol = rel_tol;
  st.record_samples = false;
  st.stop_after_passages = target_passage;
  const Run run = integrate(init, m, g, st);

  PassageProbe probe;
  if (run.stop == StopReason::TripleCollision) {
    probe.apex_x = run.final_state().x;
    probe.t = run.collapse_time.value_or(run.final_state().t);
    probe.collapsed = true;
    return probe;
  }
  if (static_cast<int>(run.arrivals.size()) < target_passage) {
    throw std::runtime_error("passage_functional(): run ended before the target passage");
  }
  probe.apex_x = run.arrivals[target_passage - 1].apex_x;
  probe.t = run.arrivals[target_passage - 1].t;
  return probe;
}

}  // namespace

double tc_angle_search(int collision_count, std::pair<double, double> bracket_deg,
                       double tol_deg, double m, double g, double height, double rel_tol) {
  const int target = collision_count + 1;
  const auto f = [&](double alpha) {
    return passage_functional(free_fall_state(alpha, height), m, g, target, rel_tol).apex_x;
  };
  double a = bracket_deg.first;
  double b = bracket_deg.second;
  double fa = f(a);
  double fb = f(b);
  if ((fa < 0.0) == (fb < 0.0)) {
    throw std::invalid_argument("tc_angle_search(): no sign change over the bracket");
  }
  while (b - a > tol_deg) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

FamilyVelocityResult family_velocity_for_tc(double alpha_deg, double height,
                                            std::pair<double, double> bracket_vy,
                                            double tol_vy, double m, double g,
                                            double rel_tol) {
  const auto probe_at = [&](double vy) {
    State s = free_fall_state(alpha_deg, height);
    s.vy = vy;
    return passage_functional(s, m, g, 1, rel_tol);
  };
  double a = bracket_vy.first;
  double b = bracket_vy.second;
  double fa = probe_at(a).apex_x;
  const double fb = probe_at(b).apex_x;
  if ((fa < 0.0) == (fb < 0.0)) {
    throw std::invalid_argument("family_velocity_for_tc(): no sign change over the bracket");
  }
  while (b - a > tol_vy) {
    const double mid = 0.5 * (a + b);
    const double fm = probe_at(mid).apex_x;
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  FamilyVelocityResult out;
  out.base_velocity = 0.5 * (a + b);
  out.collapse_time = probe_at(out.base_velocity).t;
  return out;
}

}  // namespace freefall::isosceles
