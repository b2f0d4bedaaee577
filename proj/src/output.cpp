#include "freefall/output.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace freefall::output {

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (int i = 1; i <= 3; ++i) {
    os << ",x" << i << ",y" << i << ",vx" << i << ",vy" << i;
  }
  os << ",E,Hz,Jz,Eb_pair,Delta\n";
  os << std::setprecision(17);
  for (const PlanarState& s : traj.samples) {
    os << s.t;
    for (const Body& b : s.bodies) {
      os << ',' << b.pos.x << ',' << b.pos.y << ',' << b.vel.x << ',' << b.vel.y;
    }
    const ConservedSet c = conserved(s);
    const split::Decomposition dec = split::decompose(s, split::closest_pair(s));
    os << ',' << c.energy << ',' << c.angular_momentum << ',' << c.moment_of_inertia << ','
       << dec.pair_binding_energy << ',' << dec.coupling << '\n';
  }
}

Trajectory read_csv(std::istream& is, const std::array<double, 3>& masses, double g) {
  Trajectory traj;
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,", 0) != 0) {
    throw std::runtime_error("trajectory csv: missing header row");
  }
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 18> field{};
    std::size_t begin = 0;
    for (int i = 0; i < 18; ++i) {
      const std::size_t end = line.find(',', begin);
      if ((end == std::string::npos) != (i == 17)) {
        throw std::runtime_error("trajectory csv line " + std::to_string(line_no) +
                                 ": expected 18 fields");
      }
      try {
        field[i] = std::stod(line.substr(begin, end - begin));
      } catch (const std::exception&) {
        throw std::runtime_error("trajectory csv line " + std::to_string(line_no) +
                                 ": not a number: " + line.substr(begin, end - begin));
      }
      begin = end + 1;
    }
    PlanarState s;
    s.t = field[0];
    s.g = g;
    for (int i = 0; i < kBodyCount; ++i) {
      s.bodies[i].mass = masses[i];
      s.bodies[i].pos = {field[1 + 4 * i], field[2 + 4 * i]};
      s.bodies[i].vel = {field[3 + 4 * i], field[4 + 4 * i]};
    }
    if (traj.samples.empty()) {
      traj.initial_energy = field[13];
      traj.initial_angular_momentum = field[14];
      traj.min_pair_separation = std::numeric_limits<double>::infinity();
    }
    traj.min_pair_separation =
        std::min(traj.min_pair_separation, triangle_geometry(s).min_side);
    traj.samples.push_back(s);
  }
  traj.stop = StopReason::ReachedEnd;
  return traj;
}

void write_json(std::ostream& os, const Trajectory& traj,
                const split::OutcomeReport& report) {
  nlohmann::json j;
  j["stop"] = to_string(traj.stop);
  j["accepted_steps"] = traj.accepted_steps;
  j["bounce_count"] = traj.bounce_count;
  j["initial_energy"] = traj.initial_energy;
  j["initial_angular_momentum"] = traj.initial_angular_momentum;
  j["max_energy_drift"] = traj.max_energy_drift;
  j["max_angular_momentum_drift"] = traj.max_angular_momentum_drift;
  j["min_pair_separation"] = traj.min_pair_separation;
  j["t_final"] = traj.samples.empty() ? 0.0 : traj.final_state().t;
  j["warnings"] = traj.warnings;

  nlohmann::json events = nlohmann::json::array();
  for (const EventRecord& ev : traj.events) {
    events.push_back({{"t", ev.t},
                      {"kind", to_string(ev.kind)},
                      {"subject", ev.subject},
                      {"value", ev.value}});
  }
  j["events"] = events;

  j["outcome"] = {{"class", to_string(report.outcome)},
                  {"escaper", report.escaper},
                  {"split_time", report.split_time},
                  {"outer_eccentricity", report.outer_eccentricity},
                  {"outer_energy", report.outer_energy},
                  {"pair_binding_energy", report.pair_binding_energy},
                  {"final_outer_distance", report.final_outer_distance},
                  {"outer_receding", report.outer_receding}};
  os << j.dump(2) << '\n';
}

void write_svg(std::ostream& os, const Trajectory& traj, int size_px) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = hi_x;
  for (const PlanarState& s : traj.samples) {
    for (const Body& b : s.bodies) {
      lo_x = std::min(lo_x, b.pos.x);
      hi_x = std::max(hi_x, b.pos.x);
      lo_y = std::min(lo_y, b.pos.y);
      hi_y = std::max(hi_y, b.pos.y);
    }
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double pad = 0.05 * span;
  const double scale = size_px / (span + 2.0 * pad);
  const auto px = [&](double x) { return (x - lo_x + pad) * scale; };
  const auto py = [&](double y) { return size_px - (y - lo_y + pad) * scale; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
     << size_px << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  static const char* colors[3] = {"#c0392b", "#27ae60", "#2980b9"};
  os << std::setprecision(8);
  for (int i = 0; i < 3; ++i) {
    os << "  <polyline fill=\"none\" stroke=\"" << colors[i] << "\" stroke-width=\"1\" points=\"";
    for (const PlanarState& s : traj.samples) {
      os << px(s.bodies[i].pos.x) << ',' << py(s.bodies[i].pos.y) << ' ';
    }
    os << "\"/>\n";
  }
  // Event markers at the position of the subject body (nearest sample).
  for (const EventRecord& ev : traj.events) {
    const auto it = std::lower_bound(
        traj.samples.begin(), traj.samples.end(), ev.t,
        [](const PlanarState& s, double t) { return s.t < t; });
    if (it == traj.samples.end()) continue;
    const int subject = (ev.subject >= 0 && ev.subject < 3) ? ev.subject : 0;
    const Vec2 pos = it->bodies[subject].pos;
    os << "  <circle cx=\"" << px(pos.x) << "\" cy=\"" << py(pos.y)
       << "\" r=\"3\" fill=\"none\" stroke=\"#7f8c8d\" stroke-width=\"1\">\n"
       << "    <title>" << to_string(ev.kind) << " t=" << ev.t << "</title>\n"
       << "  </circle>\n";
  }
  os << "</svg>\n";
}

}  // namespace freefall::output
