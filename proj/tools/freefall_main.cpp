#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freefall/central.hpp"
#include "freefall/config.hpp"
#include "freefall/integrator.hpp"
#include "freefall/isosceles.hpp"
#include "freefall/output.hpp"
#include "freefall/scenarios.hpp"
#include "freefall/split.hpp"
#include "freefall/state.hpp"

namespace {

using namespace freefall;

std::map<std::string, double> parse_params(const std::vector<std::string>& kv_list) {
  std::map<std::string, double> params;
  for (const std::string& kv : kv_list) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--param", "expected key=value, got: " + kv);
    }
    params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return params;
}

struct ScenarioArgs {
  std::string name;
  std::vector<std::string> params;
  std::string config_path;

  PlanarState build() const {
    std::map<std::string, double> params_map;
    std::string scenario = name;
    if (!config_path.empty()) {
      const config::Map file = config::parse_file(config_path);
      scenario = config::get_string(file, "scenario", scenario);
      for (const auto& [key, value] : file) {
        if (key == "scenario") continue;
        try {
          params_map[key] = std::stod(value);
        } catch (const std::exception&) {
          // non-numeric config keys (e.g. output hints) are ignored here
        }
      }
    }
    for (const auto& [key, value] : parse_params(params)) params_map[key] = value;
    if (scenario.empty()) {
      throw CLI::ValidationError("--scenario", "no scenario given (flag or config file)");
    }
    return scenarios::by_name(scenario, params_map);
  }

  std::string resolved_name() const {
    if (!config_path.empty()) {
      const config::Map file = config::parse_file(config_path);
      return config::get_string(file, "scenario", name);
    }
    return name;
  }
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--scenario", args.name, "scenario name (see `list`)");
  cmd->add_option("--param", args.params, "scenario parameter override key=value")
      ->take_all();
  cmd->add_option("--config", args.config_path,
                  "key=value config file (scenario + parameters)");
}

int run_simulation_command(const ScenarioArgs& scenario_args, double t_end, double tol,
                           const std::string& out_dir, const std::string& formats,
                           bool bounce, double sample_interval, bool quiet) {
  const PlanarState init = scenario_args.build();
  IntegratorSettings settings;
  settings.t_end = t_end;
  settings.rel_tol = tol;
  settings.bounce_at_collapse = bounce;
  settings.sample_interval = sample_interval;
  const Trajectory traj = integrate(init, settings);
  const split::OutcomeReport report = split::classify_outcome(traj);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string base =
        (std::filesystem::path(out_dir) / scenario_args.resolved_name()).string();
    std::stringstream fmt_stream(formats);
    std::string fmt;
    while (std::getline(fmt_stream, fmt, ',')) {
      if (fmt == "csv") {
        std::ofstream os(base + ".csv");
        output::write_csv(os, traj);
      } else if (fmt == "json") {
        std::ofstream os(base + ".json");
        output::write_json(os, traj, report);
      } else if (fmt == "svg") {
        std::ofstream os(base + ".svg");
        output::write_svg(os, traj);
      } else if (!fmt.empty()) {
        throw CLI::ValidationError("--format", "unknown format: " + fmt);
      }
    }
  }

  if (!quiet) {
    std::cout << "scenario          " << scenario_args.resolved_name() << '\n'
              << "stop              " << to_string(traj.stop) << '\n'
              << "t_final           " << traj.final_state().t << '\n'
              << "accepted_steps    " << traj.accepted_steps << '\n'
              << "events            " << traj.events.size() << '\n'
              << "energy_drift      " << traj.max_energy_drift << '\n'
              << "ang_mom_drift     " << traj.max_angular_momentum_drift << '\n'
              << "min_separation    " << traj.min_pair_separation << '\n'
              << "outcome           " << to_string(report.outcome) << '\n';
    if (report.outcome == split::Outcome::EllipticHyperbolic) {
      std::cout << "escaper           " << report.escaper << '\n'
                << "split_time        " << report.split_time << '\n'
                << "outer_ecc         " << report.outer_eccentricity << '\n';
    }
    for (const std::string& w : traj.warnings) std::cout << "warning: " << w << '\n';
  }
  return 0;
}

int run_cc_command(const std::array<double, 3>& masses, double side, double sep, double g,
                   const std::string& format) {
  if (format != "text" && format != "json") {
    throw CLI::ValidationError("--format", "expected text or json, got: " + format);
  }
  const PlanarState eq = central::equilateral_state(masses, side, g);
  const double t_eq = central::collapse_time_config(eq);
  const double n = central::euler_quintic_root(masses);
  const PlanarState col = central::collinear_state(masses, sep, g);
  const double t_col = central::collapse_time_config(col);
  const double mu_eq = central::mu_eq_collinear(masses, g);

  if (format == "json") {
    nlohmann::json j;
    j["masses"] = masses;
    j["g"] = g;
    j["equilateral"] = {{"side", side}, {"collapse_time", t_eq}};
    for (int i = 0; i < 3; ++i) {
      j["equilateral"]["mu_body"].push_back(central::mu_particle(masses, i, g));
      j["equilateral"]["com_distance"].push_back(
          triangle_geometry(eq).com_distance[i]);
    }
    j["collinear"] = {{"separation12", sep},
                      {"ratio", n},
                      {"quintic_residual", central::quintic_residual(masses, n)},
                      {"mu_eq", mu_eq},
                      {"collapse_time", t_col}};
    for (int i = 0; i < 3; ++i) {
      j["collinear"]["position"].push_back(col.bodies[i].pos.x);
    }
    std::cout << j.dump(2) << '\n';
    return 0;
  }

  std::cout << "masses " << masses[0] << ' ' << masses[1] << ' ' << masses[2] << "  g " << g
            << "\n\nequilateral (side " << side << ")\n"
            << "  collapse_time  " << t_eq << '\n';
  for (int i = 0; i < 3; ++i) {
    std::cout << "  body " << i << ": mu " << central::mu_particle(masses, i, g)
              << "  com_distance " << triangle_geometry(eq).com_distance[i] << '\n';
  }
  std::cout << "\ncollinear (order m1-m2-m3, separation12 " << sep << ")\n"
            << "  ratio n        " << n << '\n'
            << "  mu_eq          " << mu_eq << '\n'
            << "  collapse_time  " << t_col << '\n'
            << "  positions      " << col.bodies[0].pos.x << ' ' << col.bodies[1].pos.x << ' '
            << col.bodies[2].pos.x << '\n';
  return 0;
}

int run_random_checks(int count, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass_dist(0.1, 2.0);
  std::uniform_real_distribution<double> pos_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> vel_dist(-1.0, 1.0);

  double worst_energy = 0.0, worst_momentum = 0.0, worst_triangle = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    PlanarState s;
    s.g = 1.0;
    for (Body& b : s.bodies) {
      b.mass = mass_dist(rng);
      b.pos = {pos_dist(rng), pos_dist(rng)};
      b.vel = {vel_dist(rng), vel_dist(rng)};
    }
    s = recentered(s);
    const TriangleGeometry geo = triangle_geometry(s);
    if (geo.min_side < 0.1) {
      --trial;
      continue;
    }
    const ConservedSet c = conserved(s);
    for (int k = 0; k < 3; ++k) {
      const split::Decomposition dec = split::decompose(s, k);
      const double e_resid =
          std::abs(c.energy - (dec.inner.energy + dec.outer.energy + dec.coupling)) /
          std::abs(c.energy);
      const double h_scale = std::max(1.0, std::abs(c.angular_momentum));
      const double h_resid =
          std::abs(c.angular_momentum -
                   (dec.inner.angular_momentum + dec.outer.angular_momentum)) /
          h_scale;
      worst_energy = std::max(worst_energy, e_resid);
      worst_momentum = std::max(worst_momentum, h_resid);
    }
    const std::array<double, 3> masses = {s.bodies[0].mass, s.bodies[1].mass,
                                          s.bodies[2].mass};
    const std::array<double, 3> side_sq = {geo.side[0] * geo.side[0],
                                           geo.side[1] * geo.side[1],
                                           geo.side[2] * geo.side[2]};
    const auto com_sq = com_distance_sq_from_sides(masses, side_sq);
    for (int i = 0; i < 3; ++i) {
      const double direct = geo.com_distance[i] * geo.com_distance[i];
      worst_triangle = std::max(
          worst_triangle, std::abs(direct - com_sq[i]) / std::max(direct, 1e-30));
    }
  }
  std::cout << "states checked              " << count << '\n'
            << "max energy-split residual   " << worst_energy << '\n'
            << "max momentum-split residual " << worst_momentum << '\n'
            << "max triangle-map residual   " << worst_triangle << '\n';
  const bool ok = worst_energy < 1e-12 && worst_momentum < 1e-12 && worst_triangle < 1e-9;
  std::cout << (ok ? "all identities hold\n" : "IDENTITY VIOLATION\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar three-body free-fall laboratory"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- list
  auto* list_cmd = app.add_subcommand("list", "list available scenarios");

  // ------------------------------------------------------------------ cc
  auto* cc_cmd = app.add_subcommand("cc", "central configurations for three masses");
  std::array<double, 3> cc_masses = {1.0, 1.0, 1.0};
  double cc_side = 1.0, cc_sep = 1.0, cc_g = 1.0;
  std::string cc_format = "text";
  cc_cmd->add_option("--m1", cc_masses[0], "mass 1");
  cc_cmd->add_option("--m2", cc_masses[1], "mass 2 (middle of the collinear order)");
  cc_cmd->add_option("--m3", cc_masses[2], "mass 3");
  cc_cmd->add_option("--side", cc_side, "equilateral side length");
  cc_cmd->add_option("--sep", cc_sep, "collinear 1-2 separation");
  cc_cmd->add_option("--g", cc_g, "gravitational constant");
  cc_cmd->add_option("--format", cc_format, "text or json");

  // ------------------------------------------------------------ simulate
  auto* sim_cmd = app.add_subcommand("simulate", "integrate a scenario and write outputs");
  ScenarioArgs sim_scenario;
  double sim_t_end = 10.0, sim_tol = 1e-12, sim_sample = 0.0;
  std::string sim_out_dir, sim_formats = "csv,json";
  bool sim_bounce = false, sim_quiet = false;
  add_scenario_options(sim_cmd, sim_scenario);
  sim_cmd->add_option("--t-end", sim_t_end, "integration end time");
  sim_cmd->add_option("--tol", sim_tol, "relative tolerance");
  sim_cmd->add_option("--out-dir", sim_out_dir, "directory for output files");
  sim_cmd->add_option("--format", sim_formats, "comma list of csv,json,svg");
  sim_cmd->add_option("--sample-interval", sim_sample, "time between recorded samples");
  sim_cmd->add_flag("--bounce", sim_bounce, "mirror through certified central collapse");
  sim_cmd->add_flag("--quiet", sim_quiet, "suppress the summary");

  // ------------------------------------------------------------ tc-search
  auto* tc_cmd =
      app.add_subcommand("tc-search", "shooting searches for total-collapse solutions");
  std::string tc_mode = "angle";
  int tc_collisions = 1;
  double tc_lo = 0.0, tc_hi = 0.0, tc_tol = 1e-4;
  double tc_alpha = 90.0, tc_height = 1.0, tc_mass = 1.0 / 3.0, tc_g = 1.0;
  double tc_rel_tol = 1e-12;
  tc_cmd->add_option("--mode", tc_mode, "angle (free fall) or velocity (fixed angle)");
  tc_cmd->add_option("--collisions", tc_collisions,
                     "pair collisions before the collapse (angle mode)");
  tc_cmd->add_option("--lo", tc_lo, "bracket low end")->required();
  tc_cmd->add_option("--hi", tc_hi, "bracket high end")->required();
  tc_cmd->add_option("--tol", tc_tol, "bracket width to stop at");
  tc_cmd->add_option("--alpha", tc_alpha, "apex angle in degrees (velocity mode)");
  tc_cmd->add_option("--height", tc_height, "apex height");
  tc_cmd->add_option("--mass", tc_mass, "mass of each body");
  tc_cmd->add_option("--g", tc_g, "gravitational constant");
  tc_cmd->add_option("--rel-tol", tc_rel_tol, "integration tolerance");

  // --------------------------------------------------------------- sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario across a parameter range");
  ScenarioArgs sweep_scenario;
  std::string sweep_param = "alpha";
  double sweep_from = 0.0, sweep_to = 1.0, sweep_t_end = 20.0, sweep_tol = 1e-11;
  int sweep_steps = 10;
  std::string sweep_out;
  add_scenario_options(sweep_cmd, sweep_scenario);
  sweep_cmd->add_option("--param-name", sweep_param, "parameter to vary")->required();
  sweep_cmd->add_option("--from", sweep_from, "range start")->required();
  sweep_cmd->add_option("--to", sweep_to, "range end")->required();
  sweep_cmd->add_option("--steps", sweep_steps, "number of values");
  sweep_cmd->add_option("--t-end", sweep_t_end, "integration end time");
  sweep_cmd->add_option("--tol", sweep_tol, "relative tolerance");
  sweep_cmd->add_option("--out", sweep_out, "CSV output path (default stdout)");

  // ------------------------------------------------------------- analyze
  auto* an_cmd = app.add_subcommand(
      "analyze", "classify a trajectory CSV or a fresh run, or exercise the exact identities");
  ScenarioArgs an_scenario;
  double an_t_end = 10.0, an_tol = 1e-12;
  int an_random = 0;
  unsigned long long an_seed = 12345;
  std::string an_format = "text", an_csv;
  std::array<double, 3> an_masses = {1.0, 1.0, 1.0};
  double an_g = 1.0;
  add_scenario_options(an_cmd, an_scenario);
  auto* an_csv_opt =
      an_cmd->add_option("--csv", an_csv, "existing trajectory CSV to classify");
  an_cmd->add_option("--m1", an_masses[0], "mass of body 1 (with --csv)")->needs(an_csv_opt);
  an_cmd->add_option("--m2", an_masses[1], "mass of body 2 (with --csv)")->needs(an_csv_opt);
  an_cmd->add_option("--m3", an_masses[2], "mass of body 3 (with --csv)")->needs(an_csv_opt);
  an_cmd->add_option("--g", an_g, "gravitational constant (with --csv)")->needs(an_csv_opt);
  an_cmd->add_option("--t-end", an_t_end, "integration end time");
  an_cmd->add_option("--tol", an_tol, "relative tolerance");
  an_cmd->add_option("--random-checks", an_random,
                     "instead: verify exact identities on N random states");
  an_cmd->add_option("--seed", an_seed, "random generator seed");
  an_cmd->add_option("--format", an_format, "text or json");

  // ---------------------------------------------------------------- plot
  auto* plot_cmd =
      app.add_subcommand("plot", "render a trajectory CSV (or a fresh run) as SVG");
  ScenarioArgs plot_scenario;
  double plot_t_end = 10.0, plot_tol = 1e-12;
  std::string plot_out = "orbit.svg", plot_csv;
  add_scenario_options(plot_cmd, plot_scenario);
  plot_cmd->add_option("--csv", plot_csv, "existing trajectory CSV to render");
  plot_cmd->add_option("--t-end", plot_t_end, "integration end time");
  plot_cmd->add_option("--tol", plot_tol, "relative tolerance");
  plot_cmd->add_option("--out", plot_out, "output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list_cmd->parsed()) {
      for (const auto& info : scenarios::catalogue()) {
        std::cout << info.name << "  -  " << info.summary << '\n';
      }
      return 0;
    }
    if (cc_cmd->parsed()) {
      return run_cc_command(cc_masses, cc_side, cc_sep, cc_g, cc_format);
    }
    if (sim_cmd->parsed()) {
      return run_simulation_command(sim_scenario, sim_t_end, sim_tol, sim_out_dir,
                                    sim_formats, sim_bounce, sim_sample, sim_quiet);
    }
    if (tc_cmd->parsed()) {
      if (tc_mode == "angle") {
        const double alpha = isosceles::tc_angle_search(
            tc_collisions, {tc_lo, tc_hi}, tc_tol, tc_mass, tc_g, tc_height, tc_rel_tol);
        std::cout << "collapse angle: " << alpha << " deg\n";
      } else if (tc_mode == "velocity") {
        const auto result = isosceles::family_velocity_for_tc(
            tc_alpha, tc_height, {tc_lo, tc_hi}, tc_tol, tc_mass, tc_g, tc_rel_tol);
        std::cout << "base velocity: " << result.base_velocity << '\n'
                  << "collapse time: " << result.collapse_time << '\n';
      } else {
        throw CLI::ValidationError("--mode", "expected angle or velocity");
      }
      return 0;
    }
    if (sweep_cmd->parsed()) {
      std::ofstream file;
      std::ostream* os = &std::cout;
      if (!sweep_out.empty()) {
        file.open(sweep_out);
        os = &file;
      }
      const auto run_point = [&](int i) {
        const double value =
            sweep_steps == 1
                ? sweep_from
                : sweep_from + (sweep_to - sweep_from) * i / (sweep_steps - 1.0);
        ScenarioArgs point = sweep_scenario;
        point.params.push_back(sweep_param + "=" + std::to_string(value));
        IntegratorSettings settings;
        settings.t_end = sweep_t_end;
        settings.rel_tol = sweep_tol;
        const Trajectory traj = integrate(point.build(), settings);
        const split::OutcomeReport report = split::classify_outcome(traj);
        std::ostringstream row;
        row << value << ',' << to_string(traj.stop) << ',' << to_string(report.outcome)
            << ',' << report.escaper << ',' << report.split_time << ','
            << traj.min_pair_separation << ',' << traj.max_energy_drift << '\n';
        return row.str();
      };
      // Independent runs distributed across a bounded pool of workers;
      // rows are merged back in parameter order, so the output is
      // deterministic regardless of scheduling.
      const int workers = std::max(1u, std::thread::hardware_concurrency());
      *os << "value,stop,outcome,escaper,split_time,min_separation,energy_drift\n";
      for (int wave = 0; wave < sweep_steps; wave += workers) {
        std::vector<std::future<std::string>> rows;
        for (int i = wave; i < std::min(wave + workers, sweep_steps); ++i) {
          rows.push_back(std::async(std::launch::async, run_point, i));
        }
        for (auto& row : rows) *os << row.get();
      }
      return 0;
    }
    if (an_cmd->parsed()) {
      if (an_format != "text" && an_format != "json") {
        throw CLI::ValidationError("--format", "expected text or json, got: " + an_format);
      }
      if (an_random > 0) return run_random_checks(an_random, an_seed);
      Trajectory traj;
      if (!an_csv.empty()) {
        std::ifstream in(an_csv);
        if (!in) throw std::runtime_error("cannot open trajectory csv: " + an_csv);
        traj = output::read_csv(in, an_masses, an_g);
      } else {
        IntegratorSettings settings;
        settings.t_end = an_t_end;
        settings.rel_tol = an_tol;
        traj = integrate(an_scenario.build(), settings);
      }
      const split::OutcomeReport report = split::classify_outcome(traj);
      if (an_format == "json") {
        output::write_json(std::cout, traj, report);
      } else {
        std::cout << "outcome        " << to_string(report.outcome) << '\n'
                  << "stop           " << to_string(traj.stop) << '\n'
                  << "escaper        " << report.escaper << '\n'
                  << "split_time     " << report.split_time << '\n'
                  << "outer_ecc      " << report.outer_eccentricity << '\n'
                  << "pair_binding   " << report.pair_binding_energy << '\n'
                  << "outer_distance " << report.final_outer_distance << '\n'
                  << "energy_drift   " << traj.max_energy_drift << '\n'
                  << "events         " << traj.events.size() << '\n';
      }
      return 0;
    }
    if (plot_cmd->parsed()) {
      Trajectory traj;
      if (!plot_csv.empty()) {
        std::ifstream in(plot_csv);
        if (!in) throw std::runtime_error("cannot open trajectory csv: " + plot_csv);
        traj = output::read_csv(in, {1.0, 1.0, 1.0});  // masses do not affect the drawing
      } else {
        IntegratorSettings settings;
        settings.t_end = plot_t_end;
        settings.rel_tol = plot_tol;
        traj = integrate(plot_scenario.build(), settings);
      }
      std::ofstream os(plot_out);
      output::write_svg(os, traj);
      std::cout << "wrote " << plot_out << '\n';
      return 0;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
