#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "telepassive/config.hpp"
#include "telepassive/csv.hpp"
#include "telepassive/freq.hpp"
#include "telepassive/numfmt.hpp"
#include "telepassive/sim.hpp"

namespace {

using namespace telepassive;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolated = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  int grid_points = 2000;
  double omega_min = 1e-3;
  std::optional<double> force_magnitude;
  std::string dump_path;
  std::string z_convention = "impedance";
  std::string coupling = "continuous";
};

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool with_grid, bool with_coupling) {
  cmd->add_option("--config", opts.config_path, "scenario config file (defaults apply if omitted)");
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  if (with_grid) {
    cmd->add_option("--grid-points", opts.grid_points, "frequency grid size")
        ->capture_default_str()
        ->check(CLI::Range(2, 100000000));
    cmd->add_option("--omega-min", opts.omega_min, "lowest sweep frequency, rad/s")
        ->capture_default_str();
  }
  cmd->add_option("--force-magnitude", opts.force_magnitude,
                  "override the exogenous operator force magnitude, N*m");
  cmd->add_option("--dump-config", opts.dump_path,
                  "write the effective scenario back out as a config file");
  if (with_coupling) {
    cmd->add_option("--z-convention", opts.z_convention, "robot convention for scattering")
        ->check(CLI::IsMember({"impedance", "reciprocal"}))
        ->capture_default_str();
    cmd->add_option("--coupling", opts.coupling, "controller response used for scattering")
        ->check(CLI::IsMember({"continuous", "discrete"}))
        ->capture_default_str();
  }
}

Scenario load_scenario(const CommonOptions& opts) {
  Scenario sc =
      opts.config_path.empty() ? default_scenario() : parse_config_file(opts.config_path);
  if (opts.force_magnitude) {
    for (auto& seg : sc.operator_termination.force_segments) seg.magnitude = *opts.force_magnitude;
  }
  ensure_valid(sc);
  if (!opts.dump_path.empty()) {
    std::ofstream out(opts.dump_path);
    if (!out) throw ConfigError("cannot write config dump: " + opts.dump_path);
    out << dump_config(sc);
  }
  return sc;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void print_scenario_header(const Scenario& sc) {
  std::istringstream dump(dump_config(sc));
  std::string line;
  std::cout << "# effective scenario\n";
  while (std::getline(dump, line)) std::cout << "#   " << line << "\n";
}

ZConvention convention_of(const CommonOptions& opts) {
  return opts.z_convention == "impedance" ? ZConvention::impedance : ZConvention::reciprocal;
}

CouplingFunctions coupling_of(const CommonOptions& opts, const Scenario& sc) {
  if (opts.coupling == "continuous") return continuous_coupling(sc.law);
  auto [cm, cs] = controller_pair(sc.law, sc.sampling.alpha, sc.sampling.period);
  return discrete_coupling(std::move(cm), std::move(cs));
}

void print_report(const PassivityReport& report) {
  const char* side = report.side == Side::master ? "master" : "slave";
  std::cout << side << ": sweep sup = " << format_double(report.sweep_sup) << " at omega = "
            << format_double(report.sweep_argmax_omega)
            << " rad/s, closed form = " << format_double(report.closed_form)
            << ", robot damping = " << format_double(report.robot_damping) << "\n";
  std::cout << side << ": margin (sweep) = "
            << format_double(report.robot_damping - report.sweep_sup)
            << ", margin (closed form) = "
            << format_double(report.robot_damping - report.closed_form) << "\n";
  std::cout << side << ": passive by sweep: " << (report.passive_by_sweep ? "yes" : "NO")
            << ", passive by closed form: " << (report.passive_by_closed_form ? "yes" : "NO")
            << ", discrepancy flag: " << (report.discrepancy_flag ? "RAISED" : "clear") << "\n";
}

int cmd_check(const CommonOptions& opts) {
  const Scenario sc = load_scenario(opts);
  const double T = sc.sampling.period;
  const auto grid = FrequencyGrid::default_for_period(T, opts.grid_points, opts.omega_min);

  print_scenario_header(sc);
  const auto master = passivity_margin_sweep(sc.law, Side::master, T, sc.sampling.alpha, grid,
                                             sc.master);
  const auto slave =
      passivity_margin_sweep(sc.law, Side::slave, T, sc.sampling.alpha, grid, sc.slave);
  print_report(master);
  print_report(slave);

  for (const auto& cond : check_gain_conditions(sc.law, sc.delay)) {
    std::cout << "gain condition [" << cond.name << "] " << cond.detail << ": lhs = "
              << format_double(cond.lhs) << ", rhs = " << format_double(cond.rhs) << " -> "
              << (cond.pass ? "pass" : "FAIL") << "\n";
  }

  if (sc.wall.stiffness > 0.0) {
    const double bound = virtual_wall_bound(sc.wall.stiffness, 0.0, T);
    std::cout << "virtual wall: required interface damping > " << format_double(bound)
              << " (slave damping = " << format_double(sc.slave.damping) << ")\n";
  }

  const bool passive = master.passive_by_sweep && slave.passive_by_sweep;
  std::cout << "verdict: " << (passive ? "passive on both sides" : "passivity bound violated")
            << "\n";
  return passive ? kExitOk : kExitViolated;
}

int cmd_sweep(const CommonOptions& opts) {
  const Scenario sc = load_scenario(opts);
  const double T = sc.sampling.period;
  const auto grid = FrequencyGrid::default_for_period(T, opts.grid_points, opts.omega_min);

  const auto master = passivity_margin_sweep(sc.law, Side::master, T, sc.sampling.alpha, grid,
                                             sc.master);
  const auto slave =
      passivity_margin_sweep(sc.law, Side::slave, T, sc.sampling.alpha, grid, sc.slave);

  const ScatteringSweepInputs inputs{sc.master, sc.slave, coupling_of(opts, sc),
                                     convention_of(opts)};
  const auto scatter = scattering_sweep(grid, inputs);

  const std::filesystem::path out(opts.out_dir);
  std::filesystem::create_directories(out);
  write_file(out / "rhs.csv", rhs_csv(master, slave));
  write_file(out / "sigma.csv", scatter_csv(scatter));

  std::cout << "master: sup = " << format_double(master.sweep_sup) << " at omega = "
            << format_double(master.sweep_argmax_omega)
            << ", passive: " << (master.passive_by_sweep ? "yes" : "no") << "\n";
  std::cout << "slave: sup = " << format_double(slave.sweep_sup) << " at omega = "
            << format_double(slave.sweep_argmax_omega)
            << ", passive: " << (slave.passive_by_sweep ? "yes" : "no") << "\n";
  std::cout << "scattering: max sigma = " << format_double(scatter.worst_sigma) << " at omega = "
            << format_double(scatter.worst_omega)
            << ", passive: " << (scatter.passive ? "yes" : "no") << "\n";
  std::cout << "wrote " << (out / "rhs.csv").string() << " and " << (out / "sigma.csv").string()
            << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonOptions& opts) {
  const Scenario sc = load_scenario(opts);

  SimulationTrace trace;
  try {
    trace = run_simulation(sc);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolated;
  }

  const std::filesystem::path out(opts.out_dir);
  std::filesystem::create_directories(out);
  write_file(out / "trace.csv", trace_csv(trace));
  write_file(out / "positions.csv", positions_csv(trace));
  write_file(out / "forces.csv", forces_csv(trace));

  const auto energy = energy_monitor(trace);
  const auto metrics = tracking_metrics(trace);
  std::cout << "samples: " << trace.samples.size() << ", period = " << format_double(trace.period)
            << " s\n";
  std::cout << "min cumulative energy = " << format_double(energy.min_energy)
            << " J, passive: " << (energy.is_passive ? "yes" : "no") << "\n";
  std::cout << "max |position error| = " << format_double(metrics.max_abs_position_error)
            << " rad, final = " << format_double(metrics.final_position_error) << " rad\n";
  std::cout << "max |force error| = " << format_double(metrics.max_abs_force_error) << " N*m\n";
  std::cout << "wrote " << (out / "trace.csv").string() << ", " << (out / "positions.csv").string()
            << ", " << (out / "forces.csv").string() << "\n";
  return kExitOk;
}

int cmd_scatter(const CommonOptions& opts) {
  const Scenario sc = load_scenario(opts);
  const auto grid = FrequencyGrid::default_for_period(sc.sampling.period, opts.grid_points,
                                                      opts.omega_min);
  const ScatteringSweepInputs inputs{sc.master, sc.slave, coupling_of(opts, sc),
                                     convention_of(opts)};
  const auto scatter = scattering_sweep(grid, inputs);

  const std::filesystem::path out(opts.out_dir);
  std::filesystem::create_directories(out);
  write_file(out / "scatter.csv", scatter_csv(scatter));

  std::cout << "max sigma = " << format_double(scatter.worst_sigma) << " at omega = "
            << format_double(scatter.worst_omega)
            << ", passive: " << (scatter.passive ? "yes" : "no") << "\n";
  std::cout << "wrote " << (out / "scatter.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sampled-data passivity analysis and simulation for bilateral teleoperation"};
  app.require_subcommand(1);

  CommonOptions check_opts, sweep_opts, sim_opts, scatter_opts;
  auto* check = app.add_subcommand("check", "passivity verdict per side with margins");
  add_common_options(check, check_opts, true, false);
  auto* sweep = app.add_subcommand("sweep", "export per-frequency condition and scattering CSVs");
  add_common_options(sweep, sweep_opts, true, true);
  auto* simulate = app.add_subcommand("simulate", "run the sampled-data loop, export the trace");
  add_common_options(simulate, sim_opts, false, false);
  auto* scatter = app.add_subcommand("scatter", "export the scattering sweep");
  add_common_options(scatter, scatter_opts, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (check->parsed()) return cmd_check(check_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (simulate->parsed()) return cmd_simulate(sim_opts);
    if (scatter->parsed()) return cmd_scatter(scatter_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
