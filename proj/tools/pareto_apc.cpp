// Command-line driver: scenario generation, front tracing, baselines and
// budget sweeps.
//
// Every option can also come from a flat "key = value" file passed with
// --config FILE (keys are the long option names); options given on the
// command line take precedence.
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure,
// 3 I/O error.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "papc/commands.hpp"
#include "papc/errors.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kSolver = 2, kIo = 3 };

struct ApcFlags {
  double r1 = 1.0;
  double r2 = 1.0;
  double b1 = 0.0;
  double b2 = 1.0;
  double beta = 0.0;
  std::optional<double> alpha;
  std::optional<double> m1;
  double kkt_tol = 1e-6;
  int max_iter = 10000;
  int max_points = 1000;
  bool no_prediction = false;

  void add_to(CLI::App* app) {
    app->add_option("--r1", r1, "Scalarization direction, first component")->capture_default_str();
    app->add_option("--r2", r2, "Scalarization direction, second component")->capture_default_str();
    app->add_option("--b1", b1, "Hyperplane normal, first component")->capture_default_str();
    app->add_option("--b2", b2, "Hyperplane normal, second component")->capture_default_str();
    app->add_option("--beta", beta, "Hyperplane offset (0 or 1)")->capture_default_str();
    app->add_option("--alpha", alpha, "Target spacing between front points (default: span / 50)");
    app->add_option("--m1", m1, "Second coordinate of the initial reference point");
    app->add_option("--kkt-tol", kkt_tol, "KKT residual tolerance")->capture_default_str();
    app->add_option("--max-iter", max_iter, "Inner iteration cap per solve")->capture_default_str();
    app->add_option("--max-points", max_points, "Maximum number of front points")->capture_default_str();
    app->add_flag("--no-prediction", no_prediction, "Disable sensitivity-based warm starts");
  }

  papc::ApcConfig config() const {
    papc::ApcConfig c;
    c.r = {r1, r2};
    c.hyperplane.b = {b1, b2};
    c.hyperplane.beta = beta;
    c.alpha = alpha;
    c.m1 = m1;
    c.solver.kkt_tolerance = kkt_tol;
    c.solver.max_iterations = max_iter;
    c.max_front_points = max_points;
    c.sensitivity_warm_start = !no_prediction;
    return c;
  }
};

struct TargetFlags {
  std::string scenario;
  int bs = 0;
  double neighbor_power = 30.0;

  void add_to(CLI::App* app) {
    app->add_option("--scenario", scenario, "Scenario file")->required();
    app->add_option("--bs", bs, "Index of the target base station")->capture_default_str();
    app->add_option("--neighbor-power", neighbor_power, "EPA power of every BS in the snapshot, W")
        ->capture_default_str();
  }
};

// --config is expanded before parsing; registered only so it shows in --help.
void add_config_help(CLI::App* app) {
  static std::string unused;
  app->add_option("--config", unused, "Flat key = value file with defaults for any option");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-objective power allocation: Pareto front tracing and baselines", "pareto_apc"};
  app.require_subcommand(1);

  papc::GenScenarioArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-scenario", "Generate a random multi-cell scenario");
  add_config_help(gen_cmd);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("-o,--output", gen.output, "Output scenario file")->required();
  gen_cmd->add_option("--cells", gen.config.cells, "Number of base stations")->capture_default_str();
  gen_cmd->add_option("--subcarriers", gen.config.subcarriers, "Subcarriers per BS")->capture_default_str();
  gen_cmd->add_option("--isd", gen.config.inter_site_distance_m, "Inter-site distance, m")->capture_default_str();
  gen_cmd->add_option("--bandwidth", gen.config.bandwidth_hz, "System bandwidth, Hz")->capture_default_str();
  gen_cmd->add_option("--pmax", gen.config.p_max_w, "Per-BS power budget, W")->capture_default_str();
  gen_cmd->add_option("--noise", gen.config.noise_dbm_per_hz, "Noise density, dBm/Hz")->capture_default_str();
  gen_cmd->add_option("--min-distance", gen.config.min_distance_m, "Minimum BS-user distance, m")
      ->capture_default_str();

  TargetFlags apc_target;
  ApcFlags apc_flags;
  std::string apc_csv;
  std::string apc_summary;
  auto* apc_cmd = app.add_subcommand("apc", "Trace the Pareto front of one BS");
  add_config_help(apc_cmd);
  apc_target.add_to(apc_cmd);
  apc_flags.add_to(apc_cmd);
  apc_cmd->add_option("-o,--output", apc_csv, "Front CSV")->required();
  apc_cmd->add_option("--summary", apc_summary, "Summary JSON");

  TargetFlags base_target;
  std::string scheme;
  std::optional<double> budget;
  std::string base_out;
  auto* base_cmd = app.add_subcommand("baseline", "Run a baseline allocator for one BS");
  add_config_help(base_cmd);
  base_target.add_to(base_cmd);
  base_cmd->add_option("--scheme", scheme, "epa, utilmax or pricing")->required();
  base_cmd->add_option("--budget", budget, "Power budget, W (default: p_max)");
  base_cmd->add_option("-o,--output", base_out, "Metrics JSON (default: stdout)");

  TargetFlags sweep_target;
  ApcFlags sweep_flags;
  std::vector<double> budgets{5, 10, 15, 20, 25, 30};
  std::string sweep_out;
  std::optional<int> threads;
  auto* sweep_cmd = app.add_subcommand("sweep", "Compare schemes over a grid of power budgets");
  add_config_help(sweep_cmd);
  sweep_target.add_to(sweep_cmd);
  sweep_flags.add_to(sweep_cmd);
  sweep_cmd->add_option("--budgets", budgets, "Budget grid, W")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("-o,--output", sweep_out, "Comparison CSV")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (default: PARETO_APC_THREADS or cores)");

  std::vector<std::string> args;
  try {
    args = papc::expand_config_args(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const papc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const papc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back

  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (*gen_cmd) {
      papc::cmd_gen_scenario(gen);
    } else if (*apc_cmd) {
      papc::cmd_apc({apc_target.scenario, apc_target.bs, apc_target.neighbor_power, apc_flags.config(),
                     apc_csv, apc_summary});
    } else if (*base_cmd) {
      papc::cmd_baseline({base_target.scenario, base_target.bs, base_target.neighbor_power, scheme, budget,
                          base_out},
                         std::cout);
    } else if (*sweep_cmd) {
      papc::cmd_sweep({sweep_target.scenario, sweep_target.bs, sweep_target.neighbor_power, budgets,
                       sweep_flags.config(), sweep_out, threads});
    }
  } catch (const papc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const papc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const papc::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
