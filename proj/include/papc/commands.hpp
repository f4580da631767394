#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "papc/apc.hpp"
#include "papc/cellnet.hpp"

namespace papc {

inline constexpr std::string_view kFrontCsvSchema = "front/1";
inline constexpr std::string_view kSweepCsvSchema = "sweep/1";

enum class Scheme { kApc, kEpa, kUtilMax, kPricing };

std::string_view to_string(Scheme scheme);
/// Accepts "apc", "epa", "utilmax", "pricing"; throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);

/// Network snapshot seen by one BS: every BS (including the target) at EPA
/// with `neighbor_power_w`, prices computed from that state.
struct BsContext {
  const Scenario* scenario = nullptr;
  int bs = 0;
  PowerState state;
  PriceTable prices;

  BsContext(const Scenario& scenario, int bs, double neighbor_power_w);
  BiObjectiveProblem problem() const;
};

/// Network-level effect of replacing the target BS's powers.
struct AllocationMetrics {
  Eigen::VectorXd powers;
  double total_power_w = 0.0;
  /// With the prices frozen at the snapshot (the objective being traded off).
  double throughput_contribution = 0.0;
  /// Other BSs' rates from the snapshot, the target BS's own rate with its
  /// new powers.
  double pre_update_throughput_bps = 0.0;
  /// Every rate recomputed in the updated network.
  NetworkMetrics post_update;
  /// Contribution after prices are recomputed in the updated network.
  double post_update_contribution = 0.0;
};

AllocationMetrics evaluate_allocation(const BsContext& ctx, const Eigen::VectorXd& powers);

struct FrontRow {
  int index = 0;
  double t = 0.0;
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  ObjectivePair f;
  double throughput_contribution = 0.0;
  double system_throughput_bps = 0.0;
  double energy_efficiency_bps_per_w = 0.0;
  double kkt_residual = 0.0;
};

struct SpacingStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Share of consecutive gaps inside [0.5 alpha, 1.5 alpha].
  double fraction_in_band = 0.0;
};

SpacingStats spacing_stats(const ParetoFront& front, double alpha);

struct FrontReport {
  ApcResult apc;
  std::vector<FrontRow> rows;
  SpacingStats spacing;
  double runtime_s = 0.0;
};

FrontReport trace_front(const BsContext& ctx, const ApcConfig& config);

void write_front_csv(std::ostream& out, const std::vector<FrontRow>& rows);
nlohmann::json front_summary(const FrontReport& report, const BsContext& ctx);

/// Allocation on the traced front whose power is as close to `budget` as
/// possible without exceeding it (the reference point is bisected between
/// neighbouring front points); the f1 minimizer when the budget exceeds
/// its power.
Eigen::VectorXd front_allocation_at_power(const BiObjectiveProblem& problem, const ApcResult& apc,
                                          const Eigen::Vector2d& r, double budget,
                                          const SolverOptions& options = {});

/// Baseline allocator for the target BS. kApc is not a baseline.
Eigen::VectorXd baseline_allocation(const BsContext& ctx, Scheme scheme, double budget);

nlohmann::json allocation_json(const AllocationMetrics& metrics);

struct SweepRow {
  double budget_w = 0.0;
  Scheme scheme = Scheme::kEpa;
  AllocationMetrics metrics;
};

/// Budgets x {apc, epa, utilmax, pricing}, budget-major. Rows are computed
/// by up to `threads` workers; the order does not depend on it.
std::vector<SweepRow> run_sweep(const BsContext& ctx, const std::vector<double>& budgets,
                                const ApcConfig& config, int threads);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// PARETO_APC_THREADS if set and positive, else the number of logical cores.
int worker_threads();

/// Expands "--config FILE" inside a command line. FILE holds flat
/// "key = value" lines ('#' starts a comment); each key becomes "--key
/// value" unless the command line already sets that option, so explicit
/// flags win. "true"/"false" values toggle flags. `short_names` maps
/// single-dash aliases to long names ("-o" -> "output"). Throws IoError
/// when FILE cannot be read and ConfigError on malformed lines.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args,
                                            const std::vector<std::pair<std::string, std::string>>& short_names = {
                                                {"-o", "output"}});

// Command drivers. They throw ConfigError, SolverError or IoError.

struct GenScenarioArgs {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  std::string output;
};
void cmd_gen_scenario(const GenScenarioArgs& args);

struct ApcArgs {
  std::string scenario;
  int bs = 0;
  double neighbor_power_w = 30.0;
  ApcConfig apc;
  std::string csv_output;
  std::string summary_output;  // empty: no summary file
};
void cmd_apc(const ApcArgs& args);

struct BaselineArgs {
  std::string scenario;
  int bs = 0;
  double neighbor_power_w = 30.0;
  std::string scheme;
  std::optional<double> budget;  // default: the scenario's p_max
  std::string output;            // empty or "-": standard output
};
void cmd_baseline(const BaselineArgs& args, std::ostream& stdout_stream);

struct SweepArgs {
  std::string scenario;
  int bs = 0;
  double neighbor_power_w = 30.0;
  std::vector<double> budgets;
  ApcConfig apc;
  std::string output;
  std::optional<int> threads;
};
void cmd_sweep(const SweepArgs& args);

}  // namespace papc
