#include "papc/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "papc/csv.hpp"
#include "papc/errors.hpp"
#include "papc/scenario_io.hpp"

namespace papc {

using Eigen::Vector2d;
using Eigen::VectorXd;
using nlohmann::json;

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kApc: return "apc";
    case Scheme::kEpa: return "epa";
    case Scheme::kUtilMax: return "utilmax";
    case Scheme::kPricing: return "pricing";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::kApc, Scheme::kEpa, Scheme::kUtilMax, Scheme::kPricing})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected epa, utilmax or pricing)");
}

BsContext::BsContext(const Scenario& sc, int m, double neighbor_power_w)
    : scenario(&sc), bs(m), state(PowerState::uniform(sc, neighbor_power_w)),
      prices(compute_prices(sc, state)) {
  if (m < 0 || m >= sc.cells)
    throw ConfigError("bs index " + std::to_string(m) + " outside [0, " + std::to_string(sc.cells) + ")");
}

BiObjectiveProblem BsContext::problem() const { return build_bs_problem(*scenario, bs, state, prices); }

AllocationMetrics evaluate_allocation(const BsContext& ctx, const VectorXd& powers) {
  const Scenario& sc = *ctx.scenario;
  AllocationMetrics out;
  out.powers = powers;
  out.total_power_w = powers.sum();

  PowerState updated = ctx.state;
  updated.set_bs(ctx.bs, powers);

  // Contribution at the frozen prices: own rate in the updated network
  // (others unchanged), interference cost priced at the snapshot.
  const BsCoefficients coef = bs_coefficients(sc, ctx.bs, ctx.state, ctx.prices);
  double own_rate = 0.0;
  double cost = 0.0;
  for (int n = 0; n < sc.subcarriers; ++n) {
    own_rate += subchannel_rate(sc, ctx.bs, n, updated);
    cost += coef.cost(n) * powers(n);
  }
  out.throughput_contribution = own_rate - cost;

  double others = 0.0;
  for (int j = 0; j < sc.cells; ++j) {
    if (j == ctx.bs) continue;
    for (int n = 0; n < sc.subcarriers; ++n) others += subchannel_rate(sc, j, n, ctx.state);
  }
  out.pre_update_throughput_bps = sc.subcarrier_bandwidth_hz() * (others + own_rate);

  out.post_update = network_metrics(sc, updated);
  out.post_update_contribution = throughput_contribution(sc, ctx.bs, updated, compute_prices(sc, updated));
  return out;
}

SpacingStats spacing_stats(const ParetoFront& front, double alpha) {
  SpacingStats s;
  if (front.size() < 2) return s;
  s.min = std::numeric_limits<double>::infinity();
  int in_band = 0;
  for (std::size_t i = 1; i < front.size(); ++i) {
    const double d = (front.entries[i].f.vec() - front.entries[i - 1].f.vec()).norm();
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    s.mean += d;
    if (d >= 0.5 * alpha && d <= 1.5 * alpha) ++in_band;
  }
  const double gaps = static_cast<double>(front.size() - 1);
  s.mean /= gaps;
  s.fraction_in_band = in_band / gaps;
  return s;
}

FrontReport trace_front(const BsContext& ctx, const ApcConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const BiObjectiveProblem problem = ctx.problem();
  FrontReport report;
  report.apc = run_apc(problem, config);
  const auto& entries = report.apc.front.entries;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const FrontEntry& e = entries[i];
    FrontRow row;
    row.index = static_cast<int>(i);
    row.t = e.solution.t;
    row.a = e.a;
    row.f = e.f;
    row.throughput_contribution = 0.0 - e.f.f1;
    PowerState updated = ctx.state;
    updated.set_bs(ctx.bs, e.p());
    const NetworkMetrics nm = network_metrics(*ctx.scenario, updated);
    row.system_throughput_bps = nm.throughput_bps;
    row.energy_efficiency_bps_per_w = nm.energy_efficiency_bps_per_w;
    row.kkt_residual = e.solution.kkt_residual;
    report.rows.push_back(row);
  }
  report.spacing = spacing_stats(report.apc.front, report.apc.alpha);
  report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void write_front_csv(std::ostream& out, const std::vector<FrontRow>& rows) {
  CsvWriter csv(out, {"index", "t", "a1", "a2", "f1", "f2_watts", "throughput_contribution_bits_s_hz",
                      "system_throughput_bps", "energy_efficiency_bps_per_w", "kkt_residual"});
  for (const FrontRow& r : rows) {
    csv.row({std::to_string(r.index), format_number(r.t), format_number(r.a(0)), format_number(r.a(1)),
             format_number(r.f.f1), format_number(r.f.f2), format_number(r.throughput_contribution),
             format_number(r.system_throughput_bps), format_number(r.energy_efficiency_bps_per_w),
             format_number(r.kkt_residual)});
  }
}

namespace {

json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json front_summary(const FrontReport& report, const BsContext& ctx) {
  const Anchors& anc = report.apc.anchors;
  double max_kkt = 0.0;
  for (const FrontRow& r : report.rows) max_kkt = std::max(max_kkt, r.kkt_residual);
  json j;
  j["csv_schema"] = kFrontCsvSchema;
  j["bs"] = ctx.bs;
  j["points"] = report.rows.size();
  j["rejected_points"] = report.apc.rejected.size();
  j["alpha"] = report.apc.alpha;
  j["m1"] = anc.m1;
  j["anchors"] = {
      {"f1_minimizer", {{"f1", anc.f_1.f1}, {"f2", anc.f_1.f2}, {"a", vec_json(anc.h1.a)}, {"t", anc.h1.t}}},
      {"f2_minimizer", {{"f1", anc.f_E.f1}, {"f2", anc.f_E.f2}, {"a", vec_json(anc.hE.a)}, {"t", anc.hE.t}}},
      {"v", vec_json(anc.v)},
  };
  j["spacing"] = {{"min", report.spacing.min},
                  {"max", report.spacing.max},
                  {"mean", report.spacing.mean},
                  {"fraction_within_half_to_three_halves_alpha", report.spacing.fraction_in_band}};
  j["valid_front"] = is_valid_front(report.apc.front);
  j["max_kkt_residual"] = max_kkt;
  j["predicted_warm_starts"] = report.apc.predicted_warm_starts;
  j["cold_solves"] = report.apc.cold_solves;
  j["runtime_s"] = report.runtime_s;
  return j;
}

VectorXd front_allocation_at_power(const BiObjectiveProblem& problem, const ApcResult& apc,
                                   const Vector2d& r, double budget, const SolverOptions& options) {
  const auto& e = apc.front.entries;
  if (e.empty()) throw SolverError("empty front");
  if (budget >= e.back().f.f2) return e.back().p();
  if (budget <= e.front().f.f2) return e.front().p();
  std::size_t k = 0;
  while (e[k + 1].f.f2 < budget) ++k;
  if (e[k + 1].f.f2 == budget) return e[k + 1].p();

  // f2 of SP(a(lambda)) grows monotonically from e[k] to e[k + 1]. Keep
  // the best iterate that does not exceed the budget.
  SpSolver solver(problem, options);
  double lo = 0.0;
  double hi = 1.0;
  VectorXd best = e[k].p();
  double best_gap = budget - e[k].f.f2;
  VectorXd warm = e[k].p();
  const double tol = 1e-12 * std::max(1.0, budget);
  for (int it = 0; it < 100 && best_gap > tol; ++it) {
    const double lambda = 0.5 * (lo + hi);
    const Vector2d a = (1.0 - lambda) * e[k].a + lambda * e[k + 1].a;
    const SpSolution s = solver.solve({a, r}, warm);
    const double f2 = problem.objectives(s.p).f2;
    warm = s.p;
    if (f2 <= budget) {
      if (budget - f2 < best_gap) {
        best_gap = budget - f2;
        best = s.p;
      }
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (hi - lo <= 1e-16) break;
  }
  return best;
}

VectorXd baseline_allocation(const BsContext& ctx, Scheme scheme, double budget) {
  switch (scheme) {
    case Scheme::kEpa: return epa_allocation(*ctx.scenario, ctx.bs, budget).watts;
    case Scheme::kUtilMax: return utility_max(*ctx.scenario, ctx.bs, ctx.state, budget).watts;
    case Scheme::kPricing:
      return pricing_best_response(*ctx.scenario, ctx.bs, ctx.state, ctx.prices, budget).watts;
    case Scheme::kApc: break;
  }
  throw ConfigError("apc is not a baseline scheme");
}

json allocation_json(const AllocationMetrics& m) {
  json j;
  j["powers_w"] = vec_json(m.powers);
  j["total_power_w"] = m.total_power_w;
  j["throughput_contribution_bits_s_hz"] = m.throughput_contribution;
  j["pre_update_throughput_bps"] = m.pre_update_throughput_bps;
  j["post_update_throughput_bps"] = m.post_update.throughput_bps;
  j["post_update_total_power_w"] = m.post_update.total_power_w;
  j["post_update_energy_efficiency_bps_per_w"] = m.post_update.energy_efficiency_bps_per_w;
  j["post_update_throughput_contribution_bits_s_hz"] = m.post_update_contribution;
  return j;
}

int worker_threads() {
  if (const char* env = std::getenv("PARETO_APC_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<SweepRow> run_sweep(const BsContext& ctx, const std::vector<double>& budgets,
                                const ApcConfig& config, int threads) {
  const Scheme schemes[] = {Scheme::kApc, Scheme::kEpa, Scheme::kUtilMax, Scheme::kPricing};
  for (double b : budgets)
    if (!(b >= 0.0 && b <= ctx.scenario->p_max_w))
      throw ConfigError("sweep budget " + format_number(b) + " outside [0, p_max]");

  const BiObjectiveProblem problem = ctx.problem();
  const ApcResult apc = run_apc(problem, config);

  std::vector<SweepRow> rows;
  for (double b : budgets)
    for (Scheme s : schemes) rows.push_back({b, s, {}});

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      try {
        SweepRow& row = rows[i];
        const VectorXd p = row.scheme == Scheme::kApc
                               ? front_allocation_at_power(problem, apc, config.r, row.budget_w, config.solver)
                               : baseline_allocation(ctx, row.scheme, row.budget_w);
        row.metrics = evaluate_allocation(ctx, p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, rows.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  CsvWriter csv(out, {"budget_w", "scheme", "bs_power_w", "throughput_contribution_bits_s_hz",
                      "pre_update_throughput_bps", "system_throughput_bps", "total_power_w",
                      "energy_efficiency_bps_per_w", "post_update_throughput_contribution_bits_s_hz"});
  for (const SweepRow& r : rows) {
    const AllocationMetrics& m = r.metrics;
    csv.row({format_number(r.budget_w), std::string(to_string(r.scheme)), format_number(m.total_power_w),
             format_number(m.throughput_contribution), format_number(m.pre_update_throughput_bps),
             format_number(m.post_update.throughput_bps), format_number(m.post_update.total_power_w),
             format_number(m.post_update.energy_efficiency_bps_per_w),
             format_number(m.post_update_contribution)});
  }
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> expand_config_args(const std::vector<std::string>& args,
                                            const std::vector<std::pair<std::string, std::string>>& short_names) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return rest;

  auto given = [&](const std::string& key) {
    for (const std::string& a : rest) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
      for (const auto& [alias, name] : short_names)
        if (name == key && a == alias) return true;
    }
    return false;
  };

  std::ifstream in(*path);
  if (!in) throw IoError("cannot open config file " + *path);
  std::vector<std::string> injected;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(*path + ":" + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError(*path + ":" + std::to_string(line_no) + ": empty key");
    if (given(key)) continue;
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  // Subcommand name first, then file values, then the explicit flags.
  std::vector<std::string> out;
  std::size_t first_flag = 0;
  while (first_flag < rest.size() && !rest[first_flag].empty() && rest[first_flag][0] != '-') ++first_flag;
  out.insert(out.end(), rest.begin(), rest.begin() + first_flag);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + first_flag, rest.end());
  return out;
}

void cmd_gen_scenario(const GenScenarioArgs& args) {
  if (args.output.empty()) throw ConfigError("missing output path");
  save_scenario(generate_scenario(args.config, args.seed), args.output);
}

void cmd_apc(const ApcArgs& args) {
  if (args.csv_output.empty()) throw ConfigError("missing CSV output path");
  const Scenario sc = load_scenario(args.scenario);
  const BsContext ctx(sc, args.bs, args.neighbor_power_w);
  const FrontReport report = trace_front(ctx, args.apc);
  auto csv = open_output(args.csv_output);
  write_front_csv(csv, report.rows);
  finish(csv, args.csv_output);
  if (!args.summary_output.empty()) {
    auto js = open_output(args.summary_output);
    js << front_summary(report, ctx).dump(2) << '\n';
    finish(js, args.summary_output);
  }
}

void cmd_baseline(const BaselineArgs& args, std::ostream& stdout_stream) {
  const Scheme scheme = parse_scheme(args.scheme);
  if (scheme == Scheme::kApc) throw ConfigError("apc is not a baseline scheme");
  const Scenario sc = load_scenario(args.scenario);
  const BsContext ctx(sc, args.bs, args.neighbor_power_w);
  const double budget = args.budget.value_or(sc.p_max_w);
  if (!(budget >= 0.0 && budget <= sc.p_max_w)) throw ConfigError("budget outside [0, p_max]");
  json j = allocation_json(evaluate_allocation(ctx, baseline_allocation(ctx, scheme, budget)));
  j["scheme"] = to_string(scheme);
  j["bs"] = args.bs;
  j["budget_w"] = budget;
  j["neighbor_power_w"] = args.neighbor_power_w;
  if (args.output.empty() || args.output == "-") {
    stdout_stream << j.dump(2) << '\n';
    return;
  }
  auto out = open_output(args.output);
  out << j.dump(2) << '\n';
  finish(out, args.output);
}

void cmd_sweep(const SweepArgs& args) {
  if (args.output.empty()) throw ConfigError("missing output path");
  if (args.budgets.empty()) throw ConfigError("empty budget grid");
  const Scenario sc = load_scenario(args.scenario);
  const BsContext ctx(sc, args.bs, args.neighbor_power_w);
  const auto rows = run_sweep(ctx, args.budgets, args.apc, args.threads.value_or(worker_threads()));
  auto out = open_output(args.output);
  write_sweep_csv(out, rows);
  finish(out, args.output);
}

}  // namespace papc
