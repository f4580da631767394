#include "papc/cellnet.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "papc/rng.hpp"
#include "papc/water_filling.hpp"

namespace papc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

std::uint64_t next_version() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double log2_1p(double x) { return std::log1p(x) * kInvLn2; }

// Stream tags for StreamRng.
constexpr std::uint64_t kUserStream = 1;
constexpr std::uint64_t kFadeStream = 2;

}  // namespace

void ScenarioConfig::validate() const {
  if (cells <= 0) throw ConfigError("cells must be positive");
  if (subcarriers <= 0) throw ConfigError("subcarriers must be positive");
  if (!(inter_site_distance_m > 0.0)) throw ConfigError("inter-site distance must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
  if (!(p_max_w > 0.0)) throw ConfigError("p_max must be positive");
  if (!std::isfinite(noise_dbm_per_hz)) throw ConfigError("noise density must be finite");
  if (!(min_distance_m > 0.0) || !(min_distance_m < 0.5 * inter_site_distance_m))
    throw ConfigError("min distance must lie in (0, ISD/2)");
}

void Scenario::validate() const {
  if (cells <= 0 || subcarriers <= 0) throw ConfigError("scenario dimensions must be positive");
  if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w))
    throw ConfigError("noise power must be positive");
  if (!(p_max_w > 0.0) || !std::isfinite(p_max_w)) throw ConfigError("p_max must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
  const auto m = static_cast<std::size_t>(cells);
  const auto n = static_cast<std::size_t>(subcarriers);
  if (bs_positions.size() != m) throw ConfigError("bs_positions has the wrong length");
  if (user_positions.size() != m * n) throw ConfigError("user_positions has the wrong length");
  if (gains.size() != m * m * n) throw ConfigError("gains has the wrong length");
  for (double g : gains)
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("gains must be finite and nonnegative");
}

double path_loss_db(double distance_km) { return 128.1 + 37.6 * std::log10(distance_km); }

double thermal_noise_w(double noise_dbm_per_hz, double bandwidth_hz) {
  return std::pow(10.0, (noise_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

std::vector<Point2> hex_layout(int cells, double isd) {
  // Axial coordinates, spiral order.
  static constexpr int kDirs[6][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}};
  std::vector<std::pair<int, int>> axial = {{0, 0}};
  for (int ring = 1; static_cast<int>(axial.size()) < cells; ++ring) {
    int q = -ring;
    int r = ring;
    for (const auto& dir : kDirs) {
      for (int step = 0; step < ring; ++step) {
        axial.emplace_back(q, r);
        q += dir[0];
        r += dir[1];
      }
    }
  }
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(cells));
  const double h = std::sqrt(3.0) / 2.0;
  for (int i = 0; i < cells; ++i) {
    const auto [q, r] = axial[static_cast<std::size_t>(i)];
    out.push_back({isd * (q + 0.5 * r), isd * h * r});
  }
  return out;
}

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Scenario sc;
  sc.cells = config.cells;
  sc.subcarriers = config.subcarriers;
  sc.inter_site_distance_m = config.inter_site_distance_m;
  sc.bandwidth_hz = config.bandwidth_hz;
  sc.noise_power_w = thermal_noise_w(config.noise_dbm_per_hz, config.bandwidth_hz / config.subcarriers);
  sc.p_max_w = config.p_max_w;
  sc.seed = seed;
  sc.bs_positions = hex_layout(config.cells, config.inter_site_distance_m);

  const double r_max = 0.5 * config.inter_site_distance_m;
  const double r_min = config.min_distance_m;
  sc.user_positions.reserve(static_cast<std::size_t>(config.cells * config.subcarriers));
  for (int m = 0; m < config.cells; ++m) {
    for (int n = 0; n < config.subcarriers; ++n) {
      StreamRng rng(seed, {kUserStream, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n)});
      const double radius = std::sqrt(r_min * r_min + rng.uniform() * (r_max * r_max - r_min * r_min));
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const Point2& bs = sc.bs_positions[static_cast<std::size_t>(m)];
      sc.user_positions.push_back({bs.x + radius * std::cos(angle), bs.y + radius * std::sin(angle)});
    }
  }

  sc.gains.resize(static_cast<std::size_t>(config.cells) * config.cells * config.subcarriers);
  std::size_t idx = 0;
  for (int m = 0; m < config.cells; ++m) {
    for (int j = 0; j < config.cells; ++j) {
      const Point2& bs = sc.bs_positions[static_cast<std::size_t>(j)];
      for (int n = 0; n < config.subcarriers; ++n) {
        const Point2& user = sc.user_positions[static_cast<std::size_t>(m * config.subcarriers + n)];
        const double d_m = std::max(std::hypot(user.x - bs.x, user.y - bs.y), r_min);
        StreamRng rng(seed, {kFadeStream, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(j),
                             static_cast<std::uint64_t>(n)});
        const double fade = rng.exponential();
        sc.gains[idx++] = fade * std::pow(10.0, -path_loss_db(d_m / 1000.0) / 10.0);
      }
    }
  }
  return sc;
}

PowerState::PowerState(int cells, int subcarriers)
    : watts_(MatrixXd::Zero(cells, subcarriers)), version_(next_version()) {}

PowerState PowerState::uniform(const Scenario& scenario, double per_bs_total) {
  PowerState s(scenario.cells, scenario.subcarriers);
  s.watts_.setConstant(per_bs_total / scenario.subcarriers);
  s.version_ = next_version();
  return s;
}

void PowerState::set_bs(int m, const VectorXd& watts) {
  if (watts.size() != watts_.cols()) throw std::invalid_argument("set_bs: wrong length");
  if (m < 0 || m >= watts_.rows()) throw std::invalid_argument("set_bs: BS index out of range");
  for (double w : watts)
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("set_bs: powers must be finite and >= 0");
  watts_.row(m) = watts.transpose();
  version_ = next_version();
}

double interference(const Scenario& sc, int m, int n, const PowerState& powers) {
  double total = 0.0;
  for (int j = 0; j < sc.cells; ++j)
    if (j != m) total += sc.gain(j, m, n) * powers(j, n);
  return total;
}

double subchannel_rate(const Scenario& sc, int m, int n, const PowerState& powers) {
  const double signal = sc.gain(m, m, n) * powers(m, n);
  return log2_1p(signal / (sc.noise_power_w + interference(sc, m, n, powers)));
}

double pricing_rate(const Scenario& sc, int j, int n, const PowerState& powers) {
  const double signal = sc.gain(j, j, n) * powers(j, n);
  const double floor = sc.noise_power_w + interference(sc, j, n, powers);
  return kInvLn2 * signal / (floor * (floor + signal));
}

PriceTable compute_prices(const Scenario& sc, const PowerState& powers) {
  PriceTable t;
  t.pi.resize(sc.cells, sc.subcarriers);
  for (int j = 0; j < sc.cells; ++j)
    for (int n = 0; n < sc.subcarriers; ++n) t.pi(j, n) = pricing_rate(sc, j, n, powers);
  t.version = powers.version();
  return t;
}

namespace {

void check_fresh(const PowerState& powers, const PriceTable& prices) {
  if (prices.version != powers.version())
    throw StalePriceError("price table was computed from a different power state");
}

}  // namespace

BsCoefficients bs_coefficients(const Scenario& sc, int m, const PowerState& powers,
                               const PriceTable& prices) {
  check_fresh(powers, prices);
  BsCoefficients c;
  c.snr_gain.resize(sc.subcarriers);
  c.cost.resize(sc.subcarriers);
  for (int n = 0; n < sc.subcarriers; ++n) {
    c.snr_gain(n) = sc.gain(m, m, n) / (sc.noise_power_w + interference(sc, m, n, powers));
    double cost = 0.0;
    for (int j = 0; j < sc.cells; ++j)
      if (j != m) cost += prices(j, n) * sc.gain(m, j, n);
    c.cost(n) = cost;
  }
  return c;
}

double throughput_contribution(const Scenario& sc, int m, const PowerState& powers,
                               const PriceTable& prices) {
  check_fresh(powers, prices);
  double total = 0.0;
  for (int n = 0; n < sc.subcarriers; ++n) {
    total += subchannel_rate(sc, m, n, powers);
    for (int j = 0; j < sc.cells; ++j)
      if (j != m) total -= prices(j, n) * sc.gain(m, j, n) * powers(m, n);
  }
  return total;
}

BiObjectiveProblem build_bs_problem(const Scenario& sc, int m, const PowerState& powers,
                                    const PriceTable& prices) {
  const BsCoefficients coef = bs_coefficients(sc, m, powers, prices);
  const VectorXd c = coef.snr_gain;
  const VectorXd d = coef.cost;
  const int n = sc.subcarriers;

  BiObjectiveProblem::Callbacks cb;
  cb.objectives = [c, d](const VectorXd& p) {
    double f1 = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) f1 += -log2_1p(c(i) * p(i)) + d(i) * p(i);
    return ObjectivePair{f1, p.sum()};
  };
  cb.gradients = [c, d](const VectorXd& p) {
    VectorXd g1(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) g1(i) = -kInvLn2 * c(i) / (1.0 + c(i) * p(i)) + d(i);
    return std::array<VectorXd, 2>{g1, VectorXd::Ones(p.size())};
  };
  cb.hessians = [c](const VectorXd& p) {
    VectorXd diag(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double q = c(i) / (1.0 + c(i) * p(i));
      diag(i) = kInvLn2 * q * q;
    }
    return std::array<MatrixXd, 2>{MatrixXd(diag.asDiagonal()), MatrixXd::Zero(p.size(), p.size())};
  };

  double g_max = 0.0;
  for (int i = 0; i < n; ++i) g_max = std::max(g_max, sc.gain(m, m, i));
  ObjectiveBounds bounds;
  bounds.f1_lower = -n * log2_1p(g_max * sc.p_max_w / sc.noise_power_w);
  bounds.f2_upper = sc.p_max_w;
  return BiObjectiveProblem(n, sc.p_max_w, std::move(cb), bounds);
}

PowerAllocation epa_allocation(const Scenario& sc, int /*m*/, double total_power) {
  if (!(total_power >= 0.0) || total_power > sc.p_max_w)
    throw ConfigError("EPA total power must lie in [0, p_max]");
  return {VectorXd::Constant(sc.subcarriers, total_power / sc.subcarriers)};
}

PowerAllocation utility_max(const Scenario& sc, int m, const PowerState& powers, double budget) {
  if (!(budget >= 0.0) || budget > sc.p_max_w) throw ConfigError("budget must lie in [0, p_max]");
  VectorXd c(sc.subcarriers);
  for (int n = 0; n < sc.subcarriers; ++n)
    c(n) = sc.gain(m, m, n) / (sc.noise_power_w + interference(sc, m, n, powers));
  return {water_filling(c, budget)};
}

PowerAllocation pricing_best_response(const Scenario& sc, int m, const PowerState& powers,
                                      const PriceTable& prices, double budget) {
  if (!(budget >= 0.0) || budget > sc.p_max_w) throw ConfigError("budget must lie in [0, p_max]");
  const BsCoefficients coef = bs_coefficients(sc, m, powers, prices);
  return {priced_water_filling(coef.snr_gain, coef.cost, budget)};
}

NetworkMetrics network_metrics(const Scenario& sc, const PowerState& powers) {
  NetworkMetrics out;
  double rate = 0.0;
  for (int m = 0; m < sc.cells; ++m)
    for (int n = 0; n < sc.subcarriers; ++n) rate += subchannel_rate(sc, m, n, powers);
  out.throughput_bps = sc.subcarrier_bandwidth_hz() * rate;
  out.total_power_w = powers.matrix().sum();
  out.energy_efficiency_bps_per_w = out.total_power_w > 0.0 ? out.throughput_bps / out.total_power_w : 0.0;
  return out;
}

}  // namespace papc
