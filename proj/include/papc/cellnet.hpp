#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "papc/errors.hpp"
#include "papc/moo.hpp"

namespace papc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct ScenarioConfig {
  int cells = 19;
  int subcarriers = 64;
  double inter_site_distance_m = 1000.0;
  double bandwidth_hz = 10e6;
  double p_max_w = 30.0;
  /// Thermal noise density; the noise power is taken over one subcarrier.
  double noise_dbm_per_hz = -174.0;
  /// Users are dropped uniformly in an annulus [min_distance, ISD / 2]
  /// around their serving BS.
  double min_distance_m = 35.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Immutable network instance. User u = m * N + n is served by BS m on
/// subcarrier n.
struct Scenario {
  int cells = 0;
  int subcarriers = 0;
  double inter_site_distance_m = 0.0;
  double bandwidth_hz = 0.0;
  double noise_power_w = 0.0;
  double p_max_w = 0.0;
  std::uint64_t seed = 0;
  std::vector<Point2> bs_positions;
  std::vector<Point2> user_positions;
  /// Row-major (m, j, n): squared channel magnitude between BS j and the
  /// user served by BS m on subcarrier n.
  std::vector<double> gains;

  double gain(int m, int j, int n) const {
    return gains[(static_cast<std::size_t>(m) * static_cast<std::size_t>(cells) +
                  static_cast<std::size_t>(j)) *
                     static_cast<std::size_t>(subcarriers) +
                 static_cast<std::size_t>(n)];
  }
  double subcarrier_bandwidth_hz() const { return bandwidth_hz / subcarriers; }

  /// Throws ConfigError on inconsistent sizes or out-of-range values.
  void validate() const;
};

/// 128.1 + 37.6 log10(d) dB, d in kilometers.
double path_loss_db(double distance_km);

/// First `cells` sites of a hexagonal grid, center first, then ring by ring.
std::vector<Point2> hex_layout(int cells, double inter_site_distance_m);

double thermal_noise_w(double noise_dbm_per_hz, double bandwidth_hz);

Scenario generate_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct PowerAllocation {
  Eigen::VectorXd watts;
  double total() const { return watts.sum(); }
};

/// Transmit powers of all BSs. Every mutation gets a fresh, process-wide
/// unique version stamp so derived price tables can be checked for
/// staleness.
class PowerState {
 public:
  PowerState(int cells, int subcarriers);
  /// Every BS spreads `per_bs_total` watts evenly over its subcarriers.
  static PowerState uniform(const Scenario& scenario, double per_bs_total);

  int cells() const { return static_cast<int>(watts_.rows()); }
  int subcarriers() const { return static_cast<int>(watts_.cols()); }
  double operator()(int m, int n) const { return watts_(m, n); }
  Eigen::VectorXd bs(int m) const { return watts_.row(m).transpose(); }
  const Eigen::MatrixXd& matrix() const { return watts_; }
  std::uint64_t version() const { return version_; }

  void set_bs(int m, const Eigen::VectorXd& watts);

 private:
  Eigen::MatrixXd watts_;
  std::uint64_t version_;
};

/// Interference prices pi_j^[n], stamped with the PowerState version they
/// were computed from.
struct PriceTable {
  Eigen::MatrixXd pi;
  std::uint64_t version = 0;

  double operator()(int j, int n) const { return pi(j, n); }
};

/// sum_{j != m} |h_{j,m}^[n]|^2 p_j^[n] (index order as in the rate formula).
double interference(const Scenario& scenario, int m, int n, const PowerState& powers);

/// log2(1 + g_mm p_m / (sigma^2 + I_m)), bits/s/Hz.
double subchannel_rate(const Scenario& scenario, int m, int n, const PowerState& powers);

/// -dU_j/dI_j = g_jj p_j / (ln2 (sigma^2 + I_j)(sigma^2 + I_j + g_jj p_j)).
double pricing_rate(const Scenario& scenario, int j, int n, const PowerState& powers);

PriceTable compute_prices(const Scenario& scenario, const PowerState& powers);

/// Own sum rate minus priced interference cost. Throws StalePriceError if
/// `prices` was not computed from `powers`.
double throughput_contribution(const Scenario& scenario, int m, const PowerState& powers,
                               const PriceTable& prices);

/// Per-subcarrier coefficients of BS m's objective for a frozen state:
/// f1(p) = sum_n [-log2(1 + snr_gain_n p_n) + cost_n p_n].
struct BsCoefficients {
  Eigen::VectorXd snr_gain;  // g_mm / (sigma^2 + I_m)
  Eigen::VectorXd cost;      // sum_{j != m} pi_j g_mj
};

BsCoefficients bs_coefficients(const Scenario& scenario, int m, const PowerState& powers,
                               const PriceTable& prices);

/// Bi-objective problem of BS m: f1 = -throughput contribution, f2 = total
/// power, over {p >= 0, sum(p) <= p_max}. Others' powers and the prices
/// are frozen at the given snapshot.
BiObjectiveProblem build_bs_problem(const Scenario& scenario, int m, const PowerState& powers,
                                    const PriceTable& prices);

PowerAllocation epa_allocation(const Scenario& scenario, int m, double total_power);

/// Greedy water-filling on own rate, interference from others fixed.
PowerAllocation utility_max(const Scenario& scenario, int m, const PowerState& powers,
                            double budget);

/// Maximizer of the throughput contribution under a power budget.
PowerAllocation pricing_best_response(const Scenario& scenario, int m, const PowerState& powers,
                                      const PriceTable& prices, double budget);

struct NetworkMetrics {
  double throughput_bps = 0.0;
  double total_power_w = 0.0;
  double energy_efficiency_bps_per_w = 0.0;
};

NetworkMetrics network_metrics(const Scenario& scenario, const PowerState& powers);

}  // namespace papc
