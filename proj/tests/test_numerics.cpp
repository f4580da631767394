#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "papc/nnls.hpp"
#include "papc/simplex_box.hpp"
#include "papc/water_filling.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

double sum_log_rate(const VectorXd& c, const VectorXd& d, const VectorXd& p) {
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i) s += std::log2(1.0 + c(i) * p(i)) - d(i) * p(i);
  return s;
}

}  // namespace

TEST(SimplexBoxProjection, FeasiblePointIsFixed) {
  VectorXd y(3);
  y << 0.5, 0.0, 1.2;
  EXPECT_EQ(papc::project_simplex_box(y, 2.0), y);
}

TEST(SimplexBoxProjection, NegativeEntriesClipped) {
  VectorXd y(3);
  y << -1.0, 0.5, 0.25;
  const VectorXd x = papc::project_simplex_box(y, 10.0);
  EXPECT_EQ(x, (VectorXd(3) << 0.0, 0.5, 0.25).finished());
}

// The feasible set is the convex hull of 0 and budget * e_i, so the
// variational inequality only has to hold at those vertices.
TEST(SimplexBoxProjection, SatisfiesVariationalInequalityAtVertices) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 9;
    const double budget = 0.1 + 3.0 * (trial % 7);
    const VectorXd y = random_vector(rng, n, -5.0, 8.0);
    const VectorXd x = papc::project_simplex_box(y, budget);
    ASSERT_GE(x.minCoeff(), 0.0);
    ASSERT_LE(x.sum(), budget * (1 + 1e-12));
    const double scale = 1.0 + y.cwiseAbs().maxCoeff() * budget;
    EXPECT_LE((y - x).dot(-x), 1e-12 * scale);
    for (int i = 0; i < n; ++i) {
      VectorXd vertex = VectorXd::Zero(n);
      vertex(i) = budget;
      EXPECT_LE((y - x).dot(vertex - x), 1e-12 * scale);
    }
  }
}

TEST(Nnls, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    const int m = n + 1 + trial % 3;
    MatrixXd a(m, n);
    for (int i = 0; i < m; ++i) a.row(i) = random_vector(rng, n, -1.0, 1.0).transpose();
    const VectorXd b = random_vector(rng, m, -1.0, 1.0);

    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> cols;
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) cols.push_back(j);
      VectorXd x = VectorXd::Zero(n);
      if (!cols.empty()) {
        MatrixXd sub(m, cols.size());
        for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
        const VectorXd xs = sub.colPivHouseholderQr().solve(b);
        if (xs.minCoeff() < 0.0) continue;
        for (std::size_t k = 0; k < cols.size(); ++k) x(cols[k]) = xs(k);
      }
      best = std::min(best, (a * x - b).norm());
    }
    const VectorXd x = papc::solve_nnls(a, b);
    EXPECT_GE(x.minCoeff(), 0.0);
    EXPECT_NEAR((a * x - b).norm(), best, 1e-10);
  }
}

TEST(WaterFilling, EqualGainsGiveUniformSplit) {
  const VectorXd p = papc::water_filling(VectorXd::Constant(4, 3.0), 2.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p(i), 0.5, 1e-15);
}

TEST(WaterFilling, ZeroGainChannelGetsNothing) {
  const VectorXd p = papc::water_filling((VectorXd(2) << 1.0, 0.0).finished(), 5.0);
  EXPECT_EQ(p(1), 0.0);
  EXPECT_NEAR(p(0), 5.0, 1e-12);
}

TEST(WaterFilling, UsesFullBudgetWithCommonLevel) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 16;
    VectorXd c = random_vector(rng, n, 0.0, 4.0).array().exp() - 1.0;
    const double budget = 0.05 + 0.2 * (trial % 11);
    const VectorXd p = papc::water_filling(c, budget);
    EXPECT_NEAR(p.sum(), budget, 1e-9 * (1 + budget));
    double level = -1.0;
    for (int i = 0; i < n; ++i) {
      if (p(i) <= 0.0) continue;
      const double li = p(i) + 1.0 / c(i);
      if (level < 0) level = li;
      EXPECT_NEAR(li, level, 1e-8 * (1 + level));
    }
    for (int i = 0; i < n; ++i)
      if (p(i) == 0.0 && c(i) > 0.0) EXPECT_GE(1.0 / c(i), level - 1e-8 * (1 + level));
  }
}

TEST(WaterFilling, ThreeChannelsMatchGridOracle) {
  const VectorXd c = (VectorXd(3) << 2.0, 0.7, 5.0).finished();
  const double budget = 1.5;
  const VectorXd p = papc::water_filling(c, budget);
  // The budget binds, so search the 2-D simplex face p3 = budget - p1 - p2.
  const VectorXd zero = VectorXd::Zero(3);
  const VectorXd q = oracle::grid_minimize_2d(
      [&](const VectorXd& x) {
        const VectorXd full = (VectorXd(3) << x(0), x(1), budget - x(0) - x(1)).finished();
        return -sum_log_rate(c, zero, full);
      },
      budget);
  EXPECT_NEAR(p(0), q(0), 1e-3);
  EXPECT_NEAR(p(1), q(1), 1e-3);
  EXPECT_NEAR(p(2), budget - q(0) - q(1), 1e-3);
}

TEST(PricedWaterFilling, ZeroPricesAreBitIdenticalToWaterFilling) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd c = random_vector(rng, 8, 0.0, 50.0);
    const VectorXd p1 = papc::water_filling(c, 3.0);
    const VectorXd p2 = papc::priced_water_filling(c, VectorXd::Zero(8), 3.0);
    for (int i = 0; i < 8; ++i) EXPECT_EQ(p1(i), p2(i));
  }
}

TEST(PricedWaterFilling, HugePriceShutsChannel) {
  const VectorXd c = VectorXd::Constant(3, 10.0);
  const VectorXd d = (VectorXd(3) << 0.0, 1e6, 0.0).finished();
  const VectorXd p = papc::priced_water_filling(c, d, 2.0);
  EXPECT_EQ(p(1), 0.0);
  EXPECT_NEAR(p.sum(), 2.0, 1e-12);
}

TEST(PricedWaterFilling, SlackBudgetWhenPricesDominate) {
  const VectorXd c = VectorXd::Constant(2, 1.0);
  const VectorXd d = VectorXd::Constant(2, 1.0);
  // Unconstrained optimum 1/ln2 - 1 per channel, well inside the budget.
  const VectorXd p = papc::priced_water_filling(c, d, 10.0);
  EXPECT_NEAR(p(0), 1.0 / std::log(2.0) - 1.0, 1e-12);
  EXPECT_NEAR(p(1), 1.0 / std::log(2.0) - 1.0, 1e-12);
}

TEST(PricedWaterFilling, TwoChannelsMatchGridOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorXd c = random_vector(rng, 2, 0.5, 20.0);
    const VectorXd d = random_vector(rng, 2, 0.0, 1.0);
    const double budget = 0.5 + trial;
    const VectorXd p = papc::priced_water_filling(c, d, budget);
    const VectorXd q =
        oracle::grid_minimize_2d([&](const VectorXd& x) { return -sum_log_rate(c, d, x); }, budget);
    EXPECT_NEAR(p(0), q(0), 1e-3);
    EXPECT_NEAR(p(1), q(1), 1e-3);
    EXPECT_LE(-sum_log_rate(c, d, p), -sum_log_rate(c, d, q) + 1e-12);
  }
}
