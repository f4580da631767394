#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "papc/apc.hpp"
#include "papc/commands.hpp"

using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

const Vector2d kR(1.0, 1.0);

// Both objectives are minimized at p = 0: the front is a single point.
papc::BiObjectiveProblem collapsed_problem() {
  papc::BiObjectiveProblem::Callbacks cb;
  cb.objectives = [](const VectorXd& p) { return papc::ObjectivePair{p(0) * p(0), p(0)}; };
  cb.gradients = [](const VectorXd& p) {
    return std::array<VectorXd, 2>{VectorXd::Constant(1, 2 * p(0)), VectorXd::Constant(1, 1.0)};
  };
  cb.hessians = [](const VectorXd&) {
    return std::array<Eigen::MatrixXd, 2>{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Zero(1, 1)};
  };
  return papc::BiObjectiveProblem(1, 1.0, cb, {0.0, 1.0});
}

papc::BiObjectiveProblem cell_problem(std::uint64_t seed) {
  const papc::Scenario sc = oracle::small_scenario(seed);
  return papc::BsContext(sc, 0, 30.0).problem();
}

}  // namespace

TEST(M1Bound, ToyProblemReturnsTwo) {
  EXPECT_EQ(papc::compute_m1_bound(oracle::toy_problem(), kR), 2.0);
}

TEST(M1Bound, ZeroGainScenarioIsBudgetPlusOne) {
  papc::Scenario sc = oracle::small_scenario(1);
  std::fill(sc.gains.begin(), sc.gains.end(), 0.0);
  const papc::BsContext ctx(sc, 0, 30.0);
  EXPECT_EQ(papc::compute_m1_bound(ctx.problem(), kR), sc.p_max_w + 1.0);
}

TEST(M1Bound, ExceedsGridExtremes) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto problem = cell_problem(seed);
    double max_f2 = 0.0, min_f1 = 0.0;
    for (const auto& g : oracle::grid_outcomes_2d(problem, 201)) {
      max_f2 = std::max(max_f2, g.f.f2);
      min_f1 = std::min(min_f1, g.f.f1);
    }
    for (const Vector2d r : {kR, Vector2d(2.0, 0.5)})
      EXPECT_GT(papc::compute_m1_bound(problem, r), max_f2 - min_f1 * r(1) / r(0));
  }
}

TEST(HyperplaneProjection, Examples) {
  const auto h = papc::project_to_hyperplane({3, 5}, {Vector2d(1, 0), 0.0}, kR);
  EXPECT_EQ(h.t, 3.0);
  EXPECT_EQ(h.a, Vector2d(0, 2));
  const auto on = papc::project_to_hyperplane({4, 1}, {Vector2d(0, 1), 1.0}, kR);
  EXPECT_EQ(on.t, 0.0);
  EXPECT_EQ(on.a, Vector2d(4, 1));
}

TEST(HyperplaneProjection, PointReconstructsObjective) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const papc::ObjectivePair f{u(rng), u(rng)};
    const papc::Hyperplane hp{Vector2d(u(rng), u(rng)), double(i % 2)};
    const Vector2d r(std::abs(u(rng)) + 0.1, std::abs(u(rng)));
    if (std::abs(hp.b.dot(r)) < 1e-3) continue;
    const auto h = papc::project_to_hyperplane(f, hp, r);
    EXPECT_LE((h.a + h.t * r - f.vec()).norm(), 1e-12 * (1 + std::abs(h.t) * r.norm() + f.vec().norm()));
    EXPECT_NEAR(hp.b.dot(h.a), hp.beta, 1e-12 * (1 + hp.b.norm() * h.a.norm()));
  }
}

TEST(Anchors, ToyProblem) {
  const auto anc = papc::anchor_points(oracle::toy_problem(), {});
  EXPECT_NEAR(anc.p1(0), 0.0, 1e-9);
  EXPECT_NEAR(anc.pE(0), 1.0, 1e-9);
  EXPECT_NEAR(anc.f_1.f1, 0.0, 1e-12);
  EXPECT_NEAR(anc.f_1.f2, 1.0, 1e-9);
  EXPECT_NEAR(anc.f_E.f1, 1.0, 1e-9);
  EXPECT_NEAR(anc.f_E.f2, 0.0, 1e-12);
  EXPECT_FALSE(anc.collapsed);
}

TEST(Anchors, CellPowerMinimizerIsOrigin) {
  const auto anc = papc::anchor_points(cell_problem(7), {});
  EXPECT_EQ(anc.pE, VectorXd::Zero(2));
  EXPECT_EQ(anc.f_E, (papc::ObjectivePair{0.0, 0.0}));
  EXPECT_EQ(anc.hE.t, 0.0);
  EXPECT_EQ(anc.hE.a, Vector2d(0, 0));
  EXPECT_EQ(anc.v, anc.hE.a - anc.h1.a);
}

TEST(Anchors, InitialMultipliersRemainValidAtProjectedPoint) {
  // On these instances the budget binds at p1, so the multipliers of
  // SP(a1) are not unique; the carried-over ones must still satisfy KKT.
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto problem = cell_problem(seed);
    const auto anc = papc::anchor_points(problem, {});
    const papc::SpParameters at_a1{anc.h1.a, kR};
    const auto again = papc::solve_sp(problem, at_a1);
    EXPECT_LE((again.p - anc.p1).norm(), 1e-4);
    papc::SpSolution carried = anc.initial;
    carried.t = anc.h1.t;
    EXPECT_LE(papc::kkt_residual(problem, at_a1, carried), 1e-6);
  }
}

TEST(Anchors, ResolvingAtProjectedPointKeepsSolutionAndMultiplier) {
  const papc::Scenario sc = papc::generate_scenario({}, 7);
  const auto problem = papc::BsContext(sc, 0, 30.0).problem();
  const auto anc = papc::anchor_points(problem, {});
  ASSERT_LT(anc.p1.sum(), problem.budget());  // multipliers are unique here
  const auto again = papc::solve_sp(problem, {anc.h1.a, kR});
  EXPECT_LE((again.p - anc.p1).norm(), 1e-4);
  EXPECT_LE((again.mu - anc.initial.mu).norm(), 1e-3);
}

TEST(ApcStep, FormulaExample) {
  const Vector2d a = papc::apc_step(Vector2d(2, 3), Vector2d(1, 0), Vector2d(1, -1), 1.0, kR);
  EXPECT_DOUBLE_EQ(a(0), 2.5);
  EXPECT_DOUBLE_EQ(a(1), 2.5);
}

TEST(ApcStep, ZeroAlphaStaysPut) {
  EXPECT_EQ(papc::apc_step(Vector2d(2, 3), Vector2d(0.3, 0.7), Vector2d(1, -1), 0.0, kR), Vector2d(2, 3));
}

TEST(ApcStep, ZeroDenominatorThrows) {
  // v = (1, 0), mu = (1, 0): v - (mu'v) r = (0, -1) for r = (1, 1); choose r = (1, 0).
  EXPECT_THROW(papc::apc_step(Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 0), 1.0, Vector2d(1, 0)),
               papc::ZeroDenominatorError);
}

TEST(ApcStep, ToySpacingNearAlpha) {
  const auto problem = oracle::toy_problem();
  const auto anc = papc::anchor_points(problem, {});
  const double alpha = 0.05;
  for (double rho : {0.2, 0.4, 0.6, 0.8}) {
    const Vector2d a = anc.h1.a + rho * anc.v;
    const auto s0 = papc::solve_sp(problem, {a, kR});
    const Vector2d a1 = papc::apc_step(a, s0.mu, anc.v, alpha, kR);
    const auto s1 = papc::solve_sp(problem, {a1, kR});
    const double d = (problem.objectives(s1.p).vec() - problem.objectives(s0.p).vec()).norm();
    EXPECT_NEAR(d, alpha, 0.3 * alpha) << "rho " << rho;
  }
}

TEST(InSegment, Examples) {
  const Vector2d a1(1, 2), v(3, -1);
  EXPECT_NEAR(*papc::in_segment(a1 + 0.5 * v, a1, v, 1e-9), 0.5, 1e-15);
  EXPECT_FALSE(papc::in_segment(a1 + 1.2 * v, a1, v, 1e-9).has_value());
  EXPECT_EQ(*papc::in_segment(a1, a1, v, 1e-9), 0.0);
  EXPECT_FALSE(papc::in_segment(a1 + 0.5 * v + Vector2d(0.1, 0.3), a1, v, 1e-9).has_value());
}

TEST(ApcConfig, Validation) {
  papc::ApcConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.hyperplane.b = Vector2d(1, -1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.r = Vector2d(0, 1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(RunApc, ToyFrontIsEvenAndNondominated) {
  const auto problem = oracle::toy_problem();
  papc::ApcConfig cfg;
  cfg.alpha = 0.1 * std::sqrt(2.0);
  const auto res = papc::run_apc(problem, cfg);
  const auto& e = res.front.entries;
  EXPECT_GE(e.size(), 10u);
  EXPECT_LE(e.size(), 13u);
  EXPECT_TRUE(papc::is_valid_front(res.front));
  EXPECT_EQ(e.front().f.f2, 0.0);
  EXPECT_NEAR(e.back().f.f1, 0.0, 1e-12);

  // 10^6-point grid; no grid outcome may dominate a front point by more
  // than 1e-9 in both objectives.
  std::vector<double> g1, g2;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double x = double(i) / n;
    g1.push_back(x * x);
    g2.push_back((1 - x) * (1 - x));
  }
  for (const auto& fe : e) {
    EXPECT_LE(fe.solution.kkt_residual, 1e-6);
    bool dominated = false;
    for (int i = 0; i <= n && !dominated; ++i)
      dominated = g1[i] < fe.f.f1 - 1e-9 && g2[i] < fe.f.f2 - 1e-9;
    EXPECT_FALSE(dominated);
  }
}

TEST(RunApc, ReferencePointsStayOnSegment) {
  const auto problem = cell_problem(7);
  const auto res = papc::run_apc(problem, {});
  const auto& anc = res.anchors;
  for (const auto& fe : res.front.entries) {
    EXPECT_NEAR(fe.a(1), 0.0, 1e-12);  // b = (0, 1), beta = 0
    EXPECT_TRUE(papc::in_segment(fe.a, anc.h1.a, anc.v, 1e-9 * anc.v.norm()).has_value());
  }
}

TEST(RunApc, CellFrontMatchesGridStaircase) {
  for (std::uint64_t seed : {7u, 8u}) {
    const auto problem = cell_problem(seed);
    const auto res = papc::run_apc(problem, {});
    ASSERT_TRUE(papc::is_valid_front(res.front));
    std::vector<papc::ObjectivePair> grid;
    for (const auto& g : oracle::grid_outcomes_2d(problem, 201)) grid.push_back(g.f);
    const auto staircase = papc::filter_nondominated(grid);
    EXPECT_LE(oracle::hausdorff(res.front.objective_points(), staircase), 2 * res.alpha) << "seed " << seed;
    int in_band = 0;
    const auto& e = res.front.entries;
    for (std::size_t i = 1; i < e.size(); ++i) {
      const double d = (e[i].f.vec() - e[i - 1].f.vec()).norm();
      in_band += d >= 0.5 * res.alpha && d <= 1.5 * res.alpha;
    }
    EXPECT_GE(in_band, 0.9 * (e.size() - 1));
  }
}

TEST(RunApc, AlternativeHyperplane) {
  const auto problem = oracle::toy_problem();
  papc::ApcConfig cfg;
  cfg.hyperplane = {Vector2d(1, 0), 1.0};
  const auto res = papc::run_apc(problem, cfg);
  EXPECT_TRUE(papc::is_valid_front(res.front));
  EXPECT_GE(res.front.size(), 40u);
  for (const auto& fe : res.front.entries) EXPECT_NEAR(fe.a(0), 1.0, 1e-12);
}

TEST(RunApc, CollapsedFrontIsSinglePoint) {
  const auto res = papc::run_apc(collapsed_problem(), {});
  EXPECT_TRUE(res.anchors.collapsed);
  ASSERT_EQ(res.front.size(), 1u);
  EXPECT_NEAR(res.front.entries[0].p()(0), 0.0, 1e-12);
}

TEST(RunApc, MaxFrontPointsCapsOutput) {
  papc::ApcConfig cfg;
  cfg.max_front_points = 5;
  const auto res = papc::run_apc(oracle::toy_problem(), cfg);
  EXPECT_EQ(res.front.size(), 5u);
  EXPECT_EQ(res.front.entries.front().f.f2, 0.0);
}
