#include <gtest/gtest.h>

#include "oracles.hpp"
#include "papc/commands.hpp"
#include "papc/nlp_solver.hpp"

using Eigen::Vector2d;
using Eigen::VectorXd;
using papc::SolveStatus;
using papc::SpParameters;

namespace {

double minimax(const papc::BiObjectiveProblem& problem, const SpParameters& params, const VectorXd& p) {
  const papc::ObjectivePair f = problem.objectives(p);
  return std::max((f.f1 - params.a(0)) / params.r(0), (f.f2 - params.a(1)) / params.r(1));
}

struct SmallCell {
  papc::Scenario scenario = oracle::small_scenario(7);
  papc::BsContext ctx{scenario, 0, 30.0};
  papc::BiObjectiveProblem problem = ctx.problem();
};

}  // namespace

TEST(SpSolver, ToyProblemAnalyticSolution) {
  const auto problem = oracle::toy_problem();
  const auto s = papc::solve_sp(problem, {Vector2d(0, 0), Vector2d(1, 1)});
  EXPECT_EQ(s.status, SolveStatus::kConverged);
  EXPECT_NEAR(s.t, 0.25, 1e-9);
  EXPECT_NEAR(s.p(0), 0.5, 1e-9);
  EXPECT_NEAR(s.mu(0), 0.5, 1e-9);
  EXPECT_NEAR(s.mu(1), 0.5, 1e-9);
  EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(SpSolver, ToyProblemMatchesDenseGrid) {
  const auto problem = oracle::toy_problem();
  for (const Vector2d a : {Vector2d(0, 0), Vector2d(-0.3, 0.2), Vector2d(0.1, -0.5), Vector2d(0.6, 0.0)}) {
    const SpParameters params{a, Vector2d(1, 1)};
    const auto s = papc::solve_sp(problem, params);
    const double pg = oracle::grid_minimize_1d(
        [&](double x) { return minimax(problem, params, VectorXd::Constant(1, x)); }, 1.0);
    EXPECT_NEAR(s.p(0), pg, 1e-5);
    EXPECT_LE(s.t, minimax(problem, params, VectorXd::Constant(1, pg)) + 1e-9);
  }
}

TEST(SpSolver, ReferencePointOnFrontGivesZeroT) {
  const auto problem = oracle::toy_problem();
  for (double x : {0.2, 0.5, 0.8}) {
    const VectorXd p = VectorXd::Constant(1, x);
    const auto s = papc::solve_sp(problem, {problem.objectives(p).vec(), Vector2d(1, 1)});
    EXPECT_NEAR(s.t, 0.0, 1e-9);
    EXPECT_NEAR(s.p(0), x, 1e-6);
  }
}

TEST(SpSolver, EpsilonConstraintCaseWithZeroSecondDirection) {
  // r2 = 0: minimize f1 subject to f2 <= a2.
  const auto problem = oracle::toy_problem();
  const auto s = papc::solve_sp(problem, {Vector2d(0, 0.25), Vector2d(1, 0)});
  EXPECT_EQ(s.status, SolveStatus::kConverged);
  EXPECT_NEAR(s.p(0), 0.5, 1e-7);
  EXPECT_NEAR(s.t, 0.25, 1e-7);
  EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(SpSolver, BudgetBindingMultiplier) {
  const auto problem = oracle::toy_problem(0.4);
  const auto s = papc::solve_sp(problem, {Vector2d(0, 0), Vector2d(1, 1)});
  EXPECT_NEAR(s.p(0), 0.4, 1e-9);
  EXPECT_NEAR(s.t, 0.36, 1e-9);
  EXPECT_NEAR(s.mu(0), 0.0, 1e-9);
  EXPECT_NEAR(s.mu(1), 1.0, 1e-9);
  // Stationarity: mu2 * f2'(0.4) + beta_budget = 0 -> beta = 1.2.
  EXPECT_NEAR(s.beta(1), 1.2, 1e-8);
  EXPECT_LE(s.kkt_residual, 1e-6);
}

TEST(SpParameters, RejectsInvalidDirection) {
  EXPECT_THROW((SpParameters{Vector2d(0, 0), Vector2d(0, 1)}.validate()), std::invalid_argument);
  EXPECT_THROW((SpParameters{Vector2d(0, 0), Vector2d(1, -1)}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((SpParameters{Vector2d(0, 0), Vector2d(1, 0)}.validate()));
}

TEST(KktResidual, ExactToySolutionIsTiny) {
  const auto problem = oracle::toy_problem();
  papc::SpSolution c;
  c.t = 0.25;
  c.p = VectorXd::Constant(1, 0.5);
  c.mu = Vector2d(0.5, 0.5);
  c.beta = VectorXd::Zero(2);
  EXPECT_LE(papc::kkt_residual(problem, {Vector2d(0, 0), Vector2d(1, 1)}, c), 1e-8);
}

TEST(KktResidual, ZeroMultipliersViolateNormalization) {
  const auto problem = oracle::toy_problem();
  papc::SpSolution c;
  c.t = 0.25;
  c.p = VectorXd::Constant(1, 0.5);
  c.mu = Vector2d::Zero();
  c.beta = VectorXd::Zero(2);
  EXPECT_GE(papc::kkt_residual(problem, {Vector2d(0, 0), Vector2d(1, 1)}, c), 1.0);
}

TEST(MinObjective, ToyAnchors) {
  const auto problem = oracle::toy_problem();
  EXPECT_NEAR(papc::solve_min_objective(problem, papc::Objective::kF1)(0), 0.0, 1e-9);
  EXPECT_NEAR(papc::solve_min_objective(problem, papc::Objective::kF2)(0), 1.0, 1e-9);
}

TEST(MinObjective, PowerMinimizerIsZero) {
  SmallCell cell;
  const VectorXd p = papc::solve_min_objective(cell.problem, papc::Objective::kF2);
  EXPECT_EQ(p, VectorXd::Zero(2));
}

TEST(MinObjective, CellThroughputMaximizerMatchesGrid) {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    const auto sc = oracle::small_scenario(seed);
    const papc::BsContext ctx(sc, 0, 30.0);
    const auto problem = ctx.problem();
    const VectorXd p = papc::solve_min_objective(problem, papc::Objective::kF1);
    const VectorXd q = oracle::grid_minimize_2d(
        [&](const VectorXd& x) { return problem.objectives(x).f1; }, problem.budget());
    EXPECT_NEAR(problem.objectives(p).f1, problem.objectives(q).f1, 1e-3) << "seed " << seed;
    EXPECT_LE(problem.objectives(p).f1, problem.objectives(q).f1 + 1e-12);
  }
}

TEST(SpSolver, CellInstanceMatchesGridMinimaxOracle) {
  SmallCell cell;
  const auto& problem = cell.problem;
  const double f1_min = problem.objectives(papc::solve_min_objective(problem, papc::Objective::kF1)).f1;
  for (double rho : {0.0, 0.1, 0.35, 0.6, 0.9, 1.0}) {
    const SpParameters params{Vector2d(rho * 0.0 + (1 - rho) * f1_min, 0.0), Vector2d(1, 1)};
    const auto s = papc::solve_sp(problem, params);
    EXPECT_EQ(s.status, SolveStatus::kConverged);
    EXPECT_LE(s.kkt_residual, 1e-6);
    EXPECT_GE(s.mu.minCoeff(), 0.0);
    EXPECT_GE(s.beta.minCoeff(), 0.0);
    EXPECT_NEAR(s.mu.dot(params.r), 1.0, 1e-6);
    const auto oracle_sol = oracle::grid_minimax_2d(problem, params.a, params.r);
    const double tq = oracle_sol.t;
    const VectorXd q = oracle_sol.p;
    EXPECT_NEAR(s.t, tq, 1e-3) << "rho " << rho;
    EXPECT_LE(s.t, tq + 1e-9) << "rho " << rho;
    EXPECT_NEAR((s.p - q).norm(), 0.0, 1e-3) << "rho " << rho;
  }
}

TEST(SpSolver, InteriorFrontPointsHavePositiveConeMultipliers) {
  SmallCell cell;
  const auto& problem = cell.problem;
  const double f1_min = problem.objectives(papc::solve_min_objective(problem, papc::Objective::kF1)).f1;
  for (double rho : {0.2, 0.5, 0.8}) {
    const auto s = papc::solve_sp(problem, {Vector2d(rho * f1_min, 0.0), Vector2d(1, 1)});
    EXPECT_GT(s.mu(0), 0.0);
    EXPECT_GT(s.mu(1), 0.0);
  }
}

TEST(SpSolver, ValueFunctionGradientIsMinusMu) {
  SmallCell cell;
  const auto& problem = cell.problem;
  const double f1_min = problem.objectives(papc::solve_min_objective(problem, papc::Objective::kF1)).f1;
  for (double rho : {0.25, 0.5, 0.75}) {
    const Vector2d a(rho * f1_min, 0.0);
    const auto s = papc::solve_sp(problem, {a, Vector2d(1, 1)});
    const double h = 1e-5 * (1.0 + std::abs(f1_min));
    Vector2d fd;
    for (int i = 0; i < 2; ++i) {
      Vector2d ap = a, am = a;
      ap(i) += h;
      am(i) -= h;
      fd(i) = (papc::solve_sp(problem, {ap, Vector2d(1, 1)}).t - papc::solve_sp(problem, {am, Vector2d(1, 1)}).t) /
              (2 * h);
    }
    EXPECT_LE((fd + s.mu).norm(), 1e-3 * s.mu.norm()) << "rho " << rho;
  }
}

TEST(SpSolver, WarmStartReachesSameSolution) {
  SmallCell cell;
  const auto& problem = cell.problem;
  const SpParameters params{Vector2d(-3.0, 0.0), Vector2d(1, 1)};
  const auto cold = papc::solve_sp(problem, params);
  const auto warm = papc::solve_sp(problem, params, VectorXd::Constant(2, 7.0));
  EXPECT_NEAR((cold.p - warm.p).norm(), 0.0, 1e-7);
  EXPECT_NEAR(cold.t, warm.t, 1e-9);
}

TEST(SpSolver, FullScenarioReachesTolerance) {
  const papc::Scenario sc = papc::generate_scenario({}, 7);
  const papc::BsContext ctx(sc, 0, 30.0);
  const auto problem = ctx.problem();
  papc::SpSolver solver(problem);
  const double f1_min = problem.objectives(solver.minimize(papc::Objective::kF1)).f1;
  for (double rho : {0.05, 0.5, 0.95}) {
    const auto s = solver.solve({Vector2d(rho * f1_min, 0.0), Vector2d(1, 1)});
    EXPECT_EQ(s.status, SolveStatus::kConverged);
    EXPECT_LE(s.kkt_residual, 1e-6);
  }
}
