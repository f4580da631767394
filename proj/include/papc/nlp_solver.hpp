#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "papc/moo.hpp"

namespace papc {

/// Reference point a and direction r of the scalarized problem
///   min t  s.t.  a + t r - f(p) >= 0,  g(p) >= 0.
struct SpParameters {
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  Eigen::Vector2d r = Eigen::Vector2d::Ones();

  /// Throws std::invalid_argument unless r >= 0 with r1 > 0 and a finite.
  void validate() const;
};

enum class SolveStatus { kConverged, kMaxIter, kInfeasible };

std::string_view to_string(SolveStatus status);

struct SpSolution {
  double t = 0.0;
  Eigen::VectorXd p;
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();  // cone constraints
  Eigen::VectorXd beta;                          // g_j, j = 0..N
  double kkt_residual = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;
};

struct SolverOptions {
  double kkt_tolerance = 1e-6;
  int max_iterations = 10000;
  /// Constraint value <= active_threshold * scale counts as active when
  /// recovering multipliers; scale = max(1, |a|, budget).
  double active_threshold = 1e-7;
};

/// Cone slacks a + t r - f(p).
Eigen::Vector2d cone_slacks(const BiObjectiveProblem& problem, const SpParameters& params,
                            double t, const Eigen::VectorXd& p);

/// Max of stationarity, primal/dual feasibility and complementarity
/// violations of the KKT system at `candidate`.
double kkt_residual(const BiObjectiveProblem& problem, const SpParameters& params,
                    const SpSolution& candidate);

/// Nonnegative least-squares fit of (mu, beta) to the stationarity system,
/// restricted to constraints that are active at (t, p).
void recover_multipliers(const BiObjectiveProblem& problem, const SpParameters& params,
                         double active_threshold, SpSolution& solution);

/// Solver for SP(a, r) and the single-objective anchor problems. Holds
/// scratch state, so use one instance per thread.
class SpSolver {
 public:
  explicit SpSolver(const BiObjectiveProblem& problem, SolverOptions options = {});

  SpSolution solve(const SpParameters& params,
                   const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

  /// Minimizer of one objective over the power set; throws SolverError
  /// when the iteration budget is exhausted.
  Eigen::VectorXd minimize(Objective which,
                           const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

  const SolverOptions& options() const { return options_; }

 private:
  struct Piece {
    int objective;  // 0 -> f1, 1 -> f2
    double a;
    double r;
  };
  struct Term {
    double c1;
    double c2;
    double offset;
  };
  struct Core;

  const BiObjectiveProblem& problem_;
  SolverOptions options_;
};

SpSolution solve_sp(const BiObjectiveProblem& problem, const SpParameters& params,
                    const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                    const SolverOptions& options = {});

Eigen::VectorXd solve_min_objective(const BiObjectiveProblem& problem, Objective which,
                                    const SolverOptions& options = {});

}  // namespace papc
