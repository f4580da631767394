#pragma once

#include <vector>

#include <Eigen/Dense>

#include "papc/errors.hpp"
#include "papc/moo.hpp"
#include "papc/nlp_solver.hpp"

namespace papc {

/// Three-way split of the cone constraints (indices 0, 1) and of the
/// power constraints g_j (indices 0..N) at an SP solution:
///   plus  - active with positive multiplier
///   zero  - active with vanishing multiplier (degenerate)
///   minus - inactive
struct ActiveSetPartition {
  std::vector<int> i_plus, i_zero, i_minus;
  std::vector<int> j_plus, j_zero, j_minus;

  bool degenerate() const { return !i_zero.empty() || !j_zero.empty(); }
};

/// Right-hand derivatives of (t, p, mu, beta) along a -> a + s v at s = 0+.
struct SensitivityDerivatives {
  double t_bar = 0.0;
  Eigen::VectorXd p_bar;
  Eigen::Vector2d mu_bar = Eigen::Vector2d::Zero();
  Eigen::VectorXd beta_bar;
};

class DegenerateActiveSetError : public SolverError {
 public:
  using SolverError::SolverError;
};

class SingularSystemError : public SolverError {
 public:
  using SolverError::SolverError;
};

ActiveSetPartition classify_constraints(const SpSolution& solution, const SpParameters& params,
                                        const BiObjectiveProblem& problem, double tol);

/// Solves the linearized KKT system for the derivatives. Only the
/// non-degenerate case is supported; throws DegenerateActiveSetError when
/// the partition has zero sets and SingularSystemError when the linear
/// system is rank deficient.
SensitivityDerivatives solve_sensitivity_system(const SpSolution& solution,
                                                const ActiveSetPartition& partition,
                                                const Eigen::Vector2d& direction,
                                                const BiObjectiveProblem& problem,
                                                const SpParameters& params);

/// Residual (max norm) of the sensitivity equations at `derivatives`.
double sensitivity_residual(const SpSolution& solution, const ActiveSetPartition& partition,
                            const Eigen::Vector2d& direction, const BiObjectiveProblem& problem,
                            const SpParameters& params, const SensitivityDerivatives& derivatives);

struct PredictedSolution {
  double t = 0.0;
  Eigen::VectorXd p;
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
  Eigen::VectorXd beta;
};

/// First-order update base + s * derivatives, with p clamped at zero.
/// Meant for warm starts only.
PredictedSolution predict_solution(const SpSolution& solution,
                                   const SensitivityDerivatives& derivatives, double s);

/// f0 + s v + s (-mu0' v) r: first-order image of the reference-point
/// shift in objective space, using grad tau = -mu0.
ObjectivePair predict_objectives(const ObjectivePair& f0, double s, const Eigen::Vector2d& v,
                                 const Eigen::Vector2d& mu0, const Eigen::Vector2d& r);

}  // namespace papc
