#include "papc/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace papc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ActiveSetPartition classify_constraints(const SpSolution& solution, const SpParameters& params,
                                        const BiObjectiveProblem& problem, double tol) {
  ActiveSetPartition part;
  const Eigen::Vector2d slack = cone_slacks(problem, params, solution.t, solution.p);
  for (int i = 0; i < 2; ++i) {
    if (slack(i) > tol) {
      part.i_minus.push_back(i);
    } else if (solution.mu(i) > tol) {
      part.i_plus.push_back(i);
    } else {
      part.i_zero.push_back(i);
    }
  }
  const VectorXd g = problem.constraints(solution.p);
  for (int j = 0; j < g.size(); ++j) {
    if (g(j) > tol) {
      part.j_minus.push_back(j);
    } else if (solution.beta(j) > tol) {
      part.j_plus.push_back(j);
    } else {
      part.j_zero.push_back(j);
    }
  }
  return part;
}

namespace {

struct LinearSystem {
  MatrixXd lhs;
  VectorXd rhs;
};

// Unknown layout: [t_bar, p_bar (N), mu_bar (2), beta_bar (N+1)].
LinearSystem assemble(const SpSolution& solution, const ActiveSetPartition& partition,
                      const Eigen::Vector2d& v, const BiObjectiveProblem& problem,
                      const SpParameters& params) {
  const int n = problem.dimension();
  const int dim = 2 * n + 4;
  const int col_p = 1;
  const int col_mu = 1 + n;
  const int col_beta = 3 + n;

  const auto grads = problem.gradients(solution.p);
  const auto hess = problem.hessians(solution.p);
  const MatrixXd jac = problem.constraint_jacobian();

  LinearSystem sys{MatrixXd::Zero(dim, dim), VectorXd::Zero(dim)};
  int row = 0;
  sys.lhs(row, col_mu) = params.r(0);
  sys.lhs(row, col_mu + 1) = params.r(1);
  ++row;

  // g is affine, so only the objective Hessians enter.
  sys.lhs.block(row, col_p, n, n) = solution.mu(0) * hess[0] + solution.mu(1) * hess[1];
  sys.lhs.block(row, col_mu, n, 1) = grads[0];
  sys.lhs.block(row, col_mu + 1, n, 1) = grads[1];
  sys.lhs.block(row, col_beta, n, n + 1) = -jac.transpose();
  row += n;

  for (int i : partition.i_plus) {
    sys.lhs(row, 0) = params.r(i);
    sys.lhs.block(row, col_p, 1, n) = -grads[static_cast<std::size_t>(i)].transpose();
    sys.rhs(row) = -v(i);
    ++row;
  }
  for (int i : partition.i_minus) {
    sys.lhs(row, col_mu + i) = 1.0;
    ++row;
  }
  for (int j : partition.j_plus) {
    sys.lhs.block(row, col_p, 1, n) = jac.row(j);
    ++row;
  }
  for (int j : partition.j_minus) {
    sys.lhs(row, col_beta + j) = 1.0;
    ++row;
  }
  if (row != dim) throw std::logic_error("sensitivity system is not square");
  return sys;
}

}  // namespace

SensitivityDerivatives solve_sensitivity_system(const SpSolution& solution,
                                                const ActiveSetPartition& partition,
                                                const Eigen::Vector2d& direction,
                                                const BiObjectiveProblem& problem,
                                                const SpParameters& params) {
  if (partition.degenerate())
    throw DegenerateActiveSetError("sensitivity system needs a non-degenerate active set");
  const int n = problem.dimension();
  const LinearSystem sys = assemble(solution, partition, direction, problem, params);
  Eigen::FullPivLU<MatrixXd> lu(sys.lhs);
  if (!lu.isInvertible()) throw SingularSystemError("sensitivity system is singular");
  const VectorXd x = lu.solve(sys.rhs);

  SensitivityDerivatives d;
  d.t_bar = x(0);
  d.p_bar = x.segment(1, n);
  d.mu_bar = x.segment(1 + n, 2);
  d.beta_bar = x.segment(3 + n, n + 1);
  return d;
}

double sensitivity_residual(const SpSolution& solution, const ActiveSetPartition& partition,
                            const Eigen::Vector2d& direction, const BiObjectiveProblem& problem,
                            const SpParameters& params, const SensitivityDerivatives& derivatives) {
  const int n = problem.dimension();
  const LinearSystem sys = assemble(solution, partition, direction, problem, params);
  VectorXd x(2 * n + 4);
  x << derivatives.t_bar, derivatives.p_bar, derivatives.mu_bar, derivatives.beta_bar;
  return (sys.lhs * x - sys.rhs).cwiseAbs().maxCoeff();
}

PredictedSolution predict_solution(const SpSolution& solution,
                                   const SensitivityDerivatives& derivatives, double s) {
  PredictedSolution out;
  out.t = solution.t + s * derivatives.t_bar;
  out.p = (solution.p + s * derivatives.p_bar).cwiseMax(0.0);
  out.mu = solution.mu + s * derivatives.mu_bar;
  out.beta = solution.beta + s * derivatives.beta_bar;
  return out;
}

ObjectivePair predict_objectives(const ObjectivePair& f0, double s, const Eigen::Vector2d& v,
                                 const Eigen::Vector2d& mu0, const Eigen::Vector2d& r) {
  const Eigen::Vector2d f = f0.vec() + s * v + s * (-mu0.dot(v)) * r;
  return {f(0), f(1)};
}

}  // namespace papc
