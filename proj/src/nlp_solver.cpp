#include "papc/nlp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "papc/errors.hpp"
#include "papc/nnls.hpp"
#include "papc/simplex_box.hpp"

namespace papc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SpParameters::validate() const {
  if (!a.allFinite() || !r.allFinite()) throw std::invalid_argument("SP parameters must be finite");
  if (!(r(0) > 0.0) || r(1) < 0.0)
    throw std::invalid_argument("direction r must satisfy r1 > 0 and r2 >= 0");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

Eigen::Vector2d cone_slacks(const BiObjectiveProblem& problem, const SpParameters& params,
                            double t, const VectorXd& p) {
  return params.a + t * params.r - problem.objectives(p).vec();
}

double kkt_residual(const BiObjectiveProblem& problem, const SpParameters& params,
                    const SpSolution& candidate) {
  const int n = problem.dimension();
  if (candidate.p.size() != n || candidate.beta.size() != n + 1)
    throw std::invalid_argument("kkt_residual: candidate has inconsistent dimensions");

  const auto grads = problem.gradients(candidate.p);
  const VectorXd g = problem.constraints(candidate.p);
  const Eigen::Vector2d slack = cone_slacks(problem, params, candidate.t, candidate.p);
  const Eigen::Vector2d& mu = candidate.mu;
  const VectorXd& beta = candidate.beta;

  const VectorXd stationarity = mu(0) * grads[0] + mu(1) * grads[1] -
                                problem.constraint_jacobian().transpose() * beta;
  double res = std::abs(1.0 - mu.dot(params.r));
  res = std::max(res, stationarity.cwiseAbs().maxCoeff());
  res = std::max(res, (-slack).cwiseMax(0.0).maxCoeff());
  res = std::max(res, (-g).cwiseMax(0.0).maxCoeff());
  res = std::max(res, (-mu).cwiseMax(0.0).maxCoeff());
  res = std::max(res, (-beta).cwiseMax(0.0).maxCoeff());
  res = std::max(res, mu.cwiseProduct(slack).cwiseAbs().maxCoeff());
  res = std::max(res, beta.cwiseProduct(g).cwiseAbs().maxCoeff());
  return res;
}

void recover_multipliers(const BiObjectiveProblem& problem, const SpParameters& params,
                         double active_threshold, SpSolution& solution) {
  const int n = problem.dimension();
  const double scale = std::max({1.0, params.a.cwiseAbs().maxCoeff(), problem.budget()});
  const double threshold = active_threshold * scale;

  const auto grads = problem.gradients(solution.p);
  const VectorXd g = problem.constraints(solution.p);
  const Eigen::Vector2d slack = cone_slacks(problem, params, solution.t, solution.p);
  const MatrixXd jac = problem.constraint_jacobian();

  std::vector<int> cone_cols;
  std::vector<int> g_cols;
  for (int i = 0; i < 2; ++i)
    if (slack(i) <= threshold) cone_cols.push_back(i);
  for (int j = 0; j <= n; ++j)
    if (g(j) <= threshold) g_cols.push_back(j);

  const int cols = static_cast<int>(cone_cols.size() + g_cols.size());
  MatrixXd a = MatrixXd::Zero(n + 1, cols);
  VectorXd b = VectorXd::Zero(n + 1);
  b(n) = 1.0;
  int c = 0;
  for (int i : cone_cols) {
    a.col(c).head(n) = grads[static_cast<std::size_t>(i)];
    a(n, c) = params.r(i);
    ++c;
  }
  for (int j : g_cols) {
    a.col(c).head(n) = -jac.row(j).transpose();
    ++c;
  }

  const VectorXd x = cols > 0 ? solve_nnls(a, b) : VectorXd();
  solution.mu.setZero();
  solution.beta = VectorXd::Zero(n + 1);
  c = 0;
  for (int i : cone_cols) solution.mu(i) = x(c++);
  for (int j : g_cols) solution.beta(j) = x(c++);
}

// ---------------------------------------------------------------------------
// Solver core.
//
// Phase 1 minimizes a soft-max of smooth terms with projected gradient
// steps while annealing the temperature. Phase 2 polishes the result with
// Newton's method on the KKT equations of the active constraints, updating
// the active set until multiplier signs and primal feasibility agree.

struct SpSolver::Core {
  const BiObjectiveProblem& problem;
  std::vector<Piece> pieces;
  std::vector<Term> terms;
  int max_iterations;
  int iterations = 0;
  int n;
  double budget;
  double last_step = 0.0;
  double final_tau = 0.0;

  struct Eval {
    double value = 0.0;
    VectorXd grad;
    std::vector<double> weights;
  };

  struct State {
    VectorXd p;
    double t = 0.0;
    std::vector<double> mu;
    double beta_budget = 0.0;
    std::vector<char> in_cone;
    std::vector<char> at_zero;
    bool budget_active = false;
  };

  Core(const BiObjectiveProblem& prob, std::vector<Piece> pcs, std::vector<Term> tms, int max_iter)
      : problem(prob),
        pieces(std::move(pcs)),
        terms(std::move(tms)),
        max_iterations(max_iter),
        n(prob.dimension()),
        budget(prob.budget()) {}

  static double objective_of(const ObjectivePair& f, int which) { return which == 0 ? f.f1 : f.f2; }

  Eval smooth_max(const VectorXd& p, double tau) const {
    const ObjectivePair f = problem.objectives(p);
    const auto grads = problem.gradients(p);
    std::vector<double> vals(terms.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      vals[k] = terms[k].c1 * f.f1 + terms[k].c2 * f.f2 + terms[k].offset;
      top = std::max(top, vals[k]);
    }
    Eval e;
    e.weights.resize(terms.size());
    double total = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      e.weights[k] = std::exp((vals[k] - top) / tau);
      total += e.weights[k];
    }
    e.value = top + tau * std::log(total);
    e.grad = VectorXd::Zero(n);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      e.weights[k] /= total;
      e.grad += e.weights[k] * (terms[k].c1 * grads[0] + terms[k].c2 * grads[1]);
    }
    return e;
  }

  VectorXd projected_gradient_stage(VectorXd p, double tau, int stage_budget) {
    Eval cur = smooth_max(p, tau);
    if (last_step <= 0.0) last_step = budget / (1.0 + cur.grad.cwiseAbs().maxCoeff()) / n;
    const double step_tol = 1e-12 * budget;
    for (int it = 0; it < stage_budget && iterations < max_iterations; ++it, ++iterations) {
      double step = last_step;
      VectorXd q = project_simplex_box(p - step * cur.grad, budget);
      VectorXd d = q - p;
      if (d.cwiseAbs().maxCoeff() <= step_tol) break;
      Eval next = smooth_max(q, tau);
      int backtracks = 0;
      while (next.value > cur.value + 1e-4 * cur.grad.dot(d) && backtracks < 50) {
        step *= 0.5;
        q = project_simplex_box(p - step * cur.grad, budget);
        d = q - p;
        next = smooth_max(q, tau);
        ++backtracks;
      }
      if (d.cwiseAbs().maxCoeff() <= step_tol) break;
      const VectorXd y = next.grad - cur.grad;
      const double sy = d.dot(y);
      last_step = sy > 0.0 ? d.squaredNorm() / sy : 2.0 * step;
      last_step = std::clamp(last_step, 1e-14 * budget, 1e6 * budget);
      p = std::move(q);
      cur = std::move(next);
    }
    return p;
  }

  VectorXd smooth_phase(VectorXd p) {
    const ObjectivePair f = problem.objectives(p);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Term& term : terms) {
      const double v = term.c1 * f.f1 + term.c2 * f.f2 + term.offset;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double scale = 1.0 + std::abs(hi);
    double tau = std::max(0.1 * (hi - lo), 1e-2 * scale);
    const double tau_min = 1e-8 * scale;
    while (true) {
      p = projected_gradient_stage(std::move(p), tau, 300);
      final_tau = tau;
      if (tau <= tau_min || iterations >= max_iterations) break;
      tau = std::max(0.1 * tau, tau_min);
      if (terms.size() == 1) break;  // single smooth objective, no annealing needed
    }
    return p;
  }

  State initial_state(const VectorXd& p) const {
    State s;
    s.p = p;
    const ObjectivePair f = problem.objectives(p);
    const std::size_t k = pieces.size();
    s.mu.assign(k, 0.0);
    s.in_cone.assign(k, 0);
    s.t = -std::numeric_limits<double>::infinity();
    for (const Piece& pc : pieces)
      if (pc.r > 0.0) s.t = std::max(s.t, (objective_of(f, pc.objective) - pc.a) / pc.r);
    const Eval e = smooth_max(p, std::max(final_tau, 1e-300));
    double scale = 1.0 + std::abs(s.t);
    for (std::size_t i = 0; i < k; ++i) {
      const Piece& pc = pieces[i];
      const double slack = pc.a + s.t * pc.r - objective_of(f, pc.objective);
      if (slack <= 1e-4 * scale) {
        s.in_cone[i] = 1;
        if (pc.r > 0.0 && i < e.weights.size()) s.mu[i] = e.weights[i] / pc.r;
      }
    }
    ensure_t_piece(s);
    s.at_zero.assign(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j)
      if (p(j) <= 1e-14 * budget) {
        s.at_zero[static_cast<std::size_t>(j)] = 1;
        s.p(j) = 0.0;
      }
    s.budget_active = budget - p.sum() <= 1e-10 * budget;
    return s;
  }

  void ensure_t_piece(State& s) const {
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (s.in_cone[i] && pieces[i].r > 0.0) return;
    s.in_cone[0] = 1;
    if (s.mu[0] <= 0.0) s.mu[0] = 1.0 / pieces[0].r;
  }

  // KKT residual of the equality system for the current active set.
  VectorXd equations(const State& s, const ObjectivePair& f, const std::array<VectorXd, 2>& grads,
                     const std::vector<int>& free, const std::vector<int>& cones) const {
    const int nf = static_cast<int>(free.size());
    const int nc = static_cast<int>(cones.size());
    VectorXd e(1 + nf + nc + (s.budget_active ? 1 : 0));
    double mr = 0.0;
    for (int c : cones) mr += s.mu[static_cast<std::size_t>(c)] * pieces[static_cast<std::size_t>(c)].r;
    e(0) = 1.0 - mr;
    for (int k = 0; k < nf; ++k) {
      double v = s.budget_active ? s.beta_budget : 0.0;
      for (int c : cones) {
        const Piece& pc = pieces[static_cast<std::size_t>(c)];
        v += s.mu[static_cast<std::size_t>(c)] * grads[static_cast<std::size_t>(pc.objective)](free[static_cast<std::size_t>(k)]);
      }
      e(1 + k) = v;
    }
    for (int k = 0; k < nc; ++k) {
      const Piece& pc = pieces[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])];
      e(1 + nf + k) = pc.a + s.t * pc.r - objective_of(f, pc.objective);
    }
    if (s.budget_active) e(1 + nf + nc) = budget - s.p.sum();
    return e;
  }

  void index_sets(const State& s, std::vector<int>& free, std::vector<int>& cones) const {
    free.clear();
    cones.clear();
    for (int j = 0; j < n; ++j)
      if (!s.at_zero[static_cast<std::size_t>(j)]) free.push_back(j);
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (s.in_cone[i]) cones.push_back(static_cast<int>(i));
  }

  // Newton iterations for a fixed active set; may grow the zero set or
  // activate the budget when a step would leave the power set.
  bool newton(State& s) {
    std::vector<int> free;
    std::vector<int> cones;
    for (int it = 0; it < 200; ++it) {
      index_sets(s, free, cones);
      const int nf = static_cast<int>(free.size());
      const int nc = static_cast<int>(cones.size());
      const ObjectivePair f = problem.objectives(s.p);
      const auto grads = problem.gradients(s.p);
      const VectorXd e = equations(s, f, grads, free, cones);
      const double scale = 1.0 + std::abs(s.t) + std::abs(f.f1) + std::abs(f.f2);
      if (e.cwiseAbs().maxCoeff() <= 1e-13 * scale) return true;

      const auto hess = problem.hessians(s.p);
      const int dim = static_cast<int>(e.size());
      MatrixXd jac = MatrixXd::Zero(dim, dim);
      const int col_mu = 1 + nf;
      const int col_b = 1 + nf + nc;
      for (int k = 0; k < nc; ++k) jac(0, col_mu + k) = -pieces[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])].r;
      for (int a = 0; a < nf; ++a) {
        const int ja = free[static_cast<std::size_t>(a)];
        for (int k = 0; k < nc; ++k) {
          const Piece& pc = pieces[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])];
          const double mu = s.mu[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])];
          const MatrixXd& h = hess[static_cast<std::size_t>(pc.objective)];
          for (int b = 0; b < nf; ++b) jac(1 + a, 1 + b) += mu * h(ja, free[static_cast<std::size_t>(b)]);
          jac(1 + a, col_mu + k) = grads[static_cast<std::size_t>(pc.objective)](ja);
        }
        if (s.budget_active) jac(1 + a, col_b) = 1.0;
      }
      for (int k = 0; k < nc; ++k) {
        const Piece& pc = pieces[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])];
        jac(1 + nf + k, 0) = pc.r;
        for (int b = 0; b < nf; ++b)
          jac(1 + nf + k, 1 + b) = -grads[static_cast<std::size_t>(pc.objective)](free[static_cast<std::size_t>(b)]);
      }
      if (s.budget_active)
        for (int b = 0; b < nf; ++b) jac(col_b, 1 + b) = -1.0;

      Eigen::FullPivLU<MatrixXd> lu(jac);
      VectorXd delta = lu.isInvertible() ? VectorXd(lu.solve(-e))
                                         : VectorXd(jac.completeOrthogonalDecomposition().solve(-e));
      if (!delta.allFinite()) return false;

      // Ratio test against p >= 0 and the budget.
      double alpha = 1.0;
      int block = -1;
      bool block_budget = false;
      for (int a = 0; a < nf; ++a) {
        const int j = free[static_cast<std::size_t>(a)];
        const double dp = delta(1 + a);
        if (dp < 0.0 && s.p(j) + dp < 0.0) {
          const double step = s.p(j) / -dp;
          if (step < alpha) {
            alpha = step;
            block = j;
          }
        }
      }
      if (!s.budget_active) {
        const double ds = delta.segment(1, nf).sum();
        const double room = budget - s.p.sum();
        if (ds > 0.0 && ds > room) {
          const double step = std::max(room, 0.0) / ds;
          if (step < alpha) {
            alpha = step;
            block = -1;
            block_budget = true;
          }
        }
      }

      auto apply = [&](State& st, double step) {
        st.t += step * delta(0);
        for (int a = 0; a < nf; ++a) st.p(free[static_cast<std::size_t>(a)]) += step * delta(1 + a);
        for (int k = 0; k < nc; ++k) st.mu[static_cast<std::size_t>(cones[static_cast<std::size_t>(k)])] += step * delta(col_mu + k);
        if (st.budget_active) st.beta_budget += step * delta(col_b);
      };

      if (block >= 0 || block_budget) {
        apply(s, alpha);
        for (int a = 0; a < nf; ++a) {
          const int j = free[static_cast<std::size_t>(a)];
          s.p(j) = std::max(s.p(j), 0.0);
        }
        if (block >= 0) {
          s.p(block) = 0.0;
          s.at_zero[static_cast<std::size_t>(block)] = 1;
        } else {
          s.budget_active = true;
          s.beta_budget = 0.0;
        }
        ++iterations;
        continue;
      }

      const double merit = e.squaredNorm();
      State trial = s;
      double step = 1.0;
      for (int halving = 0; halving < 40; ++halving) {
        trial = s;
        apply(trial, step);
        index_sets(trial, free, cones);
        const VectorXd et = equations(trial, problem.objectives(trial.p), problem.gradients(trial.p),
                                      free, cones);
        if (et.squaredNorm() <= (1.0 - 1e-4 * step) * merit) break;
        step *= 0.5;
      }
      s = std::move(trial);
      ++iterations;
    }
    return false;
  }

  // Returns true when the active set is optimal; otherwise changes it.
  bool update_active_set(State& s) const {
    const ObjectivePair f = problem.objectives(s.p);
    const auto grads = problem.gradients(s.p);
    const double scale = 1.0 + std::abs(s.t) + std::abs(f.f1) + std::abs(f.f2);
    const double dual_tol = 1e-10 * (1.0 + grads[0].cwiseAbs().maxCoeff() + grads[1].cwiseAbs().maxCoeff());
    const double primal_tol = 1e-11 * scale;

    enum class Action { kNone, kDropCone, kAddCone, kFree, kDropBudget, kAddBudget };
    Action action = Action::kNone;
    int which = -1;
    double worst = 0.0;

    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Piece& pc = pieces[i];
      if (s.in_cone[i]) {
        if (-s.mu[i] > dual_tol && -s.mu[i] > worst) {
          worst = -s.mu[i];
          action = Action::kDropCone;
          which = static_cast<int>(i);
        }
      } else {
        const double slack = pc.a + s.t * pc.r - objective_of(f, pc.objective);
        if (-slack > primal_tol && -slack > worst) {
          worst = -slack;
          action = Action::kAddCone;
          which = static_cast<int>(i);
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      if (!s.at_zero[static_cast<std::size_t>(j)]) continue;
      double beta = s.budget_active ? s.beta_budget : 0.0;
      for (std::size_t i = 0; i < pieces.size(); ++i)
        if (s.in_cone[i]) beta += s.mu[i] * grads[static_cast<std::size_t>(pieces[i].objective)](j);
      if (-beta > dual_tol && -beta > worst) {
        worst = -beta;
        action = Action::kFree;
        which = j;
      }
    }
    if (s.budget_active) {
      if (-s.beta_budget > dual_tol && -s.beta_budget > worst) {
        worst = -s.beta_budget;
        action = Action::kDropBudget;
      }
    } else {
      const double excess = s.p.sum() - budget;
      if (excess > primal_tol && excess > worst) {
        worst = excess;
        action = Action::kAddBudget;
      }
    }

    switch (action) {
      case Action::kNone: return true;
      case Action::kDropCone:
        s.in_cone[static_cast<std::size_t>(which)] = 0;
        s.mu[static_cast<std::size_t>(which)] = 0.0;
        break;
      case Action::kAddCone:
        s.in_cone[static_cast<std::size_t>(which)] = 1;
        s.mu[static_cast<std::size_t>(which)] = 0.0;
        break;
      case Action::kFree: s.at_zero[static_cast<std::size_t>(which)] = 0; break;
      case Action::kDropBudget:
        s.budget_active = false;
        s.beta_budget = 0.0;
        break;
      case Action::kAddBudget:
        s.budget_active = true;
        s.beta_budget = 0.0;
        break;
    }
    return false;
  }

  bool polish(State& s) {
    const int max_changes = 4 * n + 40;
    for (int change = 0; change < max_changes; ++change) {
      if (!newton(s)) return false;
      if (update_active_set(s)) return true;
    }
    return false;
  }

  // Runs both phases, retrying from a longer smoothing run if the polish
  // fails. Returns the polished state and whether it succeeded.
  std::pair<State, bool> run(VectorXd start) {
    VectorXd p = project_simplex_box(start, budget);
    State best;
    for (int attempt = 0; attempt < 3; ++attempt) {
      p = smooth_phase(std::move(p));
      State s = initial_state(p);
      if (polish(s)) return {std::move(s), true};
      best = initial_state(p);
      if (iterations >= max_iterations) break;
    }
    return {std::move(best), false};
  }
};

SpSolver::SpSolver(const BiObjectiveProblem& problem, SolverOptions options)
    : problem_(problem), options_(options) {}

SpSolution SpSolver::solve(const SpParameters& params, const std::optional<VectorXd>& warm_start) {
  params.validate();
  const int n = problem_.dimension();
  if (warm_start && warm_start->size() != n)
    throw std::invalid_argument("warm start has the wrong dimension");

  std::vector<Piece> pieces = {{0, params.a(0), params.r(0)}, {1, params.a(1), params.r(1)}};
  std::vector<Term> terms;
  terms.push_back({1.0 / params.r(0), 0.0, -params.a(0) / params.r(0)});
  if (params.r(1) > 0.0) {
    terms.push_back({0.0, 1.0 / params.r(1), -params.a(1) / params.r(1)});
  } else {
    // Exact penalty for f2 <= a2: max(h1, h1 + rho (f2 - a2)).
    const double rho = 100.0 / params.r(0);
    terms.push_back({1.0 / params.r(0), rho, -params.a(0) / params.r(0) - rho * params.a(1)});
  }

  Core core(problem_, std::move(pieces), std::move(terms), options_.max_iterations);
  const VectorXd start = warm_start ? *warm_start : VectorXd::Constant(n, problem_.budget() / (2.0 * n));
  auto [state, polished] = core.run(start);

  SpSolution sol;
  sol.p = state.p.cwiseMax(0.0);
  const ObjectivePair f = problem_.objectives(sol.p);
  if (params.r(1) > 0.0) {
    sol.t = std::max((f.f1 - params.a(0)) / params.r(0), (f.f2 - params.a(1)) / params.r(1));
  } else {
    sol.t = (f.f1 - params.a(0)) / params.r(0);
  }
  recover_multipliers(problem_, params, options_.active_threshold, sol);
  sol.kkt_residual = kkt_residual(problem_, params, sol);
  sol.iterations = core.iterations;

  const Eigen::Vector2d slack = cone_slacks(problem_, params, sol.t, sol.p);
  const double scale = std::max({1.0, params.a.cwiseAbs().maxCoeff(), problem_.budget()});
  if (slack.minCoeff() < -options_.kkt_tolerance * scale) {
    sol.status = SolveStatus::kInfeasible;
  } else if (!polished || sol.kkt_residual > options_.kkt_tolerance) {
    sol.status = SolveStatus::kMaxIter;
  } else {
    sol.status = SolveStatus::kConverged;
  }
  return sol;
}

VectorXd SpSolver::minimize(Objective which, const std::optional<VectorXd>& warm_start) {
  const int n = problem_.dimension();
  const int k = static_cast<int>(which);
  std::vector<Piece> pieces = {{k, 0.0, 1.0}};
  std::vector<Term> terms = {{k == 0 ? 1.0 : 0.0, k == 1 ? 1.0 : 0.0, 0.0}};
  Core core(problem_, std::move(pieces), std::move(terms), options_.max_iterations);
  const VectorXd start = warm_start ? *warm_start : VectorXd::Constant(n, problem_.budget() / (2.0 * n));
  auto [state, polished] = core.run(start);
  if (!polished) throw SolverError("single-objective minimization did not converge");
  return state.p.cwiseMax(0.0);
}

SpSolution solve_sp(const BiObjectiveProblem& problem, const SpParameters& params,
                    const std::optional<VectorXd>& warm_start, const SolverOptions& options) {
  SpSolver solver(problem, options);
  return solver.solve(params, warm_start);
}

VectorXd solve_min_objective(const BiObjectiveProblem& problem, Objective which,
                             const SolverOptions& options) {
  SpSolver solver(problem, options);
  return solver.minimize(which);
}

}  // namespace papc
