#include "papc/apc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "papc/sensitivity.hpp"

namespace papc {

using Eigen::Vector2d;
using Eigen::VectorXd;

void ApcConfig::validate() const {
  if (!(r(0) > 0.0) || r(1) < 0.0) throw std::invalid_argument("r must satisfy r1 > 0, r2 >= 0");
  if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (std::abs(hyperplane.b.dot(r)) == 0.0) throw std::invalid_argument("b'r must be nonzero");
  if (hyperplane.beta != 0.0 && hyperplane.beta != 1.0)
    throw std::invalid_argument("hyperplane offset beta must be 0 or 1");
  if (max_front_points < 2) throw std::invalid_argument("max_front_points must be at least 2");
}

double compute_m1_bound(const BiObjectiveProblem& problem, const Vector2d& r) {
  const ObjectiveBounds& b = problem.bounds();
  return b.f2_upper - b.f1_lower * r(1) / r(0) + 1.0;
}

HyperplanePoint project_to_hyperplane(const ObjectivePair& f, const Hyperplane& hyperplane,
                                      const Vector2d& r) {
  const double denom = hyperplane.b.dot(r);
  if (denom == 0.0) throw std::invalid_argument("b'r must be nonzero");
  HyperplanePoint out;
  out.t = (hyperplane.b.dot(f.vec()) - hyperplane.beta) / denom;
  out.a = f.vec() - out.t * r;
  return out;
}

Anchors anchor_points(const BiObjectiveProblem& problem, const ApcConfig& config) {
  config.validate();
  Anchors out;
  out.m1 = config.m1 ? *config.m1 : compute_m1_bound(problem, config.r);

  SpSolver solver(problem, config.solver);
  out.initial = solver.solve({Vector2d(0.0, out.m1), config.r});
  if (out.initial.status != SolveStatus::kConverged)
    throw SolverError("initial scalarized problem did not converge");
  out.p1 = out.initial.p;
  out.f_1 = problem.objectives(out.p1);
  out.h1 = project_to_hyperplane(out.f_1, config.hyperplane, config.r);

  out.pE = solver.minimize(Objective::kF2);
  out.f_E = problem.objectives(out.pE);
  out.hE = project_to_hyperplane(out.f_E, config.hyperplane, config.r);

  out.v = out.hE.a - out.h1.a;
  const double scale = 1.0 + out.h1.a.norm() + out.hE.a.norm();
  out.collapsed = out.v.norm() <= 1e-12 * scale;
  return out;
}

Vector2d apc_step(const Vector2d& a_l, const Vector2d& mu_l, const Vector2d& v, double alpha,
                  const Vector2d& r) {
  const double denom = (v + (-mu_l.dot(v)) * r).norm();
  if (!(denom > 1e-14 * std::max(1.0, v.norm())))
    throw ZeroDenominatorError("first-order model predicts no movement along the front");
  return a_l + (alpha / denom) * v;
}

std::optional<double> in_segment(const Vector2d& a, const Vector2d& a1, const Vector2d& v,
                                 double tol) {
  const double vv = v.squaredNorm();
  if (!(vv > 0.0)) throw std::invalid_argument("segment direction must be nonzero");
  const Vector2d d = a - a1;
  const double rho = d.dot(v) / vv;
  if ((d - rho * v).norm() > tol) return std::nullopt;
  const double slack = tol / std::sqrt(vv);
  if (rho < -slack || rho > 1.0 + slack) return std::nullopt;
  return std::clamp(rho, 0.0, 1.0);
}

namespace {

// Multipliers fed to the step rule must satisfy mu'r = 1; small drift is
// renormalized, anything else marks the point as unreliable.
bool normalize_mu(Vector2d& mu, const Vector2d& r) {
  const double mr = mu.dot(r);
  if (std::abs(mr - 1.0) > 0.01) return false;
  mu /= mr;
  return true;
}

}  // namespace

ApcResult run_apc(const BiObjectiveProblem& problem, const ApcConfig& config) {
  config.validate();
  ApcResult result;
  result.anchors = anchor_points(problem, config);
  const Anchors& anc = result.anchors;
  const Vector2d& r = config.r;
  SpSolver solver(problem, config.solver);

  auto solve_at_end = [&]() {
    FrontEntry e;
    e.a = anc.hE.a;
    e.solution = solver.solve({anc.hE.a, r}, anc.pE);
    e.f = problem.objectives(e.solution.p);
    return e;
  };

  const double span = (anc.f_1.vec() - anc.f_E.vec()).norm();
  result.alpha = config.alpha ? *config.alpha : span / 50.0;

  if (anc.collapsed || !(result.alpha > 0.0)) {
    result.front.entries.push_back(solve_at_end());
    return result;
  }

  // First front point: the f1 minimizer, re-expressed for SP(a1). Its
  // multipliers carry over from SP((0, M1)).
  FrontEntry first;
  first.a = anc.h1.a;
  first.solution = anc.initial;
  first.solution.t = anc.h1.t;
  first.solution.kkt_residual = kkt_residual(problem, {anc.h1.a, r}, first.solution);
  first.f = anc.f_1;

  std::vector<FrontEntry> trace;
  trace.push_back(first);

  const Vector2d& v = anc.v;
  const double seg_tol = config.segment_tolerance * v.norm();
  FrontEntry current = first;
  Vector2d mu = current.solution.mu;
  normalize_mu(mu, r);

  while (static_cast<int>(trace.size()) + 1 < config.max_front_points) {
    Vector2d a_next;
    int attempts = 0;
    while (true) {
      try {
        a_next = apc_step(current.a, mu, v, result.alpha, r);
        break;
      } catch (const ZeroDenominatorError&) {
        // Refresh the multiplier estimate with a cold solve and retry.
        if (++attempts > 5) throw;
        const SpSolution fresh = solver.solve({current.a, r});
        mu = fresh.mu;
        normalize_mu(mu, r);
      }
    }

    const auto rho = in_segment(a_next, anc.h1.a, v, seg_tol);
    if (!rho || *rho >= 1.0) break;  // overshoot: land exactly on aE below

    const SpParameters params{current.a, r};
    std::optional<VectorXd> warm;
    bool predicted = false;
    if (config.sensitivity_warm_start && current.solution.status == SolveStatus::kConverged) {
      const double scale = std::max({1.0, params.a.cwiseAbs().maxCoeff(), problem.budget()});
      const ActiveSetPartition part = classify_constraints(
          current.solution, params, problem, config.classification_tolerance * scale);
      if (!part.degenerate()) {
        try {
          const auto deriv = solve_sensitivity_system(current.solution, part, v, problem, params);
          const double s = (a_next - current.a).dot(v) / v.squaredNorm();
          warm = predict_solution(current.solution, deriv, s).p;
          predicted = true;
        } catch (const SolverError&) {
          warm.reset();
        }
      }
    }
    if (predicted) {
      ++result.predicted_warm_starts;
    } else {
      ++result.cold_solves;
    }

    FrontEntry next;
    next.a = a_next;
    next.solution = solver.solve({a_next, r}, warm);
    next.f = problem.objectives(next.solution.p);

    Vector2d next_mu = next.solution.mu;
    const bool mu_ok = normalize_mu(next_mu, r);
    if (next.solution.status == SolveStatus::kConverged && mu_ok) {
      trace.push_back(next);
    } else {
      result.rejected.push_back(next);
    }
    current = std::move(next);
    if (mu_ok) mu = next_mu;
  }

  trace.push_back(solve_at_end());

  std::stable_sort(trace.begin(), trace.end(),
                   [](const FrontEntry& x, const FrontEntry& y) { return x.f.f2 < y.f.f2; });
  result.front.entries = std::move(trace);
  return result;
}

}  // namespace papc
