#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "papc/errors.hpp"
#include "papc/front.hpp"
#include "papc/moo.hpp"
#include "papc/nlp_solver.hpp"

namespace papc {

/// { y : b'y = beta }. Reference points of the front tracer live on it.
struct Hyperplane {
  Eigen::Vector2d b{0.0, 1.0};
  double beta = 0.0;
};

struct ApcConfig {
  Eigen::Vector2d r{1.0, 1.0};
  /// Target spacing of consecutive front points in objective space.
  /// Unset means |f(p1) - f(pE)| / 50.
  std::optional<double> alpha;
  Hyperplane hyperplane;
  /// Second coordinate of the initial reference point (0, m1). Unset
  /// means compute_m1_bound().
  std::optional<double> m1;
  SolverOptions solver;
  int max_front_points = 1000;
  /// Orthogonal-distance tolerance of the segment test, relative to |v|.
  double segment_tolerance = 1e-9;
  /// Threshold on constraint values and multipliers for classifying the
  /// active set, relative to max(1, |a|, budget).
  double classification_tolerance = 1e-7;
  bool sensitivity_warm_start = true;

  void validate() const;
};

class ZeroDenominatorError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Bound M1 > max f2 - min f1 * r2 / r1 over the feasible set, from the
/// problem's certified objective bounds (plus a unit margin).
double compute_m1_bound(const BiObjectiveProblem& problem, const Eigen::Vector2d& r);

struct HyperplanePoint {
  double t = 0.0;
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
};

/// t = (b'f - beta) / (b'r), a = f - t r, so that b'a = beta and
/// a + t r = f.
HyperplanePoint project_to_hyperplane(const ObjectivePair& f, const Hyperplane& hyperplane,
                                      const Eigen::Vector2d& r);

struct Anchors {
  double m1 = 0.0;
  SpSolution initial;  // solution of SP((0, m1), r)
  Eigen::VectorXd p1;  // minimizer of f1
  Eigen::VectorXd pE;  // minimizer of f2
  ObjectivePair f_1;
  ObjectivePair f_E;
  HyperplanePoint h1;
  HyperplanePoint hE;
  Eigen::Vector2d v = Eigen::Vector2d::Zero();  // aE - a1
  bool collapsed = false;
};

Anchors anchor_points(const BiObjectiveProblem& problem, const ApcConfig& config);

/// a_l + alpha / |v + (-mu'v) r| * v. Throws ZeroDenominatorError when the
/// first-order model predicts no movement in objective space.
Eigen::Vector2d apc_step(const Eigen::Vector2d& a_l, const Eigen::Vector2d& mu_l,
                         const Eigen::Vector2d& v, double alpha, const Eigen::Vector2d& r);

/// rho in [0, 1] with a = a1 + rho v, if a lies on the segment within
/// `tol` (absolute orthogonal distance). Empty otherwise.
std::optional<double> in_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& a1,
                                 const Eigen::Vector2d& v, double tol);

struct ApcResult {
  ParetoFront front;
  std::vector<FrontEntry> rejected;  // solver failures, kept out of the front
  Anchors anchors;
  double alpha = 0.0;
  int predicted_warm_starts = 0;
  int cold_solves = 0;
};

ApcResult run_apc(const BiObjectiveProblem& problem, const ApcConfig& config = {});

}  // namespace papc
