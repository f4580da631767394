#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace papc {

/// Objective vector of the per-BS bi-objective problem. Both components
/// are minimized: f1 is the negated throughput contribution, f2 the
/// total transmit power.
struct ObjectivePair {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;

  Eigen::Vector2d vec() const { return {f1, f2}; }
  double operator[](int i) const { return i == 0 ? f1 : f2; }
};

/// y1 dominates y2 w.r.t. the nonnegative orthant: y1 <= y2 componentwise
/// and y1 != y2. Exact comparison, no tolerance.
bool dominates(const ObjectivePair& y1, const ObjectivePair& y2);

/// Points not dominated by any other input. Survivors keep input order;
/// exact duplicates are kept once (first occurrence).
std::vector<ObjectivePair> filter_nondominated(std::span<const ObjectivePair> points);

/// Indices (into `points`) of the survivors of filter_nondominated.
std::vector<std::size_t> nondominated_indices(std::span<const ObjectivePair> points);

/// Which objective a single-objective query refers to.
enum class Objective { kF1 = 0, kF2 = 1 };

/// Certified bounds used to place the initial reference point of the
/// front tracer: f1 >= f1_lower and f2 <= f2_upper on the feasible set.
struct ObjectiveBounds {
  double f1_lower = 0.0;
  double f2_upper = 0.0;
};

/// Smooth bi-objective problem over the power set
///   D = { p in R^N : p >= 0, sum(p) <= budget }.
/// The constraint vector has N + 1 entries: g_n(p) = p_n for n < N and
/// g_N(p) = budget - sum(p).
class BiObjectiveProblem {
 public:
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;

  struct Callbacks {
    std::function<ObjectivePair(const Vector&)> objectives;
    std::function<std::array<Vector, 2>(const Vector&)> gradients;
    std::function<std::array<Matrix, 2>(const Vector&)> hessians;
  };

  BiObjectiveProblem(int dimension, double budget, Callbacks callbacks,
                     ObjectiveBounds bounds);

  int dimension() const { return dimension_; }
  int num_constraints() const { return dimension_ + 1; }
  double budget() const { return budget_; }
  const ObjectiveBounds& bounds() const { return bounds_; }

  ObjectivePair objectives(const Vector& p) const;
  std::array<Vector, 2> gradients(const Vector& p) const;
  std::array<Matrix, 2> hessians(const Vector& p) const;

  Vector constraints(const Vector& p) const;
  /// Row j is the gradient of g_j; constant because g is affine.
  Matrix constraint_jacobian() const;

 private:
  int dimension_;
  double budget_;
  Callbacks callbacks_;
  ObjectiveBounds bounds_;
};

}  // namespace papc
