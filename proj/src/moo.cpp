#include "papc/moo.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace papc {

bool dominates(const ObjectivePair& y1, const ObjectivePair& y2) {
  return y1.f1 <= y2.f1 && y1.f2 <= y2.f2 && (y1.f1 < y2.f1 || y1.f2 < y2.f2);
}

std::vector<std::size_t> nondominated_indices(std::span<const ObjectivePair> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.f1 != pb.f1) return pa.f1 < pb.f1;
    if (pa.f2 != pb.f2) return pa.f2 < pb.f2;
    return a < b;
  });

  // Sweep groups of equal f1. Only the head of a group (smallest f2, then
  // smallest index) can survive, and only if no point with smaller f1 has
  // f2 at or below it.
  std::vector<std::size_t> kept;
  double best_f2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && points[order[j]].f1 == points[order[i]].f1) ++j;
    const double head_f2 = points[order[i]].f2;
    if (head_f2 < best_f2) kept.push_back(order[i]);
    best_f2 = std::min(best_f2, head_f2);
    i = j;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<ObjectivePair> filter_nondominated(std::span<const ObjectivePair> points) {
  std::vector<ObjectivePair> out;
  for (std::size_t i : nondominated_indices(points)) out.push_back(points[i]);
  return out;
}

BiObjectiveProblem::BiObjectiveProblem(int dimension, double budget, Callbacks callbacks,
                                       ObjectiveBounds bounds)
    : dimension_(dimension), budget_(budget), callbacks_(std::move(callbacks)), bounds_(bounds) {
  if (dimension_ <= 0) throw std::invalid_argument("problem dimension must be positive");
  if (!(budget_ > 0.0)) throw std::invalid_argument("power budget must be positive");
  if (!callbacks_.objectives || !callbacks_.gradients || !callbacks_.hessians)
    throw std::invalid_argument("problem callbacks must all be set");
}

ObjectivePair BiObjectiveProblem::objectives(const Vector& p) const {
  return callbacks_.objectives(p);
}

std::array<BiObjectiveProblem::Vector, 2> BiObjectiveProblem::gradients(const Vector& p) const {
  return callbacks_.gradients(p);
}

std::array<BiObjectiveProblem::Matrix, 2> BiObjectiveProblem::hessians(const Vector& p) const {
  return callbacks_.hessians(p);
}

BiObjectiveProblem::Vector BiObjectiveProblem::constraints(const Vector& p) const {
  Vector g(dimension_ + 1);
  g.head(dimension_) = p;
  g(dimension_) = budget_ - p.sum();
  return g;
}

BiObjectiveProblem::Matrix BiObjectiveProblem::constraint_jacobian() const {
  Matrix jac = Matrix::Zero(dimension_ + 1, dimension_);
  jac.topRows(dimension_).setIdentity();
  jac.row(dimension_).setConstant(-1.0);
  return jac;
}

}  // namespace papc
