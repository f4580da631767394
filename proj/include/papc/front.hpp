#pragma once

#include <vector>

#include <Eigen/Dense>

#include "papc/moo.hpp"
#include "papc/nlp_solver.hpp"

namespace papc {

/// One efficient point together with the scalarization that produced it.
struct FrontEntry {
  ObjectivePair f;
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  SpSolution solution;  // solution.p is the decision vector

  const Eigen::VectorXd& p() const { return solution.p; }
};

/// Approximation of the efficient set, sorted by ascending f2.
struct ParetoFront {
  std::vector<FrontEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  std::vector<ObjectivePair> objective_points() const;
};

/// Entries are mutually nondominated and f2 is strictly increasing.
bool is_valid_front(const ParetoFront& front);

/// Euclidean distance from y to the polyline through the front points.
double distance_to_front(const ParetoFront& front, const ObjectivePair& y);

}  // namespace papc
