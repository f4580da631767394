#pragma once

#include <Eigen/Dense>

namespace papc {

/// Euclidean projection onto { p >= 0, sum(p) <= budget }.
/// Sort-based, O(N log N), exact up to rounding.
Eigen::VectorXd project_simplex_box(const Eigen::VectorXd& y, double budget);

}  // namespace papc
