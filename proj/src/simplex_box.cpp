#include "papc/simplex_box.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace papc {

Eigen::VectorXd project_simplex_box(const Eigen::VectorXd& y, double budget) {
  Eigen::VectorXd clipped = y.cwiseMax(0.0);
  if (clipped.sum() <= budget) return clipped;

  // Budget is active: project onto the scaled simplex sum(p) = budget.
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - budget) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (y.array() - theta).cwiseMax(0.0).matrix();
}

}  // namespace papc
