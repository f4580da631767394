#include "papc/front.hpp"

#include <algorithm>
#include <limits>

namespace papc {

std::vector<ObjectivePair> ParetoFront::objective_points() const {
  std::vector<ObjectivePair> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.f);
  return out;
}

bool is_valid_front(const ParetoFront& front) {
  const auto points = front.objective_points();
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].f2 > points[i - 1].f2)) return false;
  return filter_nondominated(points) == points;
}

double distance_to_front(const ParetoFront& front, const ObjectivePair& y) {
  const auto points = front.objective_points();
  if (points.empty()) return std::numeric_limits<double>::infinity();
  const Eigen::Vector2d q = y.vec();
  double best = (q - points.front().vec()).norm();
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Eigen::Vector2d a = points[i - 1].vec();
    const Eigen::Vector2d d = points[i].vec() - a;
    const double len2 = d.squaredNorm();
    const double u = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (q - (a + u * d)).norm());
  }
  return best;
}

}  // namespace papc
