#include "papc/water_filling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace papc {

using Eigen::VectorXd;

VectorXd water_filling(const VectorXd& c, double budget) {
  if (budget < 0.0) throw std::invalid_argument("water_filling: negative budget");
  const Eigen::Index n = c.size();
  VectorXd p = VectorXd::Zero(n);
  if (budget == 0.0) return p;

  std::vector<Eigen::Index> usable;
  for (Eigen::Index i = 0; i < n; ++i)
    if (c(i) > 0.0) usable.push_back(i);
  if (usable.empty()) return p;
  std::sort(usable.begin(), usable.end(),
            [&](Eigen::Index a, Eigen::Index b) { return 1.0 / c(a) < 1.0 / c(b); });

  // Largest k whose level (budget + sum of the k lowest floors) / k stays
  // above the k-th floor.
  double floor_sum = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    const double floor_k = 1.0 / c(usable[k]);
    const double candidate = (budget + floor_sum + floor_k) / static_cast<double>(k + 1);
    if (candidate <= floor_k) break;
    floor_sum += floor_k;
    level = candidate;
  }
  for (Eigen::Index i : usable) p(i) = std::max(0.0, level - 1.0 / c(i));
  return p;
}

VectorXd priced_water_filling(const VectorXd& c, const VectorXd& d, double budget) {
  if (c.size() != d.size()) throw std::invalid_argument("priced_water_filling: size mismatch");
  if ((d.array() == 0.0).all()) return water_filling(c, budget);
  if (budget < 0.0) throw std::invalid_argument("priced_water_filling: negative budget");

  const double inv_ln2 = 1.0 / std::numbers::ln2;
  auto alloc = [&](double lambda) {
    VectorXd p = VectorXd::Zero(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c(i) <= 0.0) continue;
      const double denom = d(i) + lambda;
      if (denom <= 0.0) {
        p(i) = std::numeric_limits<double>::infinity();
      } else {
        p(i) = std::max(0.0, inv_ln2 / denom - 1.0 / c(i));
      }
    }
    return p;
  };

  VectorXd p0 = alloc(0.0);
  if (p0.allFinite() && p0.sum() <= budget) return p0;

  // sum(alloc(lambda)) is nonincreasing and vanishes at max(c) / ln2.
  double lo = 0.0;
  double hi = c.maxCoeff() * inv_ln2;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (alloc(mid).sum() > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  VectorXd p = alloc(hi);
  // Spend the rounding remainder on the active channels so the budget binds.
  const double used = p.sum();
  const Eigen::Index active = (p.array() > 0.0).count();
  if (active > 0 && used < budget) {
    const double extra = (budget - used) / static_cast<double>(active);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p(i) > 0.0) p(i) += extra;
  }
  return p;
}

}  // namespace papc
