#pragma once

#include <Eigen/Dense>

namespace papc {

/// argmax sum_n log2(1 + c_n p_n) s.t. p >= 0, sum(p) <= budget, c >= 0.
/// Exact common water level from sorted noise floors 1/c_n.
Eigen::VectorXd water_filling(const Eigen::VectorXd& c, double budget);

/// argmax sum_n [log2(1 + c_n p_n) - d_n p_n] s.t. p >= 0, sum(p) <= budget,
/// with c, d >= 0. Per-channel levels 1/(ln2 (d_n + lambda)); lambda found
/// by bisection when the budget binds. With d == 0 this is water_filling().
Eigen::VectorXd priced_water_filling(const Eigen::VectorXd& c, const Eigen::VectorXd& d,
                                     double budget);

}  // namespace papc
