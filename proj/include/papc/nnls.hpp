#pragma once

#include <Eigen/Dense>

namespace papc {

/// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
Eigen::VectorXd solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           int max_iterations = 0);

}  // namespace papc
