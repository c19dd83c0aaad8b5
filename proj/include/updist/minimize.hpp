#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace updist {

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Derivative-free local minimization (Nelder-Mead simplex). The objective is
/// responsible for any box handling; non-finite values are treated as +inf.
MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                           const Eigen::VectorXd& start, double initial_step, std::size_t max_iterations,
                           double size_tolerance = 1e-6);

}  // namespace updist
