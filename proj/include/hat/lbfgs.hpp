#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hat {

struct SolverOptions {
  double gradient_tolerance = 1e-6;
  int max_iterations = 10000;
  int history = 10;
};

struct SolverReport {
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
};

// Evaluates the objective at x and writes its gradient into `gradient`.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& gradient)>;

// Limited-memory BFGS with a strong-Wolfe line search. `x` is updated in place.
// Stops when the gradient 2-norm drops to the tolerance, at the iteration cap,
// or when no descent step can be found (reported as not converged).
SolverReport minimize_lbfgs(const Objective& objective, Eigen::VectorXd& x, const SolverOptions& options = {});

}  // namespace hat
