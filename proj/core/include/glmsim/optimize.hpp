#pragma once

#include <Eigen/Dense>
#include <functional>

namespace glmsim {

// Scalar objective over R^P. May return +inf (or NaN) for points it rejects;
// the minimizer backtracks away from them.
using Objective = std::function<double(const Eigen::VectorXd&)>;

// Central-difference gradient with step 1e-5 * max(1, |x_i|).
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x);

// Second-difference Hessian with step 1e-4 * max(1, |x_i|), symmetrised.
Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x);

struct MinimizeOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;
  int newton_polish_steps = 8;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;  // gradient norm below tolerance
};

// BFGS on the inverse Hessian with Armijo backtracking, followed by a few
// damped Newton steps on the finite-difference Hessian when it is positive definite.
// `start` must have a finite objective value.
MinimizeResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& start,
                             const MinimizeOptions& options = {});

}  // namespace glmsim
