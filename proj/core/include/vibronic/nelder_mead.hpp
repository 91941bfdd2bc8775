#pragma once

#include <Eigen/Dense>
#include <functional>

namespace vibronic {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tol = 1e-15;  ///< spread of simplex values, absolute
  double x_tol = 1e-9;   ///< simplex diameter
  int max_evals = 40000;
  int restarts = 2;  ///< fresh simplices around the best point after convergence
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Derivative-free simplex descent with dimension-adapted coefficients.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& options = {});

}  // namespace vibronic
