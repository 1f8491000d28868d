#pragma once

// Bounded Levenberg-Marquardt (Ceres) plus the post-fit linearisation used to
// fill FitResult: covariance, rank check, gradient norm, bound flags.

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "chargetune/fitting.hpp"

namespace chargetune::detail {

struct LsqSpec {
  int n_params = 0;
  int n_residuals = 0;
  // Residuals r (n_residuals) and, when `jac` is non-null, the row-major
  // Jacobian (n_residuals x n_params).
  std::function<void(const double* p, double* r, double* jac)> eval;
  std::vector<double> lower;  // empty or n_params entries; +-inf for none
  std::vector<double> upper;
  int max_iterations = 500;
};

struct LsqOutcome {
  std::vector<double> params;
  double cost = 0.0;  // 0.5 |r|^2
  int iterations = 0;
  bool converged = false;
};

LsqOutcome solve_lsq(const LsqSpec& spec, std::vector<double> start);

struct Linearisation {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
};

Linearisation linearise(const LsqSpec& spec, const std::vector<double>& p);

/// Fills objective, norms, covariance, standard errors, bound flags and the
/// NonIdentifiable/NotConverged flags. With `absolute_weights` the residuals
/// are already normalised by their standard deviations; otherwise the
/// covariance is scaled by the reduced chi-square over `n_data` residuals.
void summarise(FitResult& out, const LsqSpec& spec, const LsqOutcome& outcome, int n_data, bool absolute_weights,
               double rank_tolerance);

}  // namespace chargetune::detail
