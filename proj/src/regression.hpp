#pragma once

#include <span>

namespace chargetune::detail {

/// Weighted straight-line fit y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double var_slope = 0.0;
  double var_intercept = 0.0;
  double cov = 0.0;
  double weighted_rss = 0.0;  // sum w (y - model)^2
  int n = 0;
};

/// Closed-form weighted least squares. With `absolute_weights` the weights are
/// taken as 1/sigma^2 and the covariance is (X^T W X)^-1; otherwise it is
/// rescaled by the reduced chi-square. Empty `w` means unit weights.
/// Throws DomainError for fewer than 2 points or constant x.
LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                 bool absolute_weights);

}  // namespace chargetune::detail
