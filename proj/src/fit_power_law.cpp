#include <cmath>

#include "chargetune/errors.hpp"
#include "chargetune/fitting.hpp"
#include "regression.hpp"

namespace chargetune {

FitResult fit_power_law(const std::vector<ScalingPoint>& points) {
  if (points.size() < 3) throw DomainError("power-law fit needs at least 3 points");
  bool weighted = true;
  std::vector<double> x, y, w;
  for (const auto& p : points) {
    if (!(p.flux > 0.0 && p.k > 0.0) || !std::isfinite(p.flux) || !std::isfinite(p.k)) {
      throw DomainError("power-law data must be positive and finite");
    }
    if (!(p.sigma_k >= 0.0)) throw DomainError("uncertainties must be non-negative");
    if (p.sigma_k == 0.0) weighted = false;
    x.push_back(std::log(p.flux));
    y.push_back(std::log(p.k));
  }
  if (weighted) {
    for (const auto& p : points) {
      const double rel = p.sigma_k / p.k;  // sigma of ln k
      w.push_back(1.0 / (rel * rel));
    }
  }

  const auto line = detail::fit_line(x, y, w, weighted);

  FitResult out;
  out.names = {"prefactor", "beta"};
  const double prefactor = std::exp(line.intercept);
  out.values = {prefactor, line.slope};
  // Jacobian of (prefactor, beta) with respect to (intercept, slope).
  out.covariance.resize(2, 2);
  out.covariance(0, 0) = prefactor * prefactor * line.var_intercept;
  out.covariance(0, 1) = out.covariance(1, 0) = prefactor * line.cov;
  out.covariance(1, 1) = line.var_slope;
  out.std_errors = {std::sqrt(out.covariance(0, 0)), std::sqrt(out.covariance(1, 1))};
  out.bound_active = {false, false};
  out.n_data = static_cast<int>(points.size());
  out.objective = 0.5 * line.weighted_rss;
  out.residual_norm = std::sqrt(line.weighted_rss);

  double g0 = 0.0, g1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = line.intercept + line.slope * x[i] - y[i];
    g0 += wi * r;
    g1 += wi * r * x[i];
  }
  out.gradient_norm = std::max(std::abs(g0), std::abs(g1));
  out.derived["log_prefactor"] = line.intercept;
  out.derived["log_prefactor_se"] = std::sqrt(line.var_intercept);
  return out;
}

}  // namespace chargetune
