#include "regression.hpp"

#include <cmath>

#include "chargetune/errors.hpp"

namespace chargetune::detail {

LineFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                 bool absolute_weights) {
  const std::size_t n = x.size();
  if (y.size() != n || (!w.empty() && w.size() != n)) throw DomainError("regression inputs differ in length");
  if (n < 2) throw DomainError("regression needs at least two points");

  // Centre on the weighted mean of x to avoid cancellation.
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    if (!(std::isfinite(wi) && wi > 0.0)) throw DomainError("regression weights must be positive");
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("regression data must be finite");
    sw += wi;
    swx += wi * x[i];
    swy += wi * y[i];
  }
  const double xm = swx / sw;
  const double ym = swy / sw;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - xm) * (x[i] - xm);
    sxy += wi * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw DomainError("regression abscissae are all equal");

  LineFit f;
  f.n = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.weighted_rss += wi * r * r;
  }

  double scale = 1.0;
  if (!absolute_weights) scale = n > 2 ? f.weighted_rss / static_cast<double>(n - 2) : 0.0;
  f.var_slope = scale / sxx;
  f.var_intercept = scale * (1.0 / sw + xm * xm / sxx);
  f.cov = -scale * xm / sxx;
  return f;
}

}  // namespace chargetune::detail
