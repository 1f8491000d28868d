#include <algorithm>
#include <cmath>
#include <limits>

#include "chargetune/constants.hpp"
#include "chargetune/errors.hpp"
#include "chargetune/fitting.hpp"
#include "least_squares.hpp"

namespace chargetune {

void Spectrum::validate() const {
  if (wavelength_nm.size() != counts.size()) throw DomainError("spectrum columns differ in length");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!std::isfinite(wavelength_nm[i]) || !std::isfinite(counts[i])) throw DomainError("spectrum values must be finite");
    if (i > 0 && !(wavelength_nm[i] > wavelength_nm[i - 1])) {
      throw DomainError("spectrum wavelengths must be strictly increasing");
    }
  }
}

double line_profile_value(LineProfile profile, double x, double i0, double x0, double width) {
  const double d = x - x0;
  if (profile == LineProfile::Lorentzian) return i0 * width * width / (width * width + d * d);
  return i0 * std::exp(-d * d / (2.0 * width * width));
}

namespace {

const double kGaussHwhm = std::sqrt(2.0 * std::log(2.0));

double hwhm_of(LineProfile profile, double width) {
  return profile == LineProfile::Lorentzian ? width : kGaussHwhm * width;
}

// Value and derivatives with respect to (I0, x0, width).
void profile_with_gradient(LineProfile profile, double x, const double* p, double& value, double* grad) {
  const double i0 = p[0], x0 = p[1], w = p[2];
  const double d = x - x0;
  if (profile == LineProfile::Lorentzian) {
    const double den = w * w + d * d;
    const double shape = w * w / den;
    value = i0 * shape;
    grad[0] = shape;
    grad[1] = i0 * w * w * 2.0 * d / (den * den);
    grad[2] = i0 * 2.0 * w * d * d / (den * den);
  } else {
    const double e = std::exp(-d * d / (2.0 * w * w));
    value = i0 * e;
    grad[0] = e;
    grad[1] = i0 * e * d / (w * w);
    grad[2] = i0 * e * d * d / (w * w * w);
  }
}

}  // namespace

FitResult fit_line(const Spectrum& spectrum, SpectralWindow window, LineProfile profile) {
  spectrum.validate();
  if (!(window.hi_nm > window.lo_nm)) throw DomainError("spectral window is empty");
  if (spectrum.wavelength_nm.empty() || window.lo_nm < spectrum.wavelength_nm.front() - 1e-9 ||
      window.hi_nm > spectrum.wavelength_nm.back() + 1e-9) {
    throw DomainError("spectral window lies outside the spectrum");
  }

  std::vector<double> x, y;
  for (std::size_t i = 0; i < spectrum.counts.size(); ++i) {
    const double xi = spectrum.wavelength_nm[i];
    if (xi >= window.lo_nm - 1e-12 && xi <= window.hi_nm + 1e-12) {
      x.push_back(xi);
      y.push_back(spectrum.counts[i]);
    }
  }
  const int n = static_cast<int>(x.size());
  if (n < 8) throw DomainError("spectral window needs at least 8 samples");
  const double xc = 0.5 * (x.front() + x.back());
  const double dx = (x.back() - x.front()) / (n - 1);

  detail::LsqSpec spec;
  spec.n_params = 5;
  spec.n_residuals = n;
  const double inf = std::numeric_limits<double>::infinity();
  spec.lower = {-inf, x.front(), 1e-9 * dx, -inf, -inf};
  spec.upper = {inf, x.back(), inf, inf, inf};
  spec.eval = [&](const double* p, double* r, double* jac) {
    for (int i = 0; i < n; ++i) {
      double v, g[3];
      profile_with_gradient(profile, x[i], p, v, g);
      r[i] = v + p[3] + p[4] * (x[i] - xc) - y[i];
      if (jac) {
        double* row = jac + 5 * i;
        row[0] = g[0];
        row[1] = g[1];
        row[2] = g[2];
        row[3] = 1.0;
        row[4] = x[i] - xc;
      }
    }
  };

  // Start: baseline through the window edges, peak at the largest excess.
  const int edge = std::max(1, n / 10);
  double yl = 0, yr = 0, xl = 0, xr = 0;
  for (int i = 0; i < edge; ++i) {
    yl += y[i];
    xl += x[i];
    yr += y[n - 1 - i];
    xr += x[n - 1 - i];
  }
  yl /= edge, yr /= edge, xl /= edge, xr /= edge;
  const double c1 = (yr - yl) / (xr - xl);
  const double c0 = yl + c1 * (xc - xl);
  int peak = 0;
  std::vector<double> excess(n);
  for (int i = 0; i < n; ++i) {
    excess[i] = y[i] - c0 - c1 * (x[i] - xc);
    if (excess[i] > excess[peak]) peak = i;
  }
  const double i0 = excess[peak] > 0.0 ? excess[peak] : std::max(1e-12, std::abs(yl) * 1e-3);
  int left = peak, right = peak;
  while (left > 0 && excess[left] > 0.5 * i0) --left;
  while (right < n - 1 && excess[right] > 0.5 * i0) ++right;
  const double hw = std::max(dx, 0.5 * (x[right] - x[left]));
  const double w0 = profile == LineProfile::Lorentzian ? hw : hw / kGaussHwhm;

  detail::LsqOutcome best;
  best.cost = inf;
  for (double scale : {1.0, 0.5, 2.0}) {
    const auto outcome = detail::solve_lsq(spec, {i0, x[peak], w0 * scale, c0, c1});
    if (outcome.cost < best.cost) best = outcome;
  }

  FitResult out;
  out.names = {"I0", "x0", profile == LineProfile::Lorentzian ? "gamma" : "sigma", "c0", "c1"};
  detail::summarise(out, spec, best, n, false, 1e-10);

  const double a = out.values[0], x0 = out.values[1], w = out.values[2];
  const double hwhm = hwhm_of(profile, w);
  const double area_per = profile == LineProfile::Lorentzian ? constants::pi : std::sqrt(2.0 * constants::pi);
  const double area = area_per * a * w;
  const Eigen::Vector2d grad(area_per * w, area_per * a);
  Eigen::Matrix2d cov;
  cov << out.covariance(0, 0), out.covariance(0, 2), out.covariance(2, 0), out.covariance(2, 2);
  out.derived["area"] = area;
  out.derived["area_se"] = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  out.derived["hwhm"] = hwhm;
  out.derived["fwhm"] = 2.0 * hwhm;
  out.derived["fwhm_se"] = 2.0 * hwhm / w * out.std_errors[2];
  out.derived["baseline_center_nm"] = xc;

  // No peak: amplitude within 3 standard errors of zero, a "line" narrower
  // than half a sample or wider than the window, or a centre pushed onto the
  // window edge (it is soaking up the tail of something outside).
  if (!(a > 3.0 * out.std_errors[0]) || w < 0.5 * dx || hwhm > (x.back() - x.front()) || out.bound_active[1]) {
    out.set(FitFlag::NoPeak);
  }
  if (x0 - x.front() < 2.0 * hwhm || x.back() - x0 < 2.0 * hwhm) out.set(FitFlag::Truncated);
  return out;
}

std::vector<PopulationSample> charge_populations_from_spectra(const std::vector<Spectrum>& series,
                                                              SpectralWindow nv_zero_line,
                                                              SpectralWindow nv_minus_line) {
  if (series.empty()) throw DomainError("spectrum series is empty");
  std::vector<PopulationSample> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    const FitResult zero = fit_lorentzian(s, nv_zero_line);
    const FitResult minus = fit_lorentzian(s, nv_minus_line);
    const bool has_zero = !zero.has(FitFlag::NoPeak);
    const bool has_minus = !minus.has(FitFlag::NoPeak);
    PopulationSample p;
    p.area_zero = has_zero ? zero.derived.at("area") : 0.0;
    p.area_minus = has_minus ? minus.derived.at("area") : 0.0;
    if (has_zero && has_minus) {
      const double total = p.area_zero + p.area_minus;
      p.nv_zero = p.area_zero / total;
      p.nv_minus = 1.0 - p.nv_zero;  // exact complement, so the pair sums to 1
    } else if (has_zero || has_minus) {
      p.nv_zero = has_zero ? 1.0 : 0.0;
      p.nv_minus = has_minus ? 1.0 : 0.0;
      p.nv_plus_attributed = true;
    } else {
      p.skipped = true;
    }
    out.push_back(p);
  }
  return out;
}

RatioEstimate population_ratio(double i_state, double sigma_state, double i_reference, double sigma_reference,
                               double tolerance) {
  if (!(i_reference > 0.0) || !std::isfinite(i_reference)) throw DomainError("reference intensity must be positive");
  if (!std::isfinite(i_state) || !(sigma_state >= 0.0) || !(sigma_reference >= 0.0) || !(tolerance >= 0.0)) {
    throw DomainError("ratio inputs must be finite and uncertainties non-negative");
  }
  const double ratio = i_state / i_reference;
  const double rel_ref = sigma_reference / i_reference;
  const double uncertainty = std::sqrt(sigma_state * sigma_state / (i_reference * i_reference) + ratio * ratio * rel_ref * rel_ref);
  RatioEstimate r{ratio, uncertainty, false, false};
  if (ratio < 0.0) {
    r.value = 0.0;
    r.out_of_range = true;
  } else if (ratio > 1.0 + tolerance) {
    r.value = 1.0 + tolerance;
    r.out_of_range = true;
  } else if (ratio > 1.0) {
    r.consistent_with_one = true;
  }
  return r;
}

EnsembleMean ensemble_mean(const std::vector<double>& values) {
  if (values.empty()) throw DomainError("ensemble is empty");
  const int n = static_cast<int>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return {mean, se, n};
}

}  // namespace chargetune
