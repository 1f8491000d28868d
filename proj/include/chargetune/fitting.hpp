#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chargetune/charge_state.hpp"

namespace chargetune {

enum class FitFlag : std::uint32_t {
  NotConverged = 1u << 0,
  NonIdentifiable = 1u << 1,
  BoundActive = 1u << 2,
  ConstraintViolated = 1u << 3,
  NoPeak = 1u << 4,
  Truncated = 1u << 5,
};

const char* to_string(FitFlag flag);
std::vector<std::string> flag_names(std::uint32_t flags);

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> std_errors;  // infinite along non-identifiable directions
  Eigen::MatrixXd covariance;
  std::vector<bool> bound_active;
  std::map<std::string, double> derived;  // e.g. area, fwhm, with "<name>_se" errors

  double objective = 0.0;  // 0.5 * sum of squared weighted residuals (+ penalty)
  double residual_norm = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;  // max |J^T r| at the estimate
  int n_data = 0;
  std::uint32_t flags = 0;

  bool has(FitFlag f) const noexcept { return (flags & static_cast<std::uint32_t>(f)) != 0; }
  void set(FitFlag f) noexcept { flags |= static_cast<std::uint32_t>(f); }
  bool ok() const noexcept { return flags == 0; }

  /// Throws std::out_of_range for unknown names.
  double value(const std::string& name) const;
  double error(const std::string& name) const;
};

// --- PL traces ----------------------------------------------------------------

struct PLTrace {
  std::vector<double> t_park_s;
  std::vector<double> counts_per_s;
  std::vector<double> sigma;  // optional, same length when present

  void validate() const;
};

enum class TraceWeighting { Poisson, Sigma, Uniform };

struct TraceFitOptions {
  TraceWeighting weighting = TraceWeighting::Poisson;
  int k_grid_points = 7;  // log grid over [1/(10 T), 10/T]
  int max_iterations = 500;
  double penalty_weight = 1e4;  // on max(0, -(A + B))^2
  double rank_tolerance = 1e-10;
};

/// Weighted least squares of the four-parameter trace model (A, B, k, D).
FitResult fit_trace(const PLTrace& trace, const TraceFitOptions& options = {});

/// The objective fit_trace minimises, evaluated at `params`.
double trace_objective(const PLTrace& trace, const TraceModelParams& params, const TraceFitOptions& options = {});

// --- scaling --------------------------------------------------------------------

struct ScalingPoint {
  double flux;
  double k;
  double sigma_k = 0.0;  // 0: unweighted
};

/// k = prefactor * flux^beta by log-log regression; weights 1/(sigma_k/k)^2
/// when every point carries an uncertainty.
FitResult fit_power_law(const std::vector<ScalingPoint>& points);

// --- spectra --------------------------------------------------------------------

struct Spectrum {
  std::vector<double> wavelength_nm;
  std::vector<double> counts;
  double integration_time_s = 1.0;
  std::string temperature_tag = "RT";

  void validate() const;
};

struct SpectralWindow {
  double lo_nm;
  double hi_nm;
};

enum class LineProfile { Lorentzian, Gaussian };

/// Line plus linear baseline, fitted jointly over the window. Parameters
/// (I0, x0, width, c0, c1) with the baseline c0 + c1 (x - window centre);
/// width is gamma (Lorentzian, half width) or sigma (Gaussian). Derived:
/// area, area_se, hwhm, fwhm.
FitResult fit_line(const Spectrum& spectrum, SpectralWindow window, LineProfile profile);

inline FitResult fit_lorentzian(const Spectrum& s, SpectralWindow w) { return fit_line(s, w, LineProfile::Lorentzian); }
inline FitResult fit_gaussian(const Spectrum& s, SpectralWindow w) { return fit_line(s, w, LineProfile::Gaussian); }

double line_profile_value(LineProfile profile, double x, double i0, double x0, double width);

struct PopulationSample {
  double nv_zero = 0.0;
  double nv_minus = 0.0;
  bool skipped = false;           // neither line found
  bool nv_plus_attributed = false;  // one line missing, deficit assigned to NV+
  double area_zero = 0.0;
  double area_minus = 0.0;
};

/// Per spectrum: fit both ZPL windows with Lorentzians and normalise the areas.
std::vector<PopulationSample> charge_populations_from_spectra(const std::vector<Spectrum>& series,
                                                              SpectralWindow nv_zero_line,
                                                              SpectralWindow nv_minus_line);

struct RatioEstimate {
  double value;
  double uncertainty;
  bool out_of_range;        // clamped to [0, 1 + tolerance]
  bool consistent_with_one; // above 1 but within tolerance
};

RatioEstimate population_ratio(double i_state, double sigma_state, double i_reference, double sigma_reference,
                               double tolerance = 0.1);

struct EnsembleMean {
  double mean;
  double standard_error;
  int n;
};

/// Arithmetic mean and standard error over pillars.
EnsembleMean ensemble_mean(const std::vector<double>& values);

}  // namespace chargetune
