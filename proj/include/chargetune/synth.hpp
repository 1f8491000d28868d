#pragma once

#include <cstdint>
#include <vector>

#include "chargetune/charge_cycle.hpp"
#include "chargetune/charge_state.hpp"
#include "chargetune/fitting.hpp"
#include "chargetune/photocatalysis.hpp"

namespace chargetune {

enum class NoiseKind { None, Poisson, Gaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double sigma = 0.0;    // Gaussian: absolute sd (trace, spectrum) or relative sd (scaling)
  double bin_s = 1.0;    // Poisson trace: counting interval per sample

  bool stochastic() const noexcept { return kind != NoiseKind::None; }
  void validate() const;
};

/// Uniform grid t0, t0 + dt, ... up to and including t_end (to 1e-9 dt).
std::vector<double> uniform_grid(double t0, double t_end, double dt);

/// Samples pl_trace on `times`. Poisson noise draws counts over bin_s and
/// reports counts/bin_s; Gaussian adds N(0, sigma). The trace carries sigma
/// only for Gaussian noise.
PLTrace synth_trace(const TraceModelParams& truth, const std::vector<double>& times, const NoiseModel& noise,
                    std::uint64_t seed);

struct SyntheticLine {
  LineProfile profile = LineProfile::Lorentzian;
  double amplitude = 1.0;
  double center_nm = 0.0;
  double width_nm = 1.0;  // gamma (HWHM) or sigma
};

struct SpectrumSpec {
  std::vector<SyntheticLine> lines;
  double baseline = 0.0;
  double slope_per_nm = 0.0;
  double reference_nm = 0.0;  // slope pivot
  double lo_nm = 0.0;
  double hi_nm = 1.0;
  double step_nm = 0.01;
  std::string temperature_tag = "RT";

  void validate() const;
};

Spectrum synth_spectrum(const SpectrumSpec& spec, const NoiseModel& noise, std::uint64_t seed);

/// k(flux) from the steady surface kinetics fed by the NV cycle at intensity
/// intensity_per_flux * flux. Gaussian noise acts on ln k with sd sigma
/// (reported as sigma_k = sigma * k).
std::vector<ScalingPoint> synth_scaling(const NVCycleParams& cycle, const SurfaceKineticsParams& kinetics,
                                        double bicarbonate, const std::vector<double>& fluxes,
                                        double intensity_per_flux, const NoiseModel& noise, std::uint64_t seed);

/// Log-spaced fluxes, inclusive of both ends.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace chargetune
