#include "chargetune/synth.hpp"

#include <cmath>
#include <random>

#include "chargetune/errors.hpp"

namespace chargetune {

void NoiseModel::validate() const {
  if (kind == NoiseKind::Gaussian && !(std::isfinite(sigma) && sigma > 0.0)) {
    throw DomainError("Gaussian noise needs a positive sigma");
  }
  if (kind == NoiseKind::Poisson && !(std::isfinite(bin_s) && bin_s > 0.0)) {
    throw DomainError("Poisson noise needs a positive counting interval");
  }
}

void SpectrumSpec::validate() const {
  if (!(std::isfinite(lo_nm) && std::isfinite(hi_nm) && hi_nm > lo_nm)) throw DomainError("spectrum range is empty");
  if (!(std::isfinite(step_nm) && step_nm > 0.0)) throw DomainError("spectrum step must be positive");
  for (const auto& l : lines) {
    if (!(std::isfinite(l.amplitude) && l.amplitude >= 0.0)) throw DomainError("line amplitude must be non-negative");
    if (!(std::isfinite(l.width_nm) && l.width_nm > 0.0)) throw DomainError("line width must be positive");
    if (!std::isfinite(l.center_nm)) throw DomainError("line centre must be finite");
  }
}

std::vector<double> uniform_grid(double t0, double t_end, double dt) {
  if (!(std::isfinite(t0) && std::isfinite(t_end) && t_end >= t0)) throw DomainError("grid end precedes start");
  if (!(std::isfinite(dt) && dt > 0.0)) throw DomainError("grid step must be positive");
  // Multiply rather than accumulate so long grids do not drift.
  const auto n = static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = t0 + static_cast<double>(i) * dt;
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo && std::isfinite(hi))) throw DomainError("log grid needs 0 < lo < hi");
  if (n < 2) throw DomainError("log grid needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

PLTrace synth_trace(const TraceModelParams& truth, const std::vector<double>& times, const NoiseModel& noise,
                    std::uint64_t seed) {
  truth.validate();
  noise.validate();
  std::mt19937_64 rng(seed);
  PLTrace tr;
  tr.t_park_s = times;
  tr.counts_per_s.reserve(times.size());
  for (double t : times) {
    const double mean = pl_trace(t, truth);
    switch (noise.kind) {
      case NoiseKind::None:
        tr.counts_per_s.push_back(mean);
        break;
      case NoiseKind::Poisson: {
        std::poisson_distribution<long long> draw(std::max(mean, 0.0) * noise.bin_s);
        tr.counts_per_s.push_back(static_cast<double>(draw(rng)) / noise.bin_s);
        break;
      }
      case NoiseKind::Gaussian: {
        std::normal_distribution<double> draw(mean, noise.sigma);
        tr.counts_per_s.push_back(draw(rng));
        tr.sigma.push_back(noise.sigma);
        break;
      }
    }
  }
  return tr;
}

Spectrum synth_spectrum(const SpectrumSpec& spec, const NoiseModel& noise, std::uint64_t seed) {
  spec.validate();
  noise.validate();
  std::mt19937_64 rng(seed);
  Spectrum s;
  s.temperature_tag = spec.temperature_tag;
  s.wavelength_nm = uniform_grid(spec.lo_nm, spec.hi_nm, spec.step_nm);
  s.counts.reserve(s.wavelength_nm.size());
  for (double x : s.wavelength_nm) {
    double y = spec.baseline + spec.slope_per_nm * (x - spec.reference_nm);
    for (const auto& l : spec.lines) y += line_profile_value(l.profile, x, l.amplitude, l.center_nm, l.width_nm);
    switch (noise.kind) {
      case NoiseKind::None:
        break;
      case NoiseKind::Poisson: {
        std::poisson_distribution<long long> draw(std::max(y, 0.0));
        y = static_cast<double>(draw(rng));
        break;
      }
      case NoiseKind::Gaussian: {
        std::normal_distribution<double> draw(0.0, noise.sigma);
        y += draw(rng);
        break;
      }
    }
    s.counts.push_back(y);
  }
  return s;
}

std::vector<ScalingPoint> synth_scaling(const NVCycleParams& cycle, const SurfaceKineticsParams& kinetics,
                                        double bicarbonate, const std::vector<double>& fluxes,
                                        double intensity_per_flux, const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  if (noise.kind == NoiseKind::Poisson) throw DomainError("scaling data supports Gaussian or no noise");
  if (!(std::isfinite(intensity_per_flux) && intensity_per_flux > 0.0)) {
    throw DomainError("intensity per flux must be positive");
  }
  std::mt19937_64 rng(seed);
  std::vector<ScalingPoint> out;
  out.reserve(fluxes.size());
  for (double f : fluxes) {
    const double source = generation_rate(cycle, intensity_per_flux * f);
    const double k = rate_constant(kinetics, bicarbonate, source);
    if (noise.kind == NoiseKind::Gaussian) {
      std::normal_distribution<double> draw(0.0, noise.sigma);
      out.push_back({f, k * std::exp(draw(rng)), noise.sigma * k});
    } else {
      out.push_back({f, k, 0.0});
    }
  }
  return out;
}

}  // namespace chargetune
