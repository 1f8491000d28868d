#pragma once

#include <functional>
#include <span>
#include <vector>

#include "chargetune/core_model.hpp"
#include "chargetune/geometry.hpp"

namespace chargetune {

/// Surface network
///
///   e- + h+        --k5-->  0
///   h+ + HCO3-     --k6-->  .OH + CO2
///   .OH + C-H      --k7-->  C. + H2O
///   C. + .OH       --k8-->  C-OH
///
/// Defaults are normalised, non-authoritative values chosen so radicals are
/// fast compared with C-H decay (k ~ 1e-3 /s at a source of ~100).
struct SurfaceKineticsParams {
  double k5 = 1.0;
  double k6 = 1e-4;
  double k7 = 10.0;
  double k8 = 1e5;

  void validate() const;
};

struct SurfaceNetworkState {
  double holes = 0.0;
  double electrons = 0.0;
  double hydroxyl = 0.0;
  double carbon_radical = 0.0;
  double ch_bonds = 1.0;
  double bicarbonate = 2.0;
  double hydroxylated = 0.0;  // C-OH, terminal product

  /// C. + C-OH; together with ch_bonds this is conserved.
  double oxidized_sites() const noexcept { return carbon_radical + hydroxylated; }

  void validate() const;
};

/// Non-negative root of k5 h^2 + k6 [HCO3] h = S.
double hole_steady_state(const SurfaceKineticsParams& params, double bicarbonate, double source_rate);

/// Pseudo-first-order C-H activation rate k = k6 [h+].
double rate_constant(const SurfaceKineticsParams& params, double bicarbonate, double source_rate);

/// k6 sqrt(S / k5): value of k when e-h annihilation dominates hole loss.
double recombination_limited_rate(const SurfaceKineticsParams& params, double source_rate);

/// S / [HCO3]: value of k when hole transfer dominates. Infinite without adsorbate.
double transfer_limited_rate(double bicarbonate, double source_rate);

enum class KineticRegime { RecombinationDominated, Mixed, TransferDominated };

/// Ratio k5 [h] / (k6 [HCO3]) of the two hole-loss channels at steady state.
double recombination_to_transfer_ratio(const SurfaceKineticsParams& params, double bicarbonate,
                                       double source_rate);

/// RecombinationDominated above a ratio of 100, TransferDominated below 1/100.
KineticRegime classify_regime(const SurfaceKineticsParams& params, double bicarbonate, double source_rate);

/// d ln k / d ln S at the given source; 1/2 and 1 in the two limits.
double local_source_exponent(const SurfaceKineticsParams& params, double bicarbonate, double source_rate);

struct ScalingExponent {
  double beta;
  double prefactor;     // k = prefactor * flux^beta
  double residual_rms;  // of ln k about the fitted line
};

/// Log-log least-squares exponent of k(flux) simulated through
/// `source_at_flux`. Needs at least 5 fluxes spanning at least one decade.
ScalingExponent flux_scaling_exponent(const SurfaceKineticsParams& params, double bicarbonate,
                                      const std::function<double(double)>& source_at_flux,
                                      std::span<const double> fluxes);

struct NetworkSample {
  double wall_clock_s;
  double park_s;
  SurfaceNetworkState state;
};

struct NetworkOptions {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-14;
};

/// Stiff integration of the full network at constant source.
std::vector<NetworkSample> network_transient(const SurfaceKineticsParams& params,
                                             const SurfaceNetworkState& initial, double source_rate,
                                             std::span<const double> times,
                                             const NetworkOptions& options = {});

/// Same, with the source switched on and off by an illumination schedule.
/// `times` are wall-clock times measured from the start of the schedule.
std::vector<NetworkSample> network_transient(const SurfaceKineticsParams& params,
                                             const SurfaceNetworkState& initial, double source_rate,
                                             const IlluminationSchedule& schedule,
                                             std::span<const double> times,
                                             const NetworkOptions& options = {});

/// initial_fraction * exp(-k t), clamped to [0, 1].
double ch_decay(double k_per_s, double t_s, double initial_fraction);

/// NV centres inside the truncated apex cone.
double effective_nv_count(const PillarGeometry& geometry, double nv_density_per_m3);

/// Surface carbon sites on the apex top facet.
double surface_carbon_sites(const PillarGeometry& geometry, double carbon_density_per_m2);

/// eta * N_eff * Gamma_ion / N_C.
double macroscopic_rate_estimate(double eta, double n_eff, double gamma_ion_hz,
                                 const PillarGeometry& geometry, double carbon_density_per_m2);

}  // namespace chargetune
