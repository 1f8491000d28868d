#pragma once

#include <array>
#include <span>
#include <vector>

namespace chargetune {

/// Four-level NV charge cycle
///
///   NV-  --k1 I-->  NV-*  --k2 I-->  NV0 + e-
///   NV0  --k3 I-->  NV0*  --k4 I-->  NV- + h+
///   NV-* --G1-->  NV-,   NV0* --G0--> NV0
///
/// Intensity is expressed in photon-flux units; k1..k4 carry the reciprocal
/// unit (per flux unit per second), so only their product with I matters.
struct NVCycleParams {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 1.0;
  double k4 = 1.0;
  double gamma0 = 1.0;
  double gamma1 = 1.0;
  double total_nv = 1.0;

  void validate() const;
};

struct NVPopulations {
  double nv_minus = 0.0;
  double nv_minus_excited = 0.0;
  double nv_zero = 0.0;
  double nv_zero_excited = 0.0;

  static NVPopulations all_negative(double total) { return {total, 0.0, 0.0, 0.0}; }
  static NVPopulations from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

  std::array<double, 4> as_array() const { return {nv_minus, nv_minus_excited, nv_zero, nv_zero_excited}; }
  double total() const { return nv_minus + nv_minus_excited + nv_zero + nv_zero_excited; }
};

struct NVSample {
  double t_s;
  NVPopulations populations;
};

struct TransientOptions {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-14;  // scaled by total_nv
};

/// Integrates the rate equations and samples them at `times` (non-decreasing,
/// first entry is the start time). Throws DomainError for non-finite input or
/// an initial state that breaks conservation.
std::vector<NVSample> nv_transient(const NVCycleParams& params, double intensity,
                                   std::span<const double> times, const NVPopulations& initial,
                                   const TransientOptions& options = {});

/// Steady state from the branching relations plus conservation, solved as a
/// 4x4 linear system. Throws DegenerateSystemError in the dark (I = 0).
NVPopulations nv_steady_state(const NVCycleParams& params, double intensity);

/// Hole generation k4 * I * [NV0*] at steady state; 0 in the dark.
double generation_rate(const NVCycleParams& params, double intensity);

/// Limit of [NV0*]/[NV] for I -> infinity.
double saturated_alpha0(const NVCycleParams& params);

struct CarrierSource {
  double threshold_eV;
  double coefficient;
};

/// Species that inject holes once the photon energy exceeds their
/// charge-cycling threshold.
class CarrierSourceSpec {
 public:
  explicit CarrierSourceSpec(std::vector<CarrierSource> sources);

  /// NV (2.16 eV) and divacancy (2.45 eV) thresholds with the given coefficients.
  static CarrierSourceSpec nv_and_divacancy(double nv_coefficient, double divacancy_coefficient);

  const std::vector<CarrierSource>& sources() const noexcept { return sources_; }

 private:
  std::vector<CarrierSource> sources_;
};

double multi_species_generation(const CarrierSourceSpec& spec, double photon_energy_eV, double flux);

}  // namespace chargetune
