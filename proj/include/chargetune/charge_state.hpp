#pragma once

#include <functional>
#include <vector>

#include "chargetune/core_model.hpp"

namespace chargetune {

/// Inputs of E_{q/q+1} - E_F = mu_e - E_g - E_ea + Delta - delta_BB.
/// Defaults: H-terminated surface and the SiV(-/0) level.
struct EnergyBalance {
  double mu_e_eV = 5.3;
  double band_gap_eV = 5.5;
  double electron_affinity_eV = -0.3;
  double delta_eV = 1.43;
  double delta_bb_eV = 0.0;
  Temperature temperature = Temperature::room();

  void validate() const;
};

/// Charge-state transition level relative to the Fermi level, in eV.
double transition_level_offset(const EnergyBalance& balance);

/// Fermi-Dirac occupation 1 / (1 + exp(beta * offset)).
double population(double offset_eV, const Temperature& temperature);

/// E_ea after `t_park_s` of illumination: the C-H fraction decays as
/// theta0 exp(-k t) from the surface's current fraction theta0.
double electron_affinity_at(double t_park_s, double k_per_s, const SurfaceState& surface);

/// I(t) = D / (1 + exp(A + B exp(-k t))). `t0_s` is bookkeeping only: the
/// illumination before the trace is already folded into B.
struct TraceModelParams {
  double A = 0.0;
  double B = 0.0;
  double k_per_s = 0.0;
  double D = 1.0;
  double t0_s = 0.0;

  void validate() const;
};

double pl_trace(double t_park_s, const TraceModelParams& params);

/// dI/dA, dI/dB, dI/dk, dI/dD at t.
struct TraceGradient {
  double dA, dB, dk, dD;
};
TraceGradient pl_trace_gradient(double t_park_s, const TraceModelParams& params);

/// A and B from the final-surface balance (its electron affinity is E_ea^f)
/// and the surface's hydrogenated affinity and C-H fraction.
TraceModelParams trace_params_from_physics(const EnergyBalance& final_balance, const SurfaceState& surface,
                                           double k_per_s, double t0_s, double D);

/// D * population(offset(t)) with a time-dependent band bending delta_BB(t);
/// reduces to pl_trace(trace_params_from_physics(...)) for a constant hook.
double pl_trace_from_physics(double t_park_s, const EnergyBalance& final_balance, const SurfaceState& surface,
                             double k_per_s, double t0_s, double D,
                             const std::function<double(double)>& delta_bb_of_t);

struct Emitter {
  double weight;
  double level_eV;
};

struct EmitterEnsemble {
  std::vector<Emitter> emitters;
  double fermi_level_eV = 0.0;

  double total_weight() const;
  /// Weight-averaged transition level.
  double mean_level_eV() const;
  void validate() const;
};

double ensemble_intensity(const EmitterEnsemble& ensemble, const Temperature& temperature);

/// |exact - mean-level approximation| / exact.
double ensemble_mean_approximation_error(const EmitterEnsemble& ensemble, const Temperature& temperature);

/// Size of the first-order term of the expansion about the mean level,
/// (1 - P_mean) * sum(I_i beta |delta_i|) / sum(I_i). Bounds the relative
/// error of the mean-level approximation while beta |delta_i| <= 0.5.
double ensemble_first_order_bound(const EmitterEnsemble& ensemble, const Temperature& temperature);

enum class ShiftKind { Point, LowerBound, UpperBound, Indeterminate };

struct FermiShift {
  ShiftKind kind;
  double value_eV;  // NaN when indeterminate
};

/// Change of E_{q/q+1} - E_F implied by two populations,
/// kT_b ln(1/p_b - 1) - kT_a ln(1/p_a - 1). A population within
/// `detection_limit` of 0 or 1 is only known to lie beyond that limit, which
/// turns the result into a one-sided bound.
FermiShift infer_fermi_shift(double p_before, double p_after, const Temperature& before,
                             const Temperature& after, double detection_limit = 1e-3);

inline FermiShift infer_fermi_shift(double p_before, double p_after, const Temperature& temperature,
                                    double detection_limit = 1e-3) {
  return infer_fermi_shift(p_before, p_after, temperature, temperature, detection_limit);
}

}  // namespace chargetune
