#include "chargetune/charge_state.hpp"

#include <cmath>
#include <limits>

#include "chargetune/errors.hpp"

namespace chargetune {

namespace {

// 1 / (1 + e^x) without overflow.
double fermi(double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

}  // namespace

void EnergyBalance::validate() const {
  if (!(std::isfinite(band_gap_eV) && band_gap_eV > 0.0)) throw DomainError("band gap must be positive");
  if (!(delta_eV >= 0.0 && delta_eV <= band_gap_eV)) throw DomainError("transition level must lie inside the gap");
  if (!std::isfinite(mu_e_eV) || !std::isfinite(electron_affinity_eV) || !std::isfinite(delta_bb_eV)) {
    throw DomainError("energy balance terms must be finite");
  }
}

double transition_level_offset(const EnergyBalance& b) {
  b.validate();
  return b.mu_e_eV - b.band_gap_eV - b.electron_affinity_eV + b.delta_eV - b.delta_bb_eV;
}

double population(double offset_eV, const Temperature& temperature) {
  return fermi(temperature.beta_per_eV() * offset_eV);
}

double electron_affinity_at(double t_park_s, double k_per_s, const SurfaceState& surface) {
  if (!(t_park_s >= 0.0)) throw DomainError("park time must be non-negative");
  if (!(k_per_s >= 0.0)) throw DomainError("rate must be non-negative");
  surface.validate();
  const double theta = surface.hydrogen_fraction * std::exp(-k_per_s * t_park_s);
  return theta * surface.ea_initial_eV + (1.0 - theta) * surface.ea_final_eV;
}

void TraceModelParams::validate() const {
  if (!std::isfinite(A) || !std::isfinite(B)) throw DomainError("trace A and B must be finite");
  if (!(std::isfinite(D) && D > 0.0)) throw DomainError("trace asymptote D must be positive");
  if (!(std::isfinite(k_per_s) && k_per_s >= 0.0)) throw DomainError("trace rate k must be non-negative");
  if (!(std::isfinite(t0_s) && t0_s >= 0.0)) throw DomainError("trace t0 must be non-negative");
}

double pl_trace(double t_park_s, const TraceModelParams& p) {
  return p.D * fermi(p.A + p.B * std::exp(-p.k_per_s * t_park_s));
}

TraceGradient pl_trace_gradient(double t_park_s, const TraceModelParams& p) {
  const double decay = std::exp(-p.k_per_s * t_park_s);
  const double u = p.A + p.B * decay;
  const double occ = fermi(u);
  const double dA = -p.D * occ * fermi(-u);
  return {dA, dA * decay, -dA * p.B * t_park_s * decay, occ};
}

TraceModelParams trace_params_from_physics(const EnergyBalance& final_balance, const SurfaceState& surface,
                                           double k_per_s, double t0_s, double D) {
  surface.validate();
  const double beta = final_balance.temperature.beta_per_eV();
  TraceModelParams p;
  p.A = beta * transition_level_offset(final_balance);
  p.B = beta * surface.hydrogen_fraction * (final_balance.electron_affinity_eV - surface.ea_initial_eV) *
        std::exp(-k_per_s * t0_s);
  p.k_per_s = k_per_s;
  p.D = D;
  p.t0_s = t0_s;
  p.validate();
  return p;
}

double pl_trace_from_physics(double t_park_s, const EnergyBalance& final_balance, const SurfaceState& surface,
                             double k_per_s, double t0_s, double D,
                             const std::function<double(double)>& delta_bb_of_t) {
  SurfaceState s = surface;
  s.ea_final_eV = final_balance.electron_affinity_eV;
  EnergyBalance b = final_balance;
  b.electron_affinity_eV = electron_affinity_at(t_park_s + t0_s, k_per_s, s);
  b.delta_bb_eV = delta_bb_of_t ? delta_bb_of_t(t_park_s) : final_balance.delta_bb_eV;
  return D * population(transition_level_offset(b), b.temperature);
}

double EmitterEnsemble::total_weight() const {
  double w = 0.0;
  for (const auto& e : emitters) w += e.weight;
  return w;
}

double EmitterEnsemble::mean_level_eV() const {
  double s = 0.0;
  for (const auto& e : emitters) s += e.weight * e.level_eV;
  return s / total_weight();
}

void EmitterEnsemble::validate() const {
  if (emitters.empty()) throw DomainError("emitter ensemble is empty");
  for (const auto& e : emitters) {
    if (!(std::isfinite(e.weight) && e.weight > 0.0)) throw DomainError("emitter weights must be positive");
    if (!std::isfinite(e.level_eV)) throw DomainError("emitter levels must be finite");
  }
  if (!std::isfinite(fermi_level_eV)) throw DomainError("Fermi level must be finite");
}

double ensemble_intensity(const EmitterEnsemble& ensemble, const Temperature& temperature) {
  ensemble.validate();
  double total = 0.0;
  for (const auto& e : ensemble.emitters) {
    total += e.weight * population(e.level_eV - ensemble.fermi_level_eV, temperature);
  }
  return total;
}

double ensemble_mean_approximation_error(const EmitterEnsemble& ensemble, const Temperature& temperature) {
  const double exact = ensemble_intensity(ensemble, temperature);
  const double approx =
      ensemble.total_weight() * population(ensemble.mean_level_eV() - ensemble.fermi_level_eV, temperature);
  return std::abs(exact - approx) / exact;
}

double ensemble_first_order_bound(const EmitterEnsemble& ensemble, const Temperature& temperature) {
  ensemble.validate();
  const double beta = temperature.beta_per_eV();
  const double mean = ensemble.mean_level_eV();
  double s = 0.0;
  for (const auto& e : ensemble.emitters) s += e.weight * beta * std::abs(e.level_eV - mean);
  const double empty = 1.0 - population(mean - ensemble.fermi_level_eV, temperature);
  return empty * s / ensemble.total_weight();
}

FermiShift infer_fermi_shift(double p_before, double p_after, const Temperature& before,
                             const Temperature& after, double detection_limit) {
  if (!(p_before >= 0.0 && p_before <= 1.0 && p_after >= 0.0 && p_after <= 1.0)) {
    throw DomainError("populations must lie in [0, 1]");
  }
  if (!(detection_limit >= 0.0 && detection_limit < 0.5)) throw DomainError("detection limit must lie in [0, 0.5)");

  // Offset implied by a population, and which side is open (+1: at least,
  // -1: at most, 0: exact).
  struct Side {
    double offset;
    int open;
  };
  auto side = [detection_limit](double p, const Temperature& t) -> Side {
    const double kT = t.thermal_energy_eV();
    if (p <= detection_limit) {
      if (detection_limit == 0.0) return {std::numeric_limits<double>::infinity(), +1};
      return {kT * std::log(1.0 / detection_limit - 1.0), +1};
    }
    if (p >= 1.0 - detection_limit) {
      if (detection_limit == 0.0) return {-std::numeric_limits<double>::infinity(), -1};
      return {-kT * std::log(1.0 / detection_limit - 1.0), -1};
    }
    return {kT * std::log(1.0 / p - 1.0), 0};
  };

  const Side b = side(p_before, before);
  const Side a = side(p_after, after);
  // shift = offset_before - offset_after; an open "after" side flips direction.
  const int lower = (b.open > 0) + (a.open < 0);
  const int upper = (b.open < 0) + (a.open > 0);
  const double value = b.offset - a.offset;

  if (lower == 0 && upper == 0) return {ShiftKind::Point, value};
  if (upper == 0) return {ShiftKind::LowerBound, value};
  if (lower == 0) return {ShiftKind::UpperBound, value};
  return {ShiftKind::Indeterminate, std::numeric_limits<double>::quiet_NaN()};
}

}  // namespace chargetune
