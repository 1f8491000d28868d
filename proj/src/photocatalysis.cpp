#include "chargetune/photocatalysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "chargetune/errors.hpp"
#include "regression.hpp"
#include "stiff_ode.hpp"

namespace chargetune {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_source(double bicarbonate, double source_rate) {
  if (!std::isfinite(source_rate) || source_rate < 0.0) throw DomainError("source rate must be non-negative");
  if (!std::isfinite(bicarbonate) || bicarbonate < 0.0) throw DomainError("bicarbonate must be non-negative");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// x = (h, e, OH, C., C-H, HCO3, C-OH)
struct NetworkRhs {
  SurfaceKineticsParams p;
  double source;

  void operator()(const double* x, double* f) const {
    const double capture = p.k6 * x[5] * x[0];
    const double annihilation = p.k5 * x[0] * x[1];
    const double abstraction = p.k7 * x[2] * x[4];
    const double termination = p.k8 * x[3] * x[2];
    f[0] = source - annihilation - capture;
    f[1] = source - annihilation - capture;
    f[2] = capture - abstraction - termination;
    f[3] = abstraction - termination;
    f[4] = -abstraction;
    f[5] = -capture;
    f[6] = termination;
  }
};

struct NetworkJacobian {
  SurfaceKineticsParams p;

  void operator()(const double* x, double* jac) const {
    std::fill(jac, jac + 49, 0.0);
    auto j = [jac](int r, int c) -> double& { return jac[7 * r + c]; };
    const double h = x[0], e = x[1], oh = x[2], c = x[3], ch = x[4], hco3 = x[5];
    for (int r : {0, 1}) {
      j(r, 0) = -p.k5 * e - p.k6 * hco3;
      j(r, 1) = -p.k5 * h;
      j(r, 5) = -p.k6 * h;
    }
    j(2, 0) = p.k6 * hco3;
    j(2, 2) = -p.k7 * ch - p.k8 * c;
    j(2, 3) = -p.k8 * oh;
    j(2, 4) = -p.k7 * oh;
    j(2, 5) = p.k6 * h;
    j(3, 2) = p.k7 * ch - p.k8 * c;
    j(3, 3) = -p.k8 * oh;
    j(3, 4) = p.k7 * oh;
    j(4, 2) = -p.k7 * ch;
    j(4, 4) = -p.k7 * oh;
    j(5, 0) = -p.k6 * hco3;
    j(5, 5) = -p.k6 * h;
    j(6, 2) = p.k8 * c;
    j(6, 3) = p.k8 * oh;
  }
};

std::vector<double> pack(const SurfaceNetworkState& s) {
  return {s.holes, s.electrons, s.hydroxyl, s.carbon_radical, s.ch_bonds, s.bicarbonate, s.hydroxylated};
}

SurfaceNetworkState unpack(const std::vector<double>& x) {
  auto nn = [](double v) { return std::max(v, 0.0); };
  return {nn(x[0]), nn(x[1]), nn(x[2]), nn(x[3]), nn(x[4]), nn(x[5]), nn(x[6])};
}

struct Segment {
  double begin;
  double end;
  bool on;
};

// Constant-illumination segments of the schedule covering [0, t_end].
std::vector<Segment> segments_until(const IlluminationSchedule& schedule, double t_end) {
  std::vector<Segment> out;
  double t = 0.0;
  while (t <= t_end) {
    for (const auto& c : schedule.cycles) {
      if (c.on_s > 0.0) out.push_back({t, t + c.on_s, true});
      t += c.on_s;
      if (c.off_s > 0.0) out.push_back({t, t + c.off_s, false});
      t += c.off_s;
      if (t > t_end) break;
    }
    if (!schedule.repeat) break;
  }
  if (t <= t_end) out.push_back({t, kInf, false});
  return out;
}

}  // namespace

void SurfaceKineticsParams::validate() const {
  if (!(positive(k5) && positive(k6) && positive(k7) && positive(k8))) {
    throw DomainError("surface rate constants k5..k8 must be positive and finite");
  }
}

void SurfaceNetworkState::validate() const {
  for (double v : {holes, electrons, hydroxyl, carbon_radical, ch_bonds, bicarbonate, hydroxylated}) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("network concentrations must be finite and non-negative");
  }
}

double hole_steady_state(const SurfaceKineticsParams& params, double bicarbonate, double source_rate) {
  params.validate();
  check_source(bicarbonate, source_rate);
  if (source_rate == 0.0) return 0.0;
  const double b = params.k6 * bicarbonate;
  return 2.0 * source_rate / (b + std::sqrt(b * b + 4.0 * params.k5 * source_rate));
}

double rate_constant(const SurfaceKineticsParams& params, double bicarbonate, double source_rate) {
  return params.k6 * hole_steady_state(params, bicarbonate, source_rate);
}

double recombination_limited_rate(const SurfaceKineticsParams& params, double source_rate) {
  params.validate();
  check_source(0.0, source_rate);
  return params.k6 * std::sqrt(source_rate / params.k5);
}

double transfer_limited_rate(double bicarbonate, double source_rate) {
  check_source(bicarbonate, source_rate);
  if (source_rate == 0.0) return 0.0;
  return bicarbonate > 0.0 ? source_rate / bicarbonate : kInf;
}

double recombination_to_transfer_ratio(const SurfaceKineticsParams& params, double bicarbonate,
                                       double source_rate) {
  const double h = hole_steady_state(params, bicarbonate, source_rate);
  const double b = params.k6 * bicarbonate;
  if (b == 0.0) return kInf;
  return params.k5 * h / b;
}

KineticRegime classify_regime(const SurfaceKineticsParams& params, double bicarbonate, double source_rate) {
  const double r = recombination_to_transfer_ratio(params, bicarbonate, source_rate);
  if (r >= 100.0) return KineticRegime::RecombinationDominated;
  if (r <= 0.01) return KineticRegime::TransferDominated;
  return KineticRegime::Mixed;
}

double local_source_exponent(const SurfaceKineticsParams& params, double bicarbonate, double source_rate) {
  const double r = recombination_to_transfer_ratio(params, bicarbonate, source_rate);
  if (std::isinf(r)) return 0.5;
  return (r + 1.0) / (2.0 * r + 1.0);
}

ScalingExponent flux_scaling_exponent(const SurfaceKineticsParams& params, double bicarbonate,
                                      const std::function<double(double)>& source_at_flux,
                                      std::span<const double> fluxes) {
  if (fluxes.size() < 5) throw DomainError("scaling sweep needs at least 5 fluxes");
  const auto [lo, hi] = std::minmax_element(fluxes.begin(), fluxes.end());
  if (!(*lo > 0.0) || !std::isfinite(*hi)) throw DomainError("scaling fluxes must be positive and finite");
  if (*hi < 10.0 * *lo) throw DomainError("scaling sweep must span at least one decade");

  std::vector<double> x, y;
  for (double f : fluxes) {
    const double k = rate_constant(params, bicarbonate, source_at_flux(f));
    if (!(k > 0.0)) throw DomainError("simulated rate is not positive; cannot take logarithms");
    x.push_back(std::log(f));
    y.push_back(std::log(k));
  }
  const auto line = detail::fit_line(x, y, {}, false);
  return {line.slope, std::exp(line.intercept), std::sqrt(line.weighted_rss / static_cast<double>(line.n))};
}

std::vector<NetworkSample> network_transient(const SurfaceKineticsParams& params,
                                             const SurfaceNetworkState& initial, double source_rate,
                                             std::span<const double> times, const NetworkOptions& options) {
  return network_transient(params, initial, source_rate, IlluminationSchedule::continuous(), times, options);
}

std::vector<NetworkSample> network_transient(const SurfaceKineticsParams& params,
                                             const SurfaceNetworkState& initial, double source_rate,
                                             const IlluminationSchedule& schedule,
                                             std::span<const double> times, const NetworkOptions& options) {
  params.validate();
  initial.validate();
  schedule.validate();
  check_source(0.0, source_rate);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) throw DomainError("sample times must be finite and non-negative");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample times must be non-decreasing");
  }

  std::vector<NetworkSample> out;
  if (times.empty()) return out;
  out.reserve(times.size());

  const detail::StiffTolerances tol{options.relative_tolerance, options.absolute_tolerance};
  const NetworkJacobian jac{params};

  std::vector<double> x = pack(initial);
  double t = times.front();
  std::size_t next = 0;
  while (next < times.size() && times[next] == t) {
    out.push_back({t, cumulative_on_time(schedule, t), initial});
    ++next;
  }

  for (const Segment& seg : segments_until(schedule, times.back())) {
    if (next == times.size()) break;
    if (seg.end <= t) continue;
    const double seg_end = std::min(seg.end, times.back());
    std::vector<double> grid{t};
    const std::size_t first = next;
    while (next < times.size() && times[next] <= seg_end) grid.push_back(times[next++]);
    const bool end_is_sample = grid.back() == seg_end && grid.size() > 1;
    if (!end_is_sample) grid.push_back(seg_end);

    const NetworkRhs rhs{params, seg.on ? source_rate : 0.0};
    const auto states = detail::integrate_stiff(rhs, jac, x, grid, tol);
    for (std::size_t i = first; i < next; ++i) {
      const auto& s = states[i - first + 1];
      out.push_back({times[i], cumulative_on_time(schedule, times[i]), unpack(s)});
    }
    x = states.back();
    t = seg_end;
  }
  return out;
}

double ch_decay(double k_per_s, double t_s, double initial_fraction) {
  if (!(k_per_s >= 0.0) || !(t_s >= 0.0)) throw DomainError("rate and time must be non-negative");
  if (!(initial_fraction >= 0.0 && initial_fraction <= 1.0)) {
    throw DomainError("initial hydrogen fraction must lie in [0, 1]");
  }
  return std::clamp(initial_fraction * std::exp(-k_per_s * t_s), 0.0, 1.0);
}

double effective_nv_count(const PillarGeometry& geometry, double nv_density_per_m3) {
  geometry.validate();
  if (!std::isfinite(nv_density_per_m3) || nv_density_per_m3 < 0.0) {
    throw DomainError("NV density must be non-negative");
  }
  const double r1 = geometry.apex_top_radius_m;
  const double r2 = geometry.apex_base_radius_m;
  const double volume = constants::pi * geometry.apex_height_m / 3.0 * (r1 * r1 + r2 * r2 + r1 * r2);
  return nv_density_per_m3 * volume;
}

double surface_carbon_sites(const PillarGeometry& geometry, double carbon_density_per_m2) {
  if (!positive(geometry.apex_top_radius_m)) throw DomainError("apex radius must be positive");
  if (!positive(carbon_density_per_m2)) throw DomainError("surface carbon density must be positive");
  const double r1 = geometry.apex_top_radius_m;
  return carbon_density_per_m2 * constants::pi * r1 * r1;
}

double macroscopic_rate_estimate(double eta, double n_eff, double gamma_ion_hz,
                                 const PillarGeometry& geometry, double carbon_density_per_m2) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("efficiency eta must lie in [0, 1]");
  if (!std::isfinite(n_eff) || n_eff < 0.0) throw DomainError("N_eff must be non-negative");
  if (!std::isfinite(gamma_ion_hz) || gamma_ion_hz < 0.0) throw DomainError("ionisation rate must be non-negative");
  return eta * n_eff * gamma_ion_hz / surface_carbon_sites(geometry, carbon_density_per_m2);
}

}  // namespace chargetune
