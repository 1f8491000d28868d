#include "chargetune/charge_cycle.hpp"

#include <cmath>
#include <Eigen/Dense>

#include "chargetune/errors.hpp"
#include "stiff_ode.hpp"

namespace chargetune {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_intensity(double intensity) {
  if (!std::isfinite(intensity) || intensity < 0.0) {
    throw DomainError("intensity must be finite and non-negative");
  }
}

// Generator of the linear system x' = M x with x = (NV-, NV-*, NV0, NV0*).
Eigen::Matrix4d rate_matrix(const NVCycleParams& p, double I) {
  Eigen::Matrix4d m;
  // clang-format off
  m << -p.k1 * I,  p.gamma1,              0.0,       p.k4 * I,
        p.k1 * I, -p.gamma1 - p.k2 * I,   0.0,       0.0,
        0.0,       p.k2 * I,             -p.k3 * I,  p.gamma0,
        0.0,       0.0,                   p.k3 * I, -p.gamma0 - p.k4 * I;
  // clang-format on
  return m;
}

}  // namespace

void NVCycleParams::validate() const {
  if (!(positive(k1) && positive(k2) && positive(k3) && positive(k4))) {
    throw DomainError("NV cross-section rates k1..k4 must be positive and finite");
  }
  if (!(positive(gamma0) && positive(gamma1))) {
    throw DomainError("NV relaxation rates must be positive and finite");
  }
  if (!positive(total_nv)) throw DomainError("total NV population must be positive");
}

std::vector<NVSample> nv_transient(const NVCycleParams& params, double intensity,
                                   std::span<const double> times, const NVPopulations& initial,
                                   const TransientOptions& options) {
  params.validate();
  check_intensity(intensity);
  for (double c : initial.as_array()) {
    if (!std::isfinite(c) || c < 0.0) throw DomainError("initial populations must be finite and non-negative");
  }
  if (std::abs(initial.total() - params.total_nv) > 1e-9 * params.total_nv) {
    throw DomainError("initial populations must sum to total_nv");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw DomainError("sample times must be finite");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("sample times must be non-decreasing");
  }

  const Eigen::Matrix4d m = rate_matrix(params, intensity);

  auto rhs = [&m](const double* x, double* dxdt) {
    for (int r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c) s += m(r, c) * x[c];
      dxdt[r] = s;
    }
  };
  auto jac = [&m](const double*, double* j) {
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) j[4 * r + c] = m(r, c);
    }
  };

  const auto a = initial.as_array();
  const std::vector<double> x0(a.begin(), a.end());
  const auto states = detail::integrate_stiff(
      rhs, jac, x0, times,
      {options.relative_tolerance, options.absolute_tolerance * params.total_nv});

  std::vector<NVSample> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    out.push_back({times[i], NVPopulations{s[0], s[1], s[2], s[3]}});
  }
  return out;
}

NVPopulations nv_steady_state(const NVCycleParams& params, double intensity) {
  params.validate();
  check_intensity(intensity);
  if (intensity == 0.0) {
    throw DegenerateSystemError("NV steady state is not unique without illumination");
  }
  const double I = intensity;
  Eigen::Matrix4d a;
  // clang-format off
  a << params.k1 * I, -(params.gamma1 + params.k2 * I), 0.0,            0.0,
       0.0,            0.0,                              params.k3 * I, -(params.gamma0 + params.k4 * I),
       0.0,            params.k2,                        0.0,           -params.k4,
       1.0,            1.0,                              1.0,            1.0;
  // clang-format on
  Eigen::Vector4d b(0.0, 0.0, 0.0, params.total_nv);
  // Rows scale with k I; without equilibration a strong beam swamps the
  // conservation row and the factorisation loses rank.
  for (int r = 0; r < 4; ++r) {
    const double s = a.row(r).cwiseAbs().maxCoeff();
    a.row(r) /= s;
    b(r) /= s;
  }
  const Eigen::Vector4d x = a.fullPivLu().solve(b);
  return {x(0), x(1), x(2), x(3)};
}

double generation_rate(const NVCycleParams& params, double intensity) {
  params.validate();
  check_intensity(intensity);
  if (intensity == 0.0) return 0.0;
  return params.k4 * intensity * nv_steady_state(params, intensity).nv_zero_excited;
}

double saturated_alpha0(const NVCycleParams& params) {
  params.validate();
  const double inv4 = 1.0 / params.k4;
  return inv4 / (1.0 / params.k1 + 1.0 / params.k2 + 1.0 / params.k3 + inv4);
}

CarrierSourceSpec::CarrierSourceSpec(std::vector<CarrierSource> sources) : sources_(std::move(sources)) {
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    const auto& s = sources_[i];
    if (!std::isfinite(s.threshold_eV) || !std::isfinite(s.coefficient) || s.coefficient < 0.0) {
      throw DomainError("carrier source coefficients must be finite and non-negative");
    }
    if (i > 0 && !(s.threshold_eV > sources_[i - 1].threshold_eV)) {
      throw DomainError("carrier source thresholds must be strictly increasing");
    }
  }
}

CarrierSourceSpec CarrierSourceSpec::nv_and_divacancy(double nv_coefficient, double divacancy_coefficient) {
  return CarrierSourceSpec({{2.16, nv_coefficient}, {2.45, divacancy_coefficient}});
}

double multi_species_generation(const CarrierSourceSpec& spec, double photon_energy_eV, double flux) {
  if (!std::isfinite(flux) || flux < 0.0) throw DomainError("flux must be finite and non-negative");
  double total = 0.0;
  for (const auto& s : spec.sources()) {
    if (s.threshold_eV <= photon_energy_eV) total += s.coefficient;
  }
  return total * flux;
}

}  // namespace chargetune
