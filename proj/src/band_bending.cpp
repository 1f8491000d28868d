#include "chargetune/band_bending.hpp"

#include <algorithm>
#include <cmath>

#include "chargetune/errors.hpp"

namespace chargetune {

SurfaceBandBending surface_band_bending(const MaterialParams& material, const SurfaceState& surface) {
  material.validate();
  surface.validate();
  const double raw = surface.mu_e_eV - surface.electron_affinity_eV() - material.bulk_fermi_depth_eV;
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

double space_charge_curvature(const MaterialParams& material) {
  return constants::elementary_charge * material.donor_density_per_m3 /
         (constants::vacuum_permittivity * material.rel_permittivity);
}

double depletion_depth(const MaterialParams& material, double e_bb_eV) {
  material.validate();
  if (!(std::isfinite(e_bb_eV) && e_bb_eV >= 0.0)) throw DomainError("band bending must be non-negative");
  return std::sqrt(2.0 * e_bb_eV / space_charge_curvature(material));
}

double DepletionProfile1D::vacuum_level_eV(double z_m) const {
  if (d_dep_m <= 0.0) return z_m >= 0.0 ? e_bb_eV : 0.0;
  if (z_m >= 0.0) return e_bb_eV;
  if (z_m <= -d_dep_m) return 0.0;
  const double s = (z_m + d_dep_m) / d_dep_m;
  return e_bb_eV * s * s;
}

double DepletionProfile1D::field_z_V_per_m(double z_m) const {
  if (d_dep_m <= 0.0 || z_m > 0.0 || z_m <= -d_dep_m) return 0.0;
  return -2.0 * e_bb_eV * (z_m + d_dep_m) / (d_dep_m * d_dep_m);
}

DepletionProfile1D flat_depletion(const MaterialParams& material, double e_bb_eV) {
  return {e_bb_eV, depletion_depth(material, e_bb_eV), material};
}

double delta_bb_at_depth(const DepletionProfile1D& profile, double depth_m) {
  if (!(depth_m >= 0.0)) throw DomainError("depth must be non-negative");
  return profile.vacuum_level_eV(0.0) - profile.vacuum_level_eV(-depth_m);
}

double emitter_level_spread(const DepletionProfile1D& profile, double mean_depth_m, double depth_spread_m) {
  if (!(depth_spread_m >= 0.0)) throw DomainError("depth spread must be non-negative");
  if (!(mean_depth_m >= 0.0)) throw DomainError("mean depth must be non-negative");
  const double lo = std::max(0.0, mean_depth_m - 0.5 * depth_spread_m);
  const double hi = mean_depth_m + 0.5 * depth_spread_m;
  // delta_BB is monotone in depth for the parabola.
  return 0.5 * (delta_bb_at_depth(profile, hi) - delta_bb_at_depth(profile, lo));
}

// --- PotentialField ---------------------------------------------------------

void GridSpec::validate() const {
  if (n_rho < 4 || n_z < 4) throw DomainError("grid needs at least 4 cells per direction");
  if (!(depth_below_surface_m >= 0.0)) throw DomainError("domain depth must be non-negative");
  if (max_iterations < 1) throw DomainError("iteration budget must be positive");
  if (!(residual_tolerance > 0.0)) throw DomainError("residual tolerance must be positive");
}

PotentialField::PotentialField(PillarGeometry geometry, MaterialParams material, double e_bb_eV,
                               std::vector<double> rho, std::vector<double> z, std::vector<double> evac,
                               std::vector<NodeKind> kind, std::vector<std::uint8_t> depleted, SolverStats stats)
    : geometry_(geometry),
      material_(material),
      e_bb_(e_bb_eV),
      rho_(std::move(rho)),
      z_(std::move(z)),
      evac_(std::move(evac)),
      kind_(std::move(kind)),
      depleted_(std::move(depleted)),
      stats_(stats) {}

double PotentialField::interpolate(double rho_m, double z_m) const {
  const double h_rho = rho_[1] - rho_[0];
  const double h_z = z_[1] - z_[0];
  const double fi = rho_m / h_rho;
  const double fj = (z_m - z_.front()) / h_z;
  const int ni = n_rho_nodes(), nj = n_z_nodes();
  if (fi < -1e-9 || fj < -1e-9 || fi > ni - 1 + 1e-9 || fj > nj - 1 + 1e-9) {
    throw DomainError("interpolation point outside the grid");
  }
  const int i = std::clamp(static_cast<int>(std::floor(fi)), 0, ni - 2);
  const int j = std::clamp(static_cast<int>(std::floor(fj)), 0, nj - 2);
  const double a = std::clamp(fi - i, 0.0, 1.0);
  const double b = std::clamp(fj - j, 0.0, 1.0);
  double v = 0.0;
  for (int dj = 0; dj < 2; ++dj) {
    for (int di = 0; di < 2; ++di) {
      const double w = (di ? a : 1.0 - a) * (dj ? b : 1.0 - b);
      if (w == 0.0) continue;
      if (!is_diamond(i + di, j + dj)) throw DomainError("interpolation point touches vacuum");
      v += w * evac(i + di, j + dj);
    }
  }
  return v;
}

bool PotentialField::pillar_fully_depleted() const {
  for (int j = 0; j < n_z_nodes(); ++j) {
    if (z_[j] <= 0.0) continue;
    for (int i = 0; i < n_rho_nodes(); ++i) {
      if (is_diamond(i, j) && !in_depletion(i, j)) return false;
    }
  }
  return true;
}

double FieldGrid::magnitude(std::size_t k) const { return std::hypot(e_rho[k], e_z[k]); }

namespace {

// Derivative along one grid line at position m of n, where `value(m)` and
// `inside(m)` query the line. Centred when both neighbours are diamond,
// otherwise the best one-sided difference available.
template <class Value, class Inside>
double line_derivative(int m, int n, double h, Value value, Inside inside) {
  const bool left = m - 1 >= 0 && inside(m - 1);
  const bool right = m + 1 < n && inside(m + 1);
  if (left && right) return (value(m + 1) - value(m - 1)) / (2.0 * h);
  if (right) {
    if (m + 2 < n && inside(m + 2)) return (-3.0 * value(m) + 4.0 * value(m + 1) - value(m + 2)) / (2.0 * h);
    return (value(m + 1) - value(m)) / h;
  }
  if (left) {
    if (m - 2 >= 0 && inside(m - 2)) return (3.0 * value(m) - 4.0 * value(m - 1) + value(m - 2)) / (2.0 * h);
    return (value(m) - value(m - 1)) / h;
  }
  return 0.0;
}

}  // namespace

FieldGrid field_lines(const PotentialField& field) {
  const int ni = field.n_rho_nodes(), nj = field.n_z_nodes();
  const double h_rho = field.rho()[1] - field.rho()[0];
  const double h_z = field.z()[1] - field.z()[0];
  FieldGrid g;
  g.n_rho = ni;
  g.n_z = nj;
  g.e_rho.assign(static_cast<std::size_t>(ni) * nj, 0.0);
  g.e_z.assign(g.e_rho.size(), 0.0);
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      if (!field.is_diamond(i, j)) continue;
      const std::size_t k = field.index(i, j);
      if (i > 0) {
        g.e_rho[k] = -line_derivative(
            i, ni, h_rho, [&](int m) { return field.evac(m, j); }, [&](int m) { return field.is_diamond(m, j); });
      }
      g.e_z[k] = -line_derivative(
          j, nj, h_z, [&](int m) { return field.evac(i, m); }, [&](int m) { return field.is_diamond(i, m); });
    }
  }
  return g;
}

double emitter_level_spread(const PotentialField& field, double mean_depth_m, double depth_spread_m) {
  if (!(depth_spread_m >= 0.0)) throw DomainError("depth spread must be non-negative");
  if (!(mean_depth_m >= 0.0)) throw DomainError("mean depth must be non-negative");
  const double top = field.z().back();
  const double bottom = field.z().front();
  const double surface = field.interpolate(0.0, top);
  auto delta = [&](double depth) { return surface - field.interpolate(0.0, std::max(bottom, top - depth)); };

  const double lo = std::max(0.0, mean_depth_m - 0.5 * depth_spread_m);
  const double hi = mean_depth_m + 0.5 * depth_spread_m;
  constexpr int samples = 64;
  double vmin = delta(lo), vmax = vmin;
  for (int s = 1; s <= samples; ++s) {
    const double v = delta(lo + (hi - lo) * s / samples);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  return 0.5 * (vmax - vmin);
}

}  // namespace chargetune
