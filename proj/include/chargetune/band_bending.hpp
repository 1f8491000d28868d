#pragma once

#include <cstdint>
#include <vector>

#include "chargetune/core_model.hpp"
#include "chargetune/geometry.hpp"

namespace chargetune {

struct SurfaceBandBending {
  double e_bb_eV;  // clamped at 0
  bool flat_band;  // the raw value was negative (accumulation, not modelled)
};

/// E_BB = mu_e - E_ea - (E_c - E_F) deep in the bulk.
SurfaceBandBending surface_band_bending(const MaterialParams& material, const SurfaceState& surface);

/// Depletion depth for a surface band bending of `e_bb_eV` (as a potential).
double depletion_depth(const MaterialParams& material, double e_bb_eV);

/// Volume charge density e N_d / (eps0 eps_r) expressed as the curvature of
/// E_vac in eV/m^2.
double space_charge_curvature(const MaterialParams& material);

/// Flat-surface depletion: E_vac(z) = E_BB (z + d)^2 / d^2 for -d <= z <= 0,
/// z measured upward from the surface.
struct DepletionProfile1D {
  double e_bb_eV = 0.0;
  double d_dep_m = 0.0;
  MaterialParams material;

  double vacuum_level_eV(double z_m) const;
  /// Vertical field component -dE_vac/dz in V/m.
  double field_z_V_per_m(double z_m) const;
};

DepletionProfile1D flat_depletion(const MaterialParams& material, double e_bb_eV);

/// E_vac(0) - E_vac(-depth).
double delta_bb_at_depth(const DepletionProfile1D& profile, double depth_m);

enum class NodeKind : std::uint8_t {
  Vacuum,    // outside the diamond, not part of the problem
  Surface,   // diamond surface, E_vac = E_BB
  FarField,  // rho = rho0 column, flat-surface profile
  Bottom,    // bottom of the domain, E_vac = 0
  Interior,  // unknown
};

struct GridSpec {
  int n_rho = 200;  // cells across [0, rho0]
  int n_z = 400;    // cells across [-depth, pillar top]
  double depth_below_surface_m = 0.0;  // 0: three times the flat depletion depth
  int max_iterations = 200;            // active-set updates
  double residual_tolerance = 1e-6;

  void validate() const;
};

struct SolverStats {
  int iterations = 0;
  double residual = 0.0;          // max relative residual on depleted interior nodes
  double complementarity = 0.0;   // max |min(E_vac, multiplier)| / E_BB
  std::size_t depleted_nodes = 0;
  std::size_t neutral_nodes = 0;
  bool converged = false;
};

/// Vacuum-level energy on a uniform (rho, z) grid. Node (i, j) sits at
/// rho = i h_rho, z = z_min + j h_z; storage is row-major in j.
class PotentialField {
 public:
  PotentialField(PillarGeometry geometry, MaterialParams material, double e_bb_eV, std::vector<double> rho,
                 std::vector<double> z, std::vector<double> evac, std::vector<NodeKind> kind,
                 std::vector<std::uint8_t> depleted, SolverStats stats);

  int n_rho_nodes() const noexcept { return static_cast<int>(rho_.size()); }
  int n_z_nodes() const noexcept { return static_cast<int>(z_.size()); }
  const std::vector<double>& rho() const noexcept { return rho_; }
  const std::vector<double>& z() const noexcept { return z_; }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * rho_.size() + i; }

  double evac(int i, int j) const { return evac_[index(i, j)]; }
  NodeKind kind(int i, int j) const { return kind_[index(i, j)]; }
  bool in_depletion(int i, int j) const { return depleted_[index(i, j)] != 0; }
  bool is_diamond(int i, int j) const { return kind(i, j) != NodeKind::Vacuum; }

  const std::vector<double>& evac_values() const noexcept { return evac_; }
  const PillarGeometry& geometry() const noexcept { return geometry_; }
  const MaterialParams& material() const noexcept { return material_; }
  double e_bb_eV() const noexcept { return e_bb_; }
  const SolverStats& stats() const noexcept { return stats_; }

  /// Bilinear interpolation; throws DomainError outside the grid or if a
  /// corner of the cell lies in vacuum.
  double interpolate(double rho_m, double z_m) const;

  /// True when every diamond node above z = 0 is inside the depletion region.
  bool pillar_fully_depleted() const;

 private:
  PillarGeometry geometry_;
  MaterialParams material_;
  double e_bb_;
  std::vector<double> rho_, z_, evac_;
  std::vector<NodeKind> kind_;
  std::vector<std::uint8_t> depleted_;
  SolverStats stats_;
};

/// Axisymmetric obstacle problem: E_vac >= 0, Laplacian E_vac = e N_d/(eps0 eps_r)
/// where E_vac > 0, E_vac = E_BB on the diamond surface and the flat profile at
/// rho0. Throws SolverError when the active set does not settle in budget.
PotentialField pillar_poisson_solve(const PillarGeometry& geometry, const MaterialParams& material,
                                    double e_bb_eV, const GridSpec& grid = {});

struct FieldGrid {
  int n_rho = 0;
  int n_z = 0;
  std::vector<double> e_rho;  // V/m, same layout as PotentialField; 0 in vacuum
  std::vector<double> e_z;

  double magnitude(std::size_t k) const;
};

/// E = -grad(E_vac)/e by centred differences (one-sided next to vacuum or the
/// grid edge); the radial component on the axis is zero.
FieldGrid field_lines(const PotentialField& field);

/// Half-range of delta_BB over [mean - spread/2, mean + spread/2].
double emitter_level_spread(const DepletionProfile1D& profile, double mean_depth_m, double depth_spread_m);

/// Same along the axis below the pillar top (or the flat surface).
double emitter_level_spread(const PotentialField& field, double mean_depth_m, double depth_spread_m);

}  // namespace chargetune
