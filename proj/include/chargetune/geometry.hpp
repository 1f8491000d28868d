#pragma once

namespace chargetune {

/// Axisymmetric nanopillar: a truncated-cone apex on top of a trapezoidal base,
/// standing on a flat bulk surface at z = 0. `unit_cell_radius_m` is the radial
/// extent of the simulated cell (half the pillar pitch).
struct PillarGeometry {
  double apex_top_radius_m = 0.35e-6;
  double apex_base_radius_m = 0.5e-6;
  double apex_height_m = 0.7e-6;
  double base_height_m = 3.4e-6;
  double base_angle_deg = 83.0;
  double unit_cell_radius_m = 5e-6;

  /// A bare flat surface (zero pillar height) in a cell of the given radius.
  static PillarGeometry flat(double unit_cell_radius_m = 5e-6);

  bool is_flat() const noexcept { return apex_height_m <= 0.0 && base_height_m <= 0.0; }
  double total_height_m() const noexcept { return apex_height_m + base_height_m; }
  double base_bottom_radius_m() const;

  /// Pillar radius at height z above the bulk surface; 0 outside [0, total height].
  double radius_at(double z_m) const;

  void validate() const;
};

}  // namespace chargetune
