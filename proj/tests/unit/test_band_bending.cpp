#include <doctest.h>

#include <cmath>

#include "chargetune/band_bending.hpp"
#include "chargetune/errors.hpp"
#include "oracles/closed_forms.hpp"
#include "support.hpp"

using namespace chargetune;
using testing::rel;

namespace {

double flat_error(int n_z) {
  const MaterialParams m;
  GridSpec g;
  g.n_rho = std::max(8, n_z / 8);
  g.n_z = n_z;
  const auto f = pillar_poisson_solve(PillarGeometry::flat(), m, 3.9, g);
  const double d = oracle::depletion_depth(3.9, m.rel_permittivity, m.donor_density_per_m3);
  double worst = 0.0;
  for (int j = 0; j < f.n_z_nodes(); ++j) {
    for (int i = 0; i < f.n_rho_nodes(); ++i) {
      if (!f.is_diamond(i, j)) continue;
      worst = std::max(worst, std::abs(f.evac(i, j) - oracle::parabola(3.9, d, f.z()[j])) / 3.9);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("surface band bending") {
  const MaterialParams m;
  auto h = surface_band_bending(m, SurfaceState::hydrogenated());
  CHECK(h.e_bb_eV == doctest::Approx(3.9).epsilon(1e-12));
  CHECK_FALSE(h.flat_band);
  CHECK(surface_band_bending(m, SurfaceState::oxidized()).e_bb_eV == doctest::Approx(1.9).epsilon(1e-12));

  SurfaceState s;
  s.ea_initial_eV = s.mu_e_eV - m.bulk_fermi_depth_eV;
  s.ea_final_eV = s.ea_initial_eV + 1.0;
  CHECK(surface_band_bending(m, s).e_bb_eV == doctest::Approx(0.0));

  s.ea_initial_eV = 4.0;
  s.ea_final_eV = 4.5;
  const auto acc = surface_band_bending(m, s);
  CHECK(acc.e_bb_eV == 0.0);
  CHECK(acc.flat_band);
}

TEST_CASE("flat depletion depth") {
  const MaterialParams m;
  CHECK(flat_depletion(m, 3.9).d_dep_m == doctest::Approx(1.65e-6).epsilon(0.005));
  CHECK(flat_depletion(m, 1.9).d_dep_m == doctest::Approx(1.15e-6).epsilon(0.005));
  for (double e : {0.1, 1.0, 3.9, 5.0}) {
    CHECK(rel(depletion_depth(m, e), oracle::depletion_depth(e, m.rel_permittivity, m.donor_density_per_m3)) < 1e-12);
  }
  const auto zero = flat_depletion(m, 0.0);
  CHECK(zero.d_dep_m == 0.0);
  CHECK(zero.vacuum_level_eV(-1e-7) == 0.0);
  CHECK(zero.field_z_V_per_m(0.0) == 0.0);
  CHECK_THROWS_AS(depletion_depth(m, -0.1), DomainError);
}

TEST_CASE("depletion depth monotonicity") {
  MaterialParams m;
  double last = 0.0;
  for (double e = 0.1; e < 5.0; e += 0.1) {
    const double d = depletion_depth(m, e);
    CHECK(d > last);
    last = d;
  }
  const double d0 = depletion_depth(m, 2.0);
  m.donor_density_per_m3 *= 2;
  CHECK(depletion_depth(m, 2.0) < d0);
  CHECK(depletion_depth(m, 2.0) == doctest::Approx(d0 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("flat profile shape") {
  const MaterialParams m;
  const auto p = flat_depletion(m, 3.9);
  const double d = p.d_dep_m;
  CHECK(p.vacuum_level_eV(0.0) == doctest::Approx(3.9));
  CHECK(p.vacuum_level_eV(-d) == doctest::Approx(0.0));
  CHECK(p.vacuum_level_eV(-2 * d) == 0.0);
  CHECK(rel(p.vacuum_level_eV(-0.3 * d), oracle::parabola(3.9, d, -0.3 * d)) < 1e-12);
  CHECK(p.field_z_V_per_m(0.0) == doctest::Approx(-2 * 3.9 / d).epsilon(1e-12));
  CHECK(p.field_z_V_per_m(-d) == doctest::Approx(0.0));
  // Curvature of the parabola is the space charge term.
  CHECK(2 * 3.9 / (d * d) == doctest::Approx(space_charge_curvature(m)).epsilon(1e-12));
}

TEST_CASE("band bending at emitter depth") {
  const auto p = flat_depletion(MaterialParams{}, 3.9);
  CHECK(delta_bb_at_depth(p, 0.0) == 0.0);
  CHECK(delta_bb_at_depth(p, p.d_dep_m) == doctest::Approx(3.9));
  CHECK(delta_bb_at_depth(p, 3 * p.d_dep_m) == doctest::Approx(3.9));
  CHECK(delta_bb_at_depth(p, 50e-9) == doctest::Approx(0.232).epsilon(0.005));
}

TEST_CASE("emitter level spread") {
  const auto p = flat_depletion(MaterialParams{}, 3.9);
  CHECK(emitter_level_spread(p, 50e-9, 0.0) == 0.0);
  CHECK(emitter_level_spread(p, 50e-9, 10e-9) == doctest::Approx(0.023).epsilon(0.05));
  // Half-range over the whole region: E_BB / 2.
  CHECK(emitter_level_spread(p, p.d_dep_m, 2 * p.d_dep_m) == doctest::Approx(1.95).epsilon(1e-9));
}

TEST_CASE("flat geometry solve matches the closed form") {
  const double e = flat_error(100);
  CHECK(e < 5e-3);
}

TEST_CASE("flat geometry converges at second order") {
  const double e1 = flat_error(50), e2 = flat_error(100), e3 = flat_error(200);
  CHECK(std::log2(e1 / e2) > 1.8);
  CHECK(std::log2(e2 / e3) > 1.8);
}

TEST_CASE("solver invariants on the pillar") {
  const MaterialParams m;
  GridSpec g;
  g.n_rho = 150;
  g.n_z = 300;
  const PillarGeometry geo;
  const auto f = pillar_poisson_solve(geo, m, 3.9, g);
  const auto& st = f.stats();
  CHECK(st.converged);
  CHECK(st.residual <= g.residual_tolerance);
  CHECK(st.complementarity <= g.residual_tolerance);
  CHECK(f.pillar_fully_depleted());

  for (int j = 0; j < f.n_z_nodes(); ++j) {
    for (int i = 0; i < f.n_rho_nodes(); ++i) {
      if (!f.is_diamond(i, j)) continue;
      CHECK(f.evac(i, j) >= 0.0);
      if (f.kind(i, j) == NodeKind::Surface) CHECK(f.evac(i, j) == doctest::Approx(3.9));
    }
  }

  // Non-increasing with depth along the axis.
  int top = f.n_z_nodes() - 1;
  while (!f.is_diamond(0, top)) --top;
  for (int j = top; j > 0; --j) CHECK(f.evac(0, j - 1) <= f.evac(0, j) + 1e-12);

  const auto e = field_lines(f);
  for (int j = 0; j < f.n_z_nodes(); ++j) CHECK(e.e_rho[f.index(0, j)] == 0.0);

  CHECK_THROWS_AS(f.interpolate(-1.0, 0.0), DomainError);
  const int jm = f.n_z_nodes() / 4;
  CHECK(f.interpolate(f.rho()[3], f.z()[jm]) == doctest::Approx(f.evac(3, jm)).epsilon(1e-12));
  const double zm = 0.5 * (f.z()[jm] + f.z()[jm + 1]);
  CHECK(f.interpolate(f.rho()[3], zm) == doctest::Approx(0.5 * (f.evac(3, jm) + f.evac(3, jm + 1))).epsilon(1e-12));
}

TEST_CASE("flat field at the surface and the front") {
  const MaterialParams m;
  GridSpec g;
  g.n_rho = 25;
  g.n_z = 200;
  const auto f = pillar_poisson_solve(PillarGeometry::flat(), m, 3.9, g);
  const auto e = field_lines(f);
  const double d = oracle::depletion_depth(3.9, m.rel_permittivity, m.donor_density_per_m3);
  const int top = f.n_z_nodes() - 1;
  const int mid = f.n_rho_nodes() / 2;
  // One-sided difference at the surface is first order.
  CHECK(std::abs(e.e_z[f.index(mid, top)]) == doctest::Approx(2 * 3.9 / d).epsilon(0.03));
  int front = 0;
  for (int j = 0; j < f.n_z_nodes(); ++j) {
    if (std::abs(f.z()[j] + d) < std::abs(f.z()[front] + d)) front = j;
  }
  const double h = f.z()[1] - f.z()[0];
  CHECK(std::abs(e.e_z[f.index(mid, front)]) < 2 * 3.9 / d * (2 * h / d));
}

TEST_CASE("solver contract errors") {
  const MaterialParams m;
  GridSpec g;
  g.n_rho = 150;
  g.n_z = 300;
  g.max_iterations = 1;
  CHECK_THROWS_AS(pillar_poisson_solve(PillarGeometry{}, m, 3.9, g), SolverError);
  GridSpec coarse;
  coarse.n_rho = 20;
  coarse.n_z = 40;
  CHECK_THROWS_AS(pillar_poisson_solve(PillarGeometry{}, m, 3.9, coarse), DomainError);
  CHECK_THROWS_AS(pillar_poisson_solve(PillarGeometry{}, m, -1.0, GridSpec{}), DomainError);
}

TEST_CASE("geometry") {
  const PillarGeometry g;
  CHECK(g.radius_at(g.total_height_m()) == doctest::Approx(g.apex_top_radius_m));
  CHECK(g.radius_at(g.base_height_m) == doctest::Approx(g.apex_base_radius_m));
  CHECK(g.radius_at(-1e-9) == 0.0);
  CHECK(g.base_bottom_radius_m() > g.apex_base_radius_m);
  CHECK(PillarGeometry::flat().is_flat());
  PillarGeometry bad;
  bad.apex_top_radius_m = 1e-6;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}
