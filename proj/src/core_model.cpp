#include "chargetune/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "chargetune/errors.hpp"
#include "chargetune/geometry.hpp"

namespace chargetune {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw DomainError(message);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

Temperature::Temperature(double kelvin) : kelvin_(kelvin) {
  require(positive(kelvin), "temperature must be positive and finite");
}

Temperature Temperature::from_thermal_energy(double kT_eV) {
  require(positive(kT_eV), "thermal energy must be positive");
  return Temperature(kT_eV / constants::boltzmann_eV);
}

void MaterialParams::validate() const {
  require(positive(band_gap_eV), "band gap must be positive");
  require(std::isfinite(rel_permittivity) && rel_permittivity >= 1.0,
          "relative permittivity must be >= 1");
  require(positive(donor_density_per_m3), "donor density must be positive");
  require(positive(nv_density_per_m3), "NV density must be positive");
  require(positive(surface_carbon_density_per_m2), "surface carbon density must be positive");
  require(positive(ionization_rate_hz), "ionization rate must be positive");
  require(bulk_fermi_depth_eV > 0.0 && bulk_fermi_depth_eV < band_gap_eV,
          "bulk Fermi depth must lie inside the band gap");
}

SurfaceState SurfaceState::oxidized() {
  SurfaceState s;
  s.hydrogen_fraction = 0.0;
  return s;
}

double SurfaceState::electron_affinity_eV() const {
  return hydrogen_fraction * ea_initial_eV + (1.0 - hydrogen_fraction) * ea_final_eV;
}

void SurfaceState::validate() const {
  require(std::isfinite(mu_e_eV) && std::isfinite(ea_initial_eV) && std::isfinite(ea_final_eV),
          "surface energies must be finite");
  require(hydrogen_fraction >= 0.0 && hydrogen_fraction <= 1.0,
          "hydrogen fraction must lie in [0, 1]");
  require(ea_final_eV > ea_initial_eV, "oxidation must raise the electron affinity");
  require(std::isfinite(bicarbonate_conc) && bicarbonate_conc >= 0.0,
          "bicarbonate concentration must be non-negative");
}

IlluminationSchedule IlluminationSchedule::gated(double on_s, double off_s) {
  IlluminationSchedule s;
  s.cycles = {IlluminationCycle{on_s, off_s}};
  s.repeat = true;
  s.validate();
  return s;
}

void IlluminationSchedule::validate() const {
  require(!cycles.empty(), "illumination schedule needs at least one cycle");
  for (const auto& c : cycles) {
    require(c.on_s >= 0.0 && c.off_s >= 0.0, "schedule durations must be non-negative");
  }
  if (repeat) {
    double period = 0.0;
    for (const auto& c : cycles) period += c.on_s + c.off_s;
    require(std::isfinite(period) && period > 0.0, "a repeating schedule needs a finite, non-zero period");
  }
}

double cumulative_on_time(const IlluminationSchedule& schedule, double wall_clock_t_s) {
  require(wall_clock_t_s >= 0.0, "wall-clock time must be non-negative");
  schedule.validate();

  double remaining = wall_clock_t_s;
  double on_total = 0.0;

  if (schedule.repeat) {
    double period = 0.0;
    double on_per_period = 0.0;
    for (const auto& c : schedule.cycles) {
      period += c.on_s + c.off_s;
      on_per_period += c.on_s;
    }
    const double whole = std::floor(remaining / period);
    on_total = whole * on_per_period;
    remaining -= whole * period;
  }

  for (const auto& c : schedule.cycles) {
    if (remaining <= 0.0) break;
    const double on = std::min(remaining, c.on_s);
    on_total += on;
    remaining -= on;
    if (remaining <= 0.0) break;
    remaining -= std::min(remaining, c.off_s);
  }
  return on_total;
}

double photon_energy_from_wavelength_nm(double wavelength_nm) {
  require(positive(wavelength_nm), "wavelength must be positive");
  return constants::planck * constants::speed_of_light /
         (wavelength_nm * 1e-9 * constants::elementary_charge);
}

double wavelength_nm_from_photon_energy(double photon_energy_eV) {
  require(positive(photon_energy_eV), "photon energy must be positive");
  return constants::planck * constants::speed_of_light /
         (photon_energy_eV * constants::elementary_charge) * 1e9;
}

double photon_flux_from_power(double power_W, double photon_energy_eV) {
  require(positive(photon_energy_eV), "photon energy must be positive");
  require(std::isfinite(power_W) && power_W >= 0.0, "power must be non-negative");
  return power_W / (photon_energy_eV * constants::elementary_charge * constants::avogadro);
}

double power_from_photon_flux(double photon_flux_mol_per_s, double photon_energy_eV) {
  require(positive(photon_energy_eV), "photon energy must be positive");
  require(std::isfinite(photon_flux_mol_per_s) && photon_flux_mol_per_s >= 0.0,
          "photon flux must be non-negative");
  return photon_flux_mol_per_s * photon_energy_eV * constants::elementary_charge * constants::avogadro;
}

Illumination::Illumination(double photon_energy_eV, double power_W, IlluminationSchedule schedule)
    : photon_energy_eV_(photon_energy_eV),
      power_W_(power_W),
      photon_flux_(photon_flux_from_power(power_W, photon_energy_eV)),
      schedule_(std::move(schedule)) {
  schedule_.validate();
}

Illumination Illumination::from_wavelength(double wavelength_nm, double power_W,
                                           IlluminationSchedule schedule) {
  return Illumination(photon_energy_from_wavelength_nm(wavelength_nm), power_W, std::move(schedule));
}

// --- geometry --------------------------------------------------------------

PillarGeometry PillarGeometry::flat(double unit_cell_radius_m) {
  PillarGeometry g;
  g.apex_height_m = 0.0;
  g.base_height_m = 0.0;
  g.unit_cell_radius_m = unit_cell_radius_m;
  return g;
}

double PillarGeometry::base_bottom_radius_m() const {
  const double angle = base_angle_deg * constants::pi / 180.0;
  return apex_base_radius_m + base_height_m / std::tan(angle);
}

double PillarGeometry::radius_at(double z_m) const {
  if (is_flat() || z_m < 0.0 || z_m > total_height_m()) return 0.0;
  if (base_height_m > 0.0 && z_m <= base_height_m) {
    const double r0 = base_bottom_radius_m();
    return r0 + (apex_base_radius_m - r0) * (z_m / base_height_m);
  }
  const double s = (z_m - base_height_m) / apex_height_m;
  return apex_base_radius_m + (apex_top_radius_m - apex_base_radius_m) * s;
}

void PillarGeometry::validate() const {
  require(positive(apex_top_radius_m) && positive(apex_base_radius_m),
          "apex radii must be positive");
  require(apex_top_radius_m <= apex_base_radius_m, "apex top radius must not exceed its base radius");
  require(apex_height_m >= 0.0 && base_height_m >= 0.0, "pillar heights must be non-negative");
  require(positive(unit_cell_radius_m), "unit cell radius must be positive");
  if (base_height_m > 0.0) {
    require(base_angle_deg > 0.0 && base_angle_deg <= 90.0, "base angle must lie in (0, 90] degrees");
  }
  if (!is_flat()) {
    require(unit_cell_radius_m > base_bottom_radius_m(),
            "unit cell must be wider than the pillar footprint");
  }
}

}  // namespace chargetune
