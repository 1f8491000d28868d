#pragma once

#include <limits>
#include <vector>

#include "chargetune/constants.hpp"

namespace chargetune {

/// Absolute temperature with the derived thermal energy and beta = 1/kT.
class Temperature {
 public:
  explicit Temperature(double kelvin);

  static Temperature room() { return Temperature(constants::room_temperature_K); }
  static Temperature low() { return Temperature(constants::low_temperature_K); }
  static Temperature from_thermal_energy(double kT_eV);

  double kelvin() const noexcept { return kelvin_; }
  double thermal_energy_eV() const noexcept { return constants::boltzmann_eV * kelvin_; }
  double beta_per_eV() const noexcept { return 1.0 / thermal_energy_eV(); }

 private:
  double kelvin_;
};

/// Bulk host properties. Defaults describe electronic-grade diamond.
struct MaterialParams {
  double band_gap_eV = 5.5;
  double rel_permittivity = 5.7;
  double donor_density_per_m3 = 0.9e21;         // 5 ppb substitutional N
  double nv_density_per_m3 = 5.4e18;            // native NV, 0.03 ppb
  double surface_carbon_density_per_m2 = 16e18; // (001) surface, 16 nm^-2
  // (E_c - E_F) deep in the bulk. Not a measured constant: substitutional
  // nitrogen donor depth, exposed so depletion depths stay reproducible.
  double bulk_fermi_depth_eV = 1.7;
  double ionization_rate_hz = 1e6;

  void validate() const;
};

/// Surface termination state. Energies in eV relative to vacuum.
struct SurfaceState {
  double mu_e_eV = 5.3;
  double ea_initial_eV = -0.3;  // hydrogenated
  double ea_final_eV = 1.7;     // oxidised
  double hydrogen_fraction = 1.0;
  // Adsorbate concentration in the units of the surface kinetics constants;
  // two per C-H site in the default normalisation.
  double bicarbonate_conc = 2.0;

  static SurfaceState hydrogenated() { return {}; }
  static SurfaceState oxidized();

  /// Weighted electron affinity theta*E_H + (1 - theta)*E_f.
  double electron_affinity_eV() const;

  void validate() const;
};

struct IlluminationCycle {
  double on_s = std::numeric_limits<double>::infinity();
  double off_s = 0.0;
};

/// Ordered laser on/off cycles. With `repeat` the list is periodic, otherwise
/// the laser stays off once the list is exhausted.
struct IlluminationSchedule {
  std::vector<IlluminationCycle> cycles{IlluminationCycle{}};
  bool repeat = false;

  static IlluminationSchedule continuous() { return {}; }
  static IlluminationSchedule gated(double on_s, double off_s);

  void validate() const;
};

/// Total illuminated ("laser park") time elapsed up to wall-clock time t.
double cumulative_on_time(const IlluminationSchedule& schedule, double wall_clock_t_s);

double photon_energy_from_wavelength_nm(double wavelength_nm);
double wavelength_nm_from_photon_energy(double photon_energy_eV);

/// Photon flux in mol/s carried by a beam of the given power.
double photon_flux_from_power(double power_W, double photon_energy_eV);
double power_from_photon_flux(double photon_flux_mol_per_s, double photon_energy_eV);

class Illumination {
 public:
  Illumination(double photon_energy_eV, double power_W,
               IlluminationSchedule schedule = IlluminationSchedule::continuous());

  static Illumination from_wavelength(double wavelength_nm, double power_W,
                                      IlluminationSchedule schedule = IlluminationSchedule::continuous());

  double photon_energy_eV() const noexcept { return photon_energy_eV_; }
  double power_W() const noexcept { return power_W_; }
  double photon_flux_mol_per_s() const noexcept { return photon_flux_; }
  const IlluminationSchedule& schedule() const noexcept { return schedule_; }

 private:
  double photon_energy_eV_;
  double power_W_;
  double photon_flux_;
  IlluminationSchedule schedule_;
};

}  // namespace chargetune
