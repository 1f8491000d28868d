#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "chargetune/band_bending.hpp"
#include "chargetune/charge_cycle.hpp"
#include "chargetune/charge_state.hpp"
#include "chargetune/core_model.hpp"
#include "chargetune/geometry.hpp"
#include "chargetune/photocatalysis.hpp"

namespace chargetune {

struct IlluminationConfig {
  double wavelength_nm = 515.0;
  double power_W = 2.5e-3;
  IlluminationSchedule schedule;

  Illumination resolve() const;
};

/// Sampling for surface and trace simulations (park/wall-clock seconds).
struct TimeGrid {
  double t_end_s = 14400.0;
  double dt_s = 90.0;

  void validate() const;
};

struct EstimateConfig {
  double eta = 0.01;
  double apex_height_m = 1e-6;  // cone used for N_eff
};

struct OutputConfig {
  std::string directory = ".";
  std::string prefix = "run";
};

/// Everything a command needs. Defaults are a self-consistent, explicitly
/// non-authoritative parameter set: the NV and surface rate constants are
/// placeholders tuned so the default simulated k is about 2.9e-4 /s.
struct RunConfig {
  MaterialParams material;
  SurfaceState surface;
  IlluminationConfig illumination;
  PillarGeometry geometry;
  SurfaceKineticsParams kinetics;
  NVCycleParams cycle;
  double temperature_K = constants::room_temperature_K;
  TraceModelParams trace;
  TimeGrid time;
  GridSpec grid;
  EstimateConfig estimate;
  std::optional<std::uint64_t> seed;
  OutputConfig output;

  static RunConfig defaults();

  /// Validates every section; throws ConfigError naming the section.
  void validate() const;
};

/// Parses JSON text; missing keys keep their defaults, unknown keys and type
/// mismatches throw ConfigError with the JSON path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Fully resolved configuration as pretty JSON (stable key order).
std::string config_to_json(const RunConfig& config);

}  // namespace chargetune
