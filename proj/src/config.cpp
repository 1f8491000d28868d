#include "chargetune/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chargetune/errors.hpp"
#include "chargetune/formats.hpp"

namespace chargetune {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and remembers which ones were consumed so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void num(const char* key, double& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    out = v.get<double>();
  }

  // null stands for +infinity (JSON has no literal for it).
  void num_or_inf(const char* key, double& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (v.is_null()) {
      out = std::numeric_limits<double>::infinity();
      return;
    }
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number or null");
    out = v.get<double>();
  }

  void integer(const char* key, int& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    out = v.get<int>();
  }

  void boolean(const char* key, bool& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void string(const char* key, std::string& out) {
    if (!take(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    out = v.get<std::string>();
  }

  const json* child(const char* key) {
    if (!take(key)) return nullptr;
    return &j_.at(key);
  }

  std::string where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  bool take(const char* key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json inf_to_null(double x) { return std::isinf(x) ? json(nullptr) : json(x); }

void read_schedule(const json& j, const std::string& path, IlluminationSchedule& s) {
  Section sec(j, path);
  sec.boolean("repeat", s.repeat);
  if (const json* cycles = sec.child("cycles")) {
    if (!cycles->is_array()) throw ConfigError(path + ".cycles: expected an array");
    s.cycles.clear();
    for (std::size_t i = 0; i < cycles->size(); ++i) {
      IlluminationCycle c;
      Section cs((*cycles)[i], path + ".cycles[" + std::to_string(i) + "]");
      cs.num_or_inf("on_s", c.on_s);
      cs.num("off_s", c.off_s);
      cs.finish();
      s.cycles.push_back(c);
    }
  }
  sec.finish();
}

template <typename F>
void checked(const char* section, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    throw ConfigError(std::string(section) + ": " + e.what());
  }
}

}  // namespace

Illumination IlluminationConfig::resolve() const {
  return Illumination::from_wavelength(wavelength_nm, power_W, schedule);
}

void TimeGrid::validate() const {
  if (!(std::isfinite(t_end_s) && t_end_s > 0.0)) throw DomainError("t_end_s must be positive");
  if (!(std::isfinite(dt_s) && dt_s > 0.0)) throw DomainError("dt_s must be positive");
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  // Placeholder NV cross-sections: near saturation at the default beam
  // (k I / Gamma ~ 40), one NV per apex-cone volume unit.
  c.cycle = {3.7e14, 3.7e14, 3.7e14, 3.7e14, 1e5, 1e5, 3.1};
  c.kinetics = {1.0, 1.66e-7, 10.0, 1e5};
  c.trace = {-18.48, 78.65, 2.9e-4, 1e4, 0.0};
  return c;
}

void RunConfig::validate() const {
  checked("material", [&] { material.validate(); });
  checked("surface", [&] { surface.validate(); });
  checked("illumination", [&] { (void)illumination.resolve(); });
  checked("geometry", [&] { geometry.validate(); });
  checked("kinetics", [&] { kinetics.validate(); });
  checked("cycle", [&] { cycle.validate(); });
  checked("temperature_K", [&] { (void)Temperature(temperature_K); });
  checked("trace", [&] { trace.validate(); });
  checked("time", [&] { time.validate(); });
  checked("grid", [&] { grid.validate(); });
  checked("estimate", [&] {
    if (!(estimate.eta >= 0.0 && estimate.eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
    if (!(std::isfinite(estimate.apex_height_m) && estimate.apex_height_m > 0.0)) {
      throw DomainError("apex_height_m must be positive");
    }
  });
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  RunConfig c = RunConfig::defaults();
  Section top(root, "");

  int schema = kSchemaVersion;
  top.integer("schema_version", schema);
  if (schema != kSchemaVersion) {
    throw ConfigError("schema_version " + std::to_string(schema) + " is not supported");
  }

  if (const json* j = top.child("material")) {
    Section s(*j, "material");
    auto& m = c.material;
    s.num("band_gap_eV", m.band_gap_eV);
    s.num("rel_permittivity", m.rel_permittivity);
    s.num("donor_density_per_m3", m.donor_density_per_m3);
    s.num("nv_density_per_m3", m.nv_density_per_m3);
    s.num("surface_carbon_density_per_m2", m.surface_carbon_density_per_m2);
    s.num("bulk_fermi_depth_eV", m.bulk_fermi_depth_eV);
    s.num("ionization_rate_hz", m.ionization_rate_hz);
    s.finish();
  }
  if (const json* j = top.child("surface")) {
    Section s(*j, "surface");
    auto& v = c.surface;
    s.num("mu_e_eV", v.mu_e_eV);
    s.num("ea_initial_eV", v.ea_initial_eV);
    s.num("ea_final_eV", v.ea_final_eV);
    s.num("hydrogen_fraction", v.hydrogen_fraction);
    s.num("bicarbonate_conc", v.bicarbonate_conc);
    s.finish();
  }
  if (const json* j = top.child("illumination")) {
    Section s(*j, "illumination");
    s.num("wavelength_nm", c.illumination.wavelength_nm);
    s.num("power_W", c.illumination.power_W);
    if (const json* sch = s.child("schedule")) read_schedule(*sch, "illumination.schedule", c.illumination.schedule);
    s.finish();
  }
  if (const json* j = top.child("geometry")) {
    Section s(*j, "geometry");
    auto& g = c.geometry;
    s.num("apex_top_radius_m", g.apex_top_radius_m);
    s.num("apex_base_radius_m", g.apex_base_radius_m);
    s.num("apex_height_m", g.apex_height_m);
    s.num("base_height_m", g.base_height_m);
    s.num("base_angle_deg", g.base_angle_deg);
    s.num("unit_cell_radius_m", g.unit_cell_radius_m);
    s.finish();
  }
  if (const json* j = top.child("kinetics")) {
    Section s(*j, "kinetics");
    s.num("k5", c.kinetics.k5);
    s.num("k6", c.kinetics.k6);
    s.num("k7", c.kinetics.k7);
    s.num("k8", c.kinetics.k8);
    s.finish();
  }
  if (const json* j = top.child("cycle")) {
    Section s(*j, "cycle");
    auto& p = c.cycle;
    s.num("k1", p.k1);
    s.num("k2", p.k2);
    s.num("k3", p.k3);
    s.num("k4", p.k4);
    s.num("gamma0", p.gamma0);
    s.num("gamma1", p.gamma1);
    s.num("total_nv", p.total_nv);
    s.finish();
  }
  top.num("temperature_K", c.temperature_K);
  if (const json* j = top.child("trace")) {
    Section s(*j, "trace");
    s.num("A", c.trace.A);
    s.num("B", c.trace.B);
    s.num("k_per_s", c.trace.k_per_s);
    s.num("D", c.trace.D);
    s.num("t0_s", c.trace.t0_s);
    s.finish();
  }
  if (const json* j = top.child("time")) {
    Section s(*j, "time");
    s.num("t_end_s", c.time.t_end_s);
    s.num("dt_s", c.time.dt_s);
    s.finish();
  }
  if (const json* j = top.child("grid")) {
    Section s(*j, "grid");
    s.integer("n_rho", c.grid.n_rho);
    s.integer("n_z", c.grid.n_z);
    s.num("depth_below_surface_m", c.grid.depth_below_surface_m);
    s.integer("max_iterations", c.grid.max_iterations);
    s.num("residual_tolerance", c.grid.residual_tolerance);
    s.finish();
  }
  if (const json* j = top.child("estimate")) {
    Section s(*j, "estimate");
    s.num("eta", c.estimate.eta);
    s.num("apex_height_m", c.estimate.apex_height_m);
    s.finish();
  }
  if (const json* j = top.child("seed")) {
    if (j->is_null()) {
      c.seed.reset();
    } else if (j->is_number_unsigned()) {
      c.seed = j->get<std::uint64_t>();
    } else {
      throw ConfigError("seed: expected a non-negative integer or null");
    }
  }
  if (const json* j = top.child("output")) {
    Section s(*j, "output");
    s.string("directory", c.output.directory);
    s.string("prefix", c.output.prefix);
    s.finish();
  }
  top.finish();

  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json cycles = json::array();
  for (const auto& cy : c.illumination.schedule.cycles) {
    cycles.push_back({{"on_s", inf_to_null(cy.on_s)}, {"off_s", cy.off_s}});
  }
  const auto& m = c.material;
  const auto& g = c.geometry;
  json j = {
      {"schema_version", kSchemaVersion},
      {"material",
       {{"band_gap_eV", m.band_gap_eV},
        {"rel_permittivity", m.rel_permittivity},
        {"donor_density_per_m3", m.donor_density_per_m3},
        {"nv_density_per_m3", m.nv_density_per_m3},
        {"surface_carbon_density_per_m2", m.surface_carbon_density_per_m2},
        {"bulk_fermi_depth_eV", m.bulk_fermi_depth_eV},
        {"ionization_rate_hz", m.ionization_rate_hz}}},
      {"surface",
       {{"mu_e_eV", c.surface.mu_e_eV},
        {"ea_initial_eV", c.surface.ea_initial_eV},
        {"ea_final_eV", c.surface.ea_final_eV},
        {"hydrogen_fraction", c.surface.hydrogen_fraction},
        {"bicarbonate_conc", c.surface.bicarbonate_conc}}},
      {"illumination",
       {{"wavelength_nm", c.illumination.wavelength_nm},
        {"power_W", c.illumination.power_W},
        {"schedule", {{"cycles", cycles}, {"repeat", c.illumination.schedule.repeat}}}}},
      {"geometry",
       {{"apex_top_radius_m", g.apex_top_radius_m},
        {"apex_base_radius_m", g.apex_base_radius_m},
        {"apex_height_m", g.apex_height_m},
        {"base_height_m", g.base_height_m},
        {"base_angle_deg", g.base_angle_deg},
        {"unit_cell_radius_m", g.unit_cell_radius_m}}},
      {"kinetics", {{"k5", c.kinetics.k5}, {"k6", c.kinetics.k6}, {"k7", c.kinetics.k7}, {"k8", c.kinetics.k8}}},
      {"cycle",
       {{"k1", c.cycle.k1},
        {"k2", c.cycle.k2},
        {"k3", c.cycle.k3},
        {"k4", c.cycle.k4},
        {"gamma0", c.cycle.gamma0},
        {"gamma1", c.cycle.gamma1},
        {"total_nv", c.cycle.total_nv}}},
      {"temperature_K", c.temperature_K},
      {"trace",
       {{"A", c.trace.A}, {"B", c.trace.B}, {"k_per_s", c.trace.k_per_s}, {"D", c.trace.D}, {"t0_s", c.trace.t0_s}}},
      {"time", {{"t_end_s", c.time.t_end_s}, {"dt_s", c.time.dt_s}}},
      {"grid",
       {{"n_rho", c.grid.n_rho},
        {"n_z", c.grid.n_z},
        {"depth_below_surface_m", c.grid.depth_below_surface_m},
        {"max_iterations", c.grid.max_iterations},
        {"residual_tolerance", c.grid.residual_tolerance}}},
      {"estimate", {{"eta", c.estimate.eta}, {"apex_height_m", c.estimate.apex_height_m}}},
      {"seed", c.seed ? json(*c.seed) : json(nullptr)},
      {"output", {{"directory", c.output.directory}, {"prefix", c.output.prefix}}},
  };
  return j.dump(2);
}

}  // namespace chargetune
