#include <memory>

#include <fmt/format.h>

#include "commands.hpp"

namespace chargetune::cli {

namespace {

struct EstimateOpts {
  std::optional<double> eta, gamma_ion, top_radius, base_radius, height, nv_density, carbon_density;
  bool as_json = false;
};

int run_estimate(const Session& s, const EstimateOpts& o) {
  RunConfig c = s.config();
  PillarGeometry g = c.geometry;
  g.apex_height_m = o.height.value_or(c.estimate.apex_height_m);
  if (o.top_radius) g.apex_top_radius_m = *o.top_radius;
  if (o.base_radius) g.apex_base_radius_m = *o.base_radius;
  const double eta = o.eta.value_or(c.estimate.eta);
  const double gamma = o.gamma_ion.value_or(c.material.ionization_rate_hz);
  const double n_nv = o.nv_density.value_or(c.material.nv_density_per_m3);
  const double n_c = o.carbon_density.value_or(c.material.surface_carbon_density_per_m2);

  const double n_eff = effective_nv_count(g, n_nv);
  const double sites = surface_carbon_sites(g, n_c);
  const double k = macroscopic_rate_estimate(eta, n_eff, gamma, g, n_c);

  if (o.as_json) {
    const json j = {{"schema_version", kSchemaVersion},
                    {"inputs",
                     {{"eta", eta},
                      {"gamma_ion_hz", gamma},
                      {"apex_top_radius_m", g.apex_top_radius_m},
                      {"apex_base_radius_m", g.apex_base_radius_m},
                      {"apex_height_m", g.apex_height_m},
                      {"nv_density_per_m3", n_nv},
                      {"carbon_density_per_m2", n_c}}},
                    {"n_eff", n_eff},
                    {"n_carbon", sites},
                    {"k_hz", k}};
    s.out << j.dump(2) << '\n';
    return kExitOk;
  }
  s.out << fmt::format("N_eff = n_NV * pi h / 3 * (r1^2 + r2^2 + r1 r2)\n"
                       "      = {:.4g} m^-3 * pi * {:.4g} m / 3 * ({:.4g}^2 + {:.4g}^2 + {:.4g} * {:.4g}) m^2\n"
                       "      = {:.4g}\n",
                       n_nv, g.apex_height_m, g.apex_top_radius_m, g.apex_base_radius_m, g.apex_top_radius_m,
                       g.apex_base_radius_m, n_eff);
  s.out << fmt::format("N_C   = [C]_s * pi r1^2 = {:.4g} m^-2 * pi * ({:.4g} m)^2 = {:.4g}\n", n_c,
                       g.apex_top_radius_m, sites);
  s.out << fmt::format("k     = eta * N_eff * Gamma_ion / N_C = {:.4g} * {:.4g} * {:.4g} Hz / {:.4g} = {:.4g} Hz\n",
                       eta, n_eff, gamma, sites, k);
  return kExitOk;
}

}  // namespace

void add_estimate(CLI::App& app, Runner& r) {
  auto* est = app.add_subcommand("estimate", "Order-of-magnitude estimates");
  est->require_subcommand(1);
  auto o = std::make_shared<EstimateOpts>();
  auto* rate = est->add_subcommand("rate", "Macroscopic C-H activation rate eta N_eff Gamma_ion / N_C");
  rate->add_option("--eta", o->eta, "Fraction of holes that activate a C-H bond");
  rate->add_option("--gamma-ion", o->gamma_ion, "NV ionisation rate in Hz");
  rate->add_option("--top-radius", o->top_radius, "Apex top radius r1 in m");
  rate->add_option("--base-radius", o->base_radius, "Apex base radius r2 in m");
  rate->add_option("--height", o->height, "Apex cone height h in m");
  rate->add_option("--nv-density", o->nv_density, "NV density in m^-3");
  rate->add_option("--carbon-density", o->carbon_density, "Surface carbon density in m^-2");
  rate->add_flag("--json", o->as_json, "Machine-readable output");
  rate->callback([&r, o] { r.status = run_estimate(r.session, *o); });
}

}  // namespace chargetune::cli
