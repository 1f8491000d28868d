#include <cmath>
#include <memory>

#include "chargetune/band_bending.hpp"
#include "chargetune/synth.hpp"
#include "commands.hpp"

namespace chargetune::cli {

namespace {

struct BandOpts {
  std::string surface = "H";
  std::optional<double> e_bb;
  std::string grid;
  std::string out;
};

SurfaceState termination(const RunConfig& c, const std::string& which) {
  SurfaceState s = c.surface;
  s.hydrogen_fraction = which == "H" ? 1.0 : 0.0;
  return s;
}

double resolve_e_bb(const RunConfig& c, const BandOpts& o, bool& flat_band) {
  flat_band = false;
  if (o.e_bb) {
    if (!(std::isfinite(*o.e_bb) && *o.e_bb >= 0.0)) throw ConfigError("--ebb must be non-negative");
    return *o.e_bb;
  }
  const auto bb = surface_band_bending(c.material, termination(c, o.surface));
  flat_band = bb.flat_band;
  return bb.e_bb_eV;
}

int run_flat(const Session& s, const BandOpts& o) {
  const RunConfig c = s.config();
  bool flat_band = false;
  const double e_bb = resolve_e_bb(c, o, flat_band);
  const auto prof = flat_depletion(c.material, e_bb);
  json report = {{"schema_version", kSchemaVersion},
                 {"surface", o.e_bb ? "custom" : o.surface},
                 {"e_bb_eV", e_bb},
                 {"flat_band", flat_band},
                 {"d_dep_m", prof.d_dep_m},
                 {"surface_field_V_per_m", prof.field_z_V_per_m(0.0)},
                 {"space_charge_curvature_eV_per_m2", space_charge_curvature(c.material)}};
  if (!o.out.empty()) {
    CsvTable t;
    t.header = {"z_m", "evac_eV", "field_z_V_per_m"};
    const double depth = prof.d_dep_m > 0.0 ? 1.5 * prof.d_dep_m : 1e-6;
    for (double z : uniform_grid(-depth, 0.0, depth / 300.0)) {
      t.rows.push_back({z, prof.vacuum_level_eV(z), prof.field_z_V_per_m(z)});
    }
    write_csv(o.out, t);
    write_sidecar(o.out, s, c, {{"command", "bandbend flat"}, {"result", report}});
  }
  s.out << report.dump(2) << '\n';
  return kExitOk;
}

int run_pillar(const Session& s, const BandOpts& o) {
  RunConfig c = s.config();
  if (!o.grid.empty()) std::tie(c.grid.n_rho, c.grid.n_z) = parse_grid(o.grid);
  c.validate();
  bool flat_band = false;
  const double e_bb = resolve_e_bb(c, o, flat_band);

  const PotentialField field = pillar_poisson_solve(c.geometry, c.material, e_bb, c.grid);
  const FieldGrid e = field_lines(field);

  // On-axis field below the top surface, every half micron.
  json axis = json::array();
  const double top = c.geometry.total_height_m();
  for (double depth = 0.5e-6; depth <= 4.0e-6 + 1e-12; depth += 0.5e-6) {
    int best = 0;
    for (int j = 0; j < field.n_z_nodes(); ++j) {
      if (std::abs(field.z()[j] - (top - depth)) < std::abs(field.z()[best] - (top - depth))) best = j;
    }
    axis.push_back({{"depth_m", top - field.z()[best]}, {"field_V_per_m", e.magnitude(field.index(0, best))}});
  }

  const auto& st = field.stats();
  json report = {{"schema_version", kSchemaVersion},
                 {"e_bb_eV", e_bb},
                 {"flat_band", flat_band},
                 {"grid", {{"n_rho", c.grid.n_rho}, {"n_z", c.grid.n_z}}},
                 {"converged", st.converged},
                 {"iterations", st.iterations},
                 {"residual", st.residual},
                 {"complementarity", st.complementarity},
                 {"depleted_nodes", st.depleted_nodes},
                 {"neutral_nodes", st.neutral_nodes},
                 {"pillar_fully_depleted", field.pillar_fully_depleted()},
                 {"axis_field", axis}};

  const std::string path = output_path(c, o.out, "field.csv");
  write_csv(path, field_to_table(field));
  write_sidecar(path, s, c, {{"command", "bandbend pillar"}, {"result", report}});
  s.out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

void add_bandbend(CLI::App& app, Runner& r) {
  auto* bb = app.add_subcommand("bandbend", "Depletion-region electrostatics");
  bb->require_subcommand(1);

  auto fo = std::make_shared<BandOpts>();
  auto* f = bb->add_subcommand("flat", "Closed-form flat-surface depletion");
  f->add_option("--surface", fo->surface, "H (hydrogenated) or O (oxidised)")->check(CLI::IsMember({"H", "O"}));
  f->add_option("--ebb", fo->e_bb, "Surface band bending in eV (overrides --surface)");
  f->add_option("-o,--out", fo->out, "Optional profile CSV");
  f->callback([&r, fo] { r.status = run_flat(r.session, *fo); });

  auto po = std::make_shared<BandOpts>();
  auto* p = bb->add_subcommand("pillar", "Axisymmetric pillar solve");
  p->add_option("--surface", po->surface, "H (hydrogenated) or O (oxidised)")->check(CLI::IsMember({"H", "O"}));
  p->add_option("--ebb", po->e_bb, "Surface band bending in eV (overrides --surface)");
  p->add_option("--grid", po->grid, "Cells as NRHOxNZ, e.g. 200x400");
  p->add_option("-o,--out", po->out, "Field CSV");
  p->callback([&r, po] { r.status = run_pillar(r.session, *po); });
}

}  // namespace chargetune::cli
