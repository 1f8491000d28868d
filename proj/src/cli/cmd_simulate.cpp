#include <algorithm>
#include <cmath>
#include <memory>

#include "chargetune/synth.hpp"
#include "commands.hpp"

namespace chargetune::cli {

namespace {

struct NvCycleOpts {
  std::optional<double> intensity, t_end, dt;
  std::string initial = "negative";
  std::string out;
};

struct SurfaceOpts {
  std::optional<double> source, flux, power, on, off, t_end, dt;
  std::string out;
};

struct TraceOpts {
  std::optional<double> a, b, k, d, t0, t_end, dt;
  std::string out;
};

int run_nv_cycle(const Session& s, const NvCycleOpts& o) {
  const RunConfig c = s.config();
  const auto& p = c.cycle;
  const double intensity = o.intensity.value_or(c.illumination.resolve().photon_flux_mol_per_s());

  // Default window: 20 time constants of the slowest process.
  double slowest = std::min(p.gamma0, p.gamma1);
  if (intensity > 0.0) slowest = std::min({slowest, p.k1 * intensity, p.k2 * intensity, p.k3 * intensity, p.k4 * intensity});
  const double t_end = o.t_end.value_or(20.0 / slowest);
  const double dt = o.dt.value_or(t_end / 200.0);
  const auto times = uniform_grid(0.0, t_end, dt);

  NVPopulations initial;
  if (o.initial == "negative") initial = NVPopulations::all_negative(p.total_nv);
  else initial.nv_zero = p.total_nv;

  const auto traj = nv_transient(p, intensity, times, initial);
  CsvTable t;
  t.header = {"t_s", "nv_minus", "nv_minus_excited", "nv_zero", "nv_zero_excited"};
  for (const auto& smp : traj) {
    const auto a = smp.populations.as_array();
    t.rows.push_back({smp.t_s, a[0], a[1], a[2], a[3]});
  }
  const std::string path = output_path(c, o.out, "nv_cycle.csv");
  write_csv(path, t);

  json extra = {{"command", "simulate nv-cycle"}, {"intensity", intensity}, {"rows", t.rows.size()}};
  if (intensity > 0.0) {
    const auto ss = nv_steady_state(p, intensity).as_array();
    extra["steady_state"] = ss;
    extra["generation_rate"] = generation_rate(p, intensity);
  }
  extra["saturated_alpha0"] = saturated_alpha0(p);
  write_sidecar(path, s, c, extra);
  s.out << path << '\n';
  return kExitOk;
}

int run_surface(const Session& s, const SurfaceOpts& o) {
  RunConfig c = s.config();
  if (o.power) c.illumination.power_W = *o.power;
  if (o.on) c.illumination.schedule = IlluminationSchedule::gated(*o.on, o.off.value_or(0.0));
  if (o.t_end) c.time.t_end_s = *o.t_end;
  if (o.dt) c.time.dt_s = *o.dt;
  c.validate();

  const double flux = o.flux.value_or(c.illumination.resolve().photon_flux_mol_per_s());
  const double source = o.source.value_or(generation_rate(c.cycle, flux));
  const double bicarb = c.surface.bicarbonate_conc;
  const double k = rate_constant(c.kinetics, bicarb, source);

  SurfaceNetworkState init;
  init.ch_bonds = c.surface.hydrogen_fraction;
  init.bicarbonate = bicarb;
  const auto times = uniform_grid(0.0, c.time.t_end_s, c.time.dt_s);
  const auto traj = network_transient(c.kinetics, init, source, c.illumination.schedule, times);

  CsvTable t;
  t.header = {"wall_clock_s", "park_s",         "holes",        "electrons",    "hydroxyl",
              "carbon_radical", "ch_bonds",     "bicarbonate",  "hydroxylated", "ch_bonds_closed_form"};
  for (const auto& smp : traj) {
    const auto& x = smp.state;
    t.rows.push_back({smp.wall_clock_s, smp.park_s, x.holes, x.electrons, x.hydroxyl, x.carbon_radical, x.ch_bonds,
                      x.bicarbonate, x.hydroxylated, ch_decay(k, smp.park_s, init.ch_bonds)});
  }
  const std::string path = output_path(c, o.out, "surface.csv");
  write_csv(path, t);

  const char* regime[] = {"recombination_dominated", "mixed", "transfer_dominated"};
  write_sidecar(path, s, c,
                {{"command", "simulate surface"},
                 {"photon_flux_mol_per_s", flux},
                 {"source_rate", source},
                 {"k_per_s", k},
                 {"holes_steady_state", hole_steady_state(c.kinetics, bicarb, source)},
                 {"regime", regime[static_cast<int>(classify_regime(c.kinetics, bicarb, source))]},
                 {"rows", t.rows.size()}});
  s.out << path << '\n';
  return kExitOk;
}

int run_trace(const Session& s, const TraceOpts& o) {
  RunConfig c = s.config();
  auto& m = c.trace;
  if (o.a) m.A = *o.a;
  if (o.b) m.B = *o.b;
  if (o.k) m.k_per_s = *o.k;
  if (o.d) m.D = *o.d;
  if (o.t0) m.t0_s = *o.t0;
  if (o.t_end) c.time.t_end_s = *o.t_end;
  if (o.dt) c.time.dt_s = *o.dt;
  c.validate();

  PLTrace tr = synth_trace(m, uniform_grid(0.0, c.time.t_end_s, c.time.dt_s), {}, 0);
  const std::string path = output_path(c, o.out, "trace.csv");
  write_csv(path, trace_to_table(tr));
  write_sidecar(path, s, c, {{"command", "simulate trace"}, {"rows", tr.t_park_s.size()}});
  s.out << path << '\n';
  return kExitOk;
}

}  // namespace

void add_simulate(CLI::App& app, Runner& r) {
  auto* sim = app.add_subcommand("simulate", "Forward models");
  sim->require_subcommand(1);

  auto nv = std::make_shared<NvCycleOpts>();
  auto* c1 = sim->add_subcommand("nv-cycle", "NV charge-cycle populations versus time");
  c1->add_option("--intensity", nv->intensity, "Photon flux (default: from the illumination section)");
  c1->add_option("--t-end", nv->t_end, "End time in s");
  c1->add_option("--dt", nv->dt, "Sampling step in s");
  c1->add_option("--initial", nv->initial, "Start with all NV in 'negative' or 'neutral'")
      ->check(CLI::IsMember({"negative", "neutral"}));
  c1->add_option("-o,--out", nv->out, "Output CSV");
  c1->callback([&r, nv] { r.status = run_nv_cycle(r.session, *nv); });

  auto sf = std::make_shared<SurfaceOpts>();
  auto* c2 = sim->add_subcommand("surface", "Surface reaction network under illumination");
  c2->add_option("--source", sf->source, "Hole generation rate (overrides the NV cycle)");
  c2->add_option("--flux", sf->flux, "Photon flux in mol/s");
  c2->add_option("--power", sf->power, "Laser power in W");
  c2->add_option("--on", sf->on, "Gated schedule: on time per cycle in s");
  c2->add_option("--off", sf->off, "Gated schedule: off time per cycle in s");
  c2->add_option("--t-end", sf->t_end, "End wall-clock time in s");
  c2->add_option("--dt", sf->dt, "Sampling step in s");
  c2->add_option("-o,--out", sf->out, "Output CSV");
  c2->callback([&r, sf] { r.status = run_surface(r.session, *sf); });

  auto tr = std::make_shared<TraceOpts>();
  auto* c3 = sim->add_subcommand("trace", "SiV- photoluminescence trace I(t)");
  c3->add_option("--A", tr->a);
  c3->add_option("--B", tr->b);
  c3->add_option("--k", tr->k, "Rate in 1/s");
  c3->add_option("--D", tr->d, "Saturated count rate");
  c3->add_option("--t0", tr->t0, "Reference time in s");
  c3->add_option("--t-end", tr->t_end, "End park time in s");
  c3->add_option("--dt", tr->dt, "Sampling step in s");
  c3->add_option("-o,--out", tr->out, "Output CSV");
  c3->callback([&r, tr] { r.status = run_trace(r.session, *tr); });
}

}  // namespace chargetune::cli
