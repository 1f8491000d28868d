#include <memory>
#include <sstream>

#include "chargetune/synth.hpp"
#include "commands.hpp"

namespace chargetune::cli {

namespace {

struct NoiseOpts {
  std::string kind = "none";
  std::optional<double> sigma;
  double bin_s = 1.0;

  NoiseModel resolve() const {
    NoiseModel n;
    n.kind = kind == "poisson" ? NoiseKind::Poisson : kind == "gaussian" ? NoiseKind::Gaussian : NoiseKind::None;
    n.sigma = sigma.value_or(0.0);
    n.bin_s = bin_s;
    n.validate();
    return n;
  }
};

struct TraceSynthOpts {
  std::optional<double> a, b, k, d, t0, t_end, dt;
  NoiseOpts noise;
  std::string out;
};

struct SpectrumSynthOpts {
  std::vector<std::string> lines;
  double baseline = 0.0, slope = 0.0, lo = 570.0, hi = 580.0, step = 0.01;
  std::string temperature_tag = "RT";
  NoiseOpts noise;
  std::string out;
};

struct ScalingSynthOpts {
  double lo = 1e4, hi = 1e6, intensity_per_flux = 1.0;
  int points = 9;
  std::optional<double> bicarbonate;
  NoiseOpts noise;
  std::string out;
};

json noise_json(const NoiseModel& n) {
  const char* names[] = {"none", "poisson", "gaussian"};
  return {{"kind", names[static_cast<int>(n.kind)]}, {"sigma", n.sigma}, {"bin_s", n.bin_s}};
}

std::uint64_t seed_for(const RunConfig& c, const NoiseModel& n) {
  if (!n.stochastic()) return c.seed.value_or(0);
  return require_seed(c);
}

void write_truth(const std::string& path, const char* kind, const json& truth, const NoiseModel& n,
                 std::uint64_t seed, bool stochastic) {
  write_json(path + ".truth.json", {{"schema_version", kSchemaVersion},
                                    {"kind", kind},
                                    {"truth", truth},
                                    {"noise", noise_json(n)},
                                    {"seed", stochastic ? json(seed) : json(nullptr)}});
}

// "lorentzian,AMPLITUDE,CENTER_NM,WIDTH_NM"
SyntheticLine parse_line(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() != 4 || (parts[0] != "lorentzian" && parts[0] != "gaussian")) {
    throw ConfigError("--line expects PROFILE,AMPLITUDE,CENTER_NM,WIDTH_NM, got '" + text + "'");
  }
  try {
    return {parts[0] == "gaussian" ? LineProfile::Gaussian : LineProfile::Lorentzian, std::stod(parts[1]),
            std::stod(parts[2]), std::stod(parts[3])};
  } catch (const std::exception&) {
    throw ConfigError("--line has a non-numeric field: '" + text + "'");
  }
}

int run_synth_trace(const Session& s, const TraceSynthOpts& o) {
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
  const NoiseModel noise = o.noise.resolve();
  const std::uint64_t seed = seed_for(c, noise);

  const PLTrace tr = synth_trace(m, uniform_grid(0.0, c.time.t_end_s, c.time.dt_s), noise, seed);
  const std::string path = output_path(c, o.out, "synth_trace.csv");
  write_csv(path, trace_to_table(tr));
  write_truth(path, "trace", {{"A", m.A}, {"B", m.B}, {"k", m.k_per_s}, {"D", m.D}, {"t0_s", m.t0_s}}, noise, seed,
              noise.stochastic());
  s.out << path << '\n';
  return kExitOk;
}

int run_synth_spectrum(const Session& s, const SpectrumSynthOpts& o) {
  const RunConfig c = s.config();
  SpectrumSpec spec;
  for (const auto& l : o.lines) spec.lines.push_back(parse_line(l));
  if (spec.lines.empty()) spec.lines.push_back({LineProfile::Lorentzian, 1000.0, 0.5 * (o.lo + o.hi), 0.5});
  spec.baseline = o.baseline;
  spec.slope_per_nm = o.slope;
  spec.reference_nm = 0.5 * (o.lo + o.hi);
  spec.lo_nm = o.lo;
  spec.hi_nm = o.hi;
  spec.step_nm = o.step;
  spec.temperature_tag = o.temperature_tag;
  const NoiseModel noise = o.noise.resolve();
  const std::uint64_t seed = seed_for(c, noise);

  const Spectrum sp = synth_spectrum(spec, noise, seed);
  const std::string path = output_path(c, o.out, "synth_spectrum.csv");
  write_csv(path, spectrum_to_table(sp));

  json lines = json::array();
  for (const auto& l : spec.lines) {
    const bool lor = l.profile == LineProfile::Lorentzian;
    lines.push_back({{"profile", lor ? "lorentzian" : "gaussian"},
                     {"I0", l.amplitude},
                     {"x0", l.center_nm},
                     {lor ? "gamma" : "sigma", l.width_nm},
                     {"area", lor ? constants::pi * l.amplitude * l.width_nm
                                  : std::sqrt(2.0 * constants::pi) * l.amplitude * l.width_nm}});
  }
  write_truth(path, "spectrum",
              {{"lines", lines}, {"baseline", spec.baseline}, {"slope_per_nm", spec.slope_per_nm},
               {"reference_nm", spec.reference_nm}},
              noise, seed, noise.stochastic());
  s.out << path << '\n';
  return kExitOk;
}

int run_synth_scaling(const Session& s, const ScalingSynthOpts& o) {
  const RunConfig c = s.config();
  if (o.points < 2) throw ConfigError("--points must be at least 2");
  const NoiseModel noise = o.noise.resolve();
  const std::uint64_t seed = seed_for(c, noise);
  const double bicarb = o.bicarbonate.value_or(c.surface.bicarbonate_conc);

  const auto fluxes = log_grid(o.lo, o.hi, o.points);
  const auto pts = synth_scaling(c.cycle, c.kinetics, bicarb, fluxes, o.intensity_per_flux, noise, seed);
  const std::string path = output_path(c, o.out, "synth_scaling.csv");
  write_csv(path, scaling_to_table(pts));

  const double mid = std::sqrt(o.lo * o.hi);
  const double source_mid = generation_rate(c.cycle, o.intensity_per_flux * mid);
  write_truth(path, "scaling",
              {{"bicarbonate", bicarb},
               {"intensity_per_flux", o.intensity_per_flux},
               {"flux_range", {o.lo, o.hi}},
               {"local_exponent_at_mid",
                local_source_exponent(c.kinetics, bicarb, source_mid)},
               {"recombination_to_transfer_at_mid", recombination_to_transfer_ratio(c.kinetics, bicarb, source_mid)}},
              noise, seed, noise.stochastic());
  s.out << path << '\n';
  return kExitOk;
}

void noise_options(CLI::App* c, NoiseOpts& n) {
  c->add_option("--noise", n.kind, "none, poisson or gaussian")->check(CLI::IsMember({"none", "poisson", "gaussian"}));
  c->add_option("--sigma", n.sigma, "Gaussian noise standard deviation");
  c->add_option("--bin", n.bin_s, "Poisson counting interval in s");
}

}  // namespace

void add_synth(CLI::App& app, Runner& r) {
  auto* syn = app.add_subcommand("synth", "Seeded synthetic data with ground truth");
  syn->require_subcommand(1);

  auto to = std::make_shared<TraceSynthOpts>();
  auto* t = syn->add_subcommand("trace", "PL trace");
  t->add_option("--A", to->a);
  t->add_option("--B", to->b);
  t->add_option("--k", to->k, "Rate in 1/s");
  t->add_option("--D", to->d, "Saturated count rate");
  t->add_option("--t0", to->t0, "Reference time in s");
  t->add_option("--t-end", to->t_end, "End park time in s");
  t->add_option("--dt", to->dt, "Sampling step in s");
  noise_options(t, to->noise);
  t->add_option("-o,--out", to->out, "Output CSV");
  t->callback([&r, to] { r.status = run_synth_trace(r.session, *to); });

  auto so = std::make_shared<SpectrumSynthOpts>();
  auto* sp = syn->add_subcommand("spectrum", "Emission spectrum built from lines on a linear baseline");
  sp->add_option("--line", so->lines, "PROFILE,AMPLITUDE,CENTER_NM,WIDTH_NM (repeatable)");
  sp->add_option("--baseline", so->baseline);
  sp->add_option("--slope", so->slope, "Baseline slope per nm about the range centre");
  sp->add_option("--lo", so->lo, "First wavelength in nm");
  sp->add_option("--hi", so->hi, "Last wavelength in nm");
  sp->add_option("--step", so->step, "Wavelength step in nm");
  sp->add_option("--temperature-tag", so->temperature_tag);
  noise_options(sp, so->noise);
  sp->add_option("-o,--out", so->out, "Output CSV");
  sp->callback([&r, so] { r.status = run_synth_spectrum(r.session, *so); });

  auto ko = std::make_shared<ScalingSynthOpts>();
  auto* k = syn->add_subcommand("scaling", "Steady-state k over a flux sweep (config cycle and kinetics)");
  k->add_option("--flux-lo", ko->lo);
  k->add_option("--flux-hi", ko->hi);
  k->add_option("--points", ko->points);
  k->add_option("--intensity-per-flux", ko->intensity_per_flux, "Scale from flux to cycle intensity");
  k->add_option("--bicarbonate", ko->bicarbonate);
  noise_options(k, ko->noise);
  k->add_option("-o,--out", ko->out, "Output CSV");
  k->callback([&r, ko] { r.status = run_synth_scaling(r.session, *ko); });
}

}  // namespace chargetune::cli
