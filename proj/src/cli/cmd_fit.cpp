#include <algorithm>
#include <cmath>
#include <memory>

#include "chargetune/charge_state.hpp"
#include "chargetune/synth.hpp"
#include "commands.hpp"

namespace chargetune::cli {

namespace {

constexpr int kPlotPoints = 400;

struct TraceFitOpts {
  std::string input, weighting = "poisson", out, plot;
};

struct ScalingFitOpts {
  std::string input, out, plot;
};

struct SpectrumFitOpts {
  std::string input, profile = "lorentzian", out, plot;
  std::vector<double> window;
};

struct PopulationOpts {
  std::vector<std::string> inputs;
  std::vector<double> zero_window{570.0, 580.0};
  std::vector<double> minus_window{632.0, 642.0};
  std::string out;
};

// Rows of (x, value, model, kind): kind 0 = data point, 1 = dense model curve.
CsvTable plot_table(const std::string& x_name, const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& dense_x, const auto& model) {
  CsvTable t;
  t.header = {x_name, "value", "model", "kind"};
  for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({x[i], y[i], model(x[i]), 0.0});
  for (double xd : dense_x) {
    const double m = model(xd);
    t.rows.push_back({xd, m, m, 1.0});
  }
  return t;
}

std::vector<double> dense(double lo, double hi) {
  std::vector<double> out(kPlotPoints);
  for (int i = 0; i < kPlotPoints; ++i) out[i] = lo + (hi - lo) * i / (kPlotPoints - 1);
  return out;
}

int emit(const Session& s, const std::string& out, const json& j, bool flagged) {
  if (out.empty()) s.out << j.dump(2) << '\n';
  else write_json(out, j);
  return flagged ? kExitFlaggedFit : kExitOk;
}

int run_fit_trace(const Session& s, const TraceFitOpts& o) {
  const PLTrace tr = trace_from_table(read_csv(o.input));
  TraceFitOptions opt;
  opt.weighting = o.weighting == "poisson"  ? TraceWeighting::Poisson
                  : o.weighting == "sigma" ? TraceWeighting::Sigma
                                           : TraceWeighting::Uniform;
  const FitResult r = fit_trace(tr, opt);
  json j = to_json(r);
  j["input"] = o.input;
  j["model"] = "I(t) = D / (1 + exp(A + B exp(-k t)))";
  if (!o.plot.empty()) {
    const TraceModelParams p{r.value("A"), r.value("B"), r.value("k"), r.value("D"), 0.0};
    const auto [lo, hi] = std::minmax_element(tr.t_park_s.begin(), tr.t_park_s.end());
    write_csv(o.plot, plot_table("t_park_s", tr.t_park_s, tr.counts_per_s, dense(*lo, *hi),
                                 [&p](double t) { return pl_trace(t, p); }));
  }
  return emit(s, o.out, j, !r.ok());
}

int run_fit_scaling(const Session& s, const ScalingFitOpts& o) {
  const auto pts = scaling_from_table(read_csv(o.input));
  const FitResult r = fit_power_law(pts);
  json j = to_json(r);
  j["input"] = o.input;
  j["model"] = "k = prefactor * flux^beta";
  if (!o.plot.empty()) {
    std::vector<double> x, y;
    for (const auto& p : pts) {
      x.push_back(p.flux);
      y.push_back(p.k);
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double a = r.value("prefactor"), b = r.value("beta");
    write_csv(o.plot, plot_table("flux", x, y, log_grid(*lo, *hi, kPlotPoints),
                                 [a, b](double f) { return a * std::pow(f, b); }));
  }
  return emit(s, o.out, j, !r.ok());
}

int run_fit_spectrum(const Session& s, const SpectrumFitOpts& o) {
  const Spectrum sp = spectrum_from_table(read_csv(o.input));
  if (sp.wavelength_nm.empty()) throw ParseError("spectrum has no samples", 0);
  SpectralWindow w{*std::min_element(sp.wavelength_nm.begin(), sp.wavelength_nm.end()),
                   *std::max_element(sp.wavelength_nm.begin(), sp.wavelength_nm.end())};
  if (!o.window.empty()) w = {o.window[0], o.window[1]};
  const LineProfile profile = o.profile == "gaussian" ? LineProfile::Gaussian : LineProfile::Lorentzian;
  const FitResult r = fit_line(sp, w, profile);
  json j = to_json(r);
  j["input"] = o.input;
  j["profile"] = o.profile;
  j["window_nm"] = {w.lo_nm, w.hi_nm};
  if (!o.plot.empty()) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sp.wavelength_nm.size(); ++i) {
      if (sp.wavelength_nm[i] < w.lo_nm || sp.wavelength_nm[i] > w.hi_nm) continue;
      x.push_back(sp.wavelength_nm[i]);
      y.push_back(sp.counts[i]);
    }
    const double i0 = r.value("I0"), x0 = r.value("x0"), width = r.values[2];
    const double c0 = r.value("c0"), c1 = r.value("c1"), xc = r.derived.at("baseline_center_nm");
    write_csv(o.plot, plot_table("wavelength_nm", x, y, dense(w.lo_nm, w.hi_nm), [&](double v) {
                return line_profile_value(profile, v, i0, x0, width) + c0 + c1 * (v - xc);
              }));
  }
  return emit(s, o.out, j, !r.ok());
}

int run_fit_populations(const Session& s, const PopulationOpts& o) {
  std::vector<Spectrum> series;
  for (const auto& f : o.inputs) series.push_back(spectrum_from_table(read_csv(f)));
  const auto samples = charge_populations_from_spectra(series, {o.zero_window[0], o.zero_window[1]},
                                                       {o.minus_window[0], o.minus_window[1]});
  json arr = json::array();
  std::vector<double> zero;
  bool flagged = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i];
    arr.push_back({{"input", o.inputs[i]},
                   {"nv_zero", p.nv_zero},
                   {"nv_minus", p.nv_minus},
                   {"area_zero", p.area_zero},
                   {"area_minus", p.area_minus},
                   {"skipped", p.skipped},
                   {"nv_plus_attributed", p.nv_plus_attributed}});
    flagged = flagged || p.skipped || p.nv_plus_attributed;
    if (!p.skipped) zero.push_back(p.nv_zero);
  }
  json j = {{"schema_version", kSchemaVersion}, {"samples", arr}};
  if (!zero.empty()) {
    const auto m = ensemble_mean(zero);
    j["nv_zero_mean"] = {{"mean", m.mean}, {"standard_error", m.standard_error}, {"n", m.n}};
  }
  return emit(s, o.out, j, flagged);
}

void window_option(CLI::App* c, const std::string& name, std::vector<double>& target, const std::string& help) {
  c->add_option(name, target, help)->expected(2);
}

}  // namespace

void add_fit(CLI::App& app, Runner& r) {
  auto* fit = app.add_subcommand("fit", "Fit measured or synthetic data");
  fit->require_subcommand(1);

  auto to = std::make_shared<TraceFitOpts>();
  auto* t = fit->add_subcommand("trace", "Fit I(t) = D / (1 + exp(A + B exp(-k t)))");
  t->add_option("input", to->input, "Trace CSV")->required();
  t->add_option("--weighting", to->weighting)->check(CLI::IsMember({"poisson", "sigma", "uniform"}));
  t->add_option("-o,--out", to->out, "Result JSON (default: stdout)");
  t->add_option("--plot-data", to->plot, "Data and dense model curve CSV");
  t->callback([&r, to] { r.status = run_fit_trace(r.session, *to); });

  auto so = std::make_shared<ScalingFitOpts>();
  auto* sc = fit->add_subcommand("scaling", "Power-law exponent of k versus flux");
  sc->add_option("input", so->input, "Scaling CSV (flux,k[,sigma_k])")->required();
  sc->add_option("-o,--out", so->out, "Result JSON (default: stdout)");
  sc->add_option("--plot-data", so->plot, "Data and dense model curve CSV");
  sc->callback([&r, so] { r.status = run_fit_scaling(r.session, *so); });

  auto po = std::make_shared<SpectrumFitOpts>();
  auto* sp = fit->add_subcommand("spectrum", "Single line plus linear baseline");
  sp->add_option("input", po->input, "Spectrum CSV")->required();
  sp->add_option("--profile", po->profile)->check(CLI::IsMember({"lorentzian", "gaussian"}));
  window_option(sp, "--window", po->window, "Fit window LO HI in nm (default: whole spectrum)");
  sp->add_option("-o,--out", po->out, "Result JSON (default: stdout)");
  sp->add_option("--plot-data", po->plot, "Data and dense model curve CSV");
  sp->callback([&r, po] { r.status = run_fit_spectrum(r.session, *po); });

  auto pp = std::make_shared<PopulationOpts>();
  auto* pop = fit->add_subcommand("populations", "NV0/NV- fractions from ZPL areas");
  pop->add_option("inputs", pp->inputs, "Spectrum CSVs")->required();
  window_option(pop, "--nv0-window", pp->zero_window, "NV0 ZPL window LO HI in nm");
  window_option(pop, "--nvm-window", pp->minus_window, "NV- ZPL window LO HI in nm");
  pop->add_option("-o,--out", pp->out, "Result JSON (default: stdout)");
  pop->callback([&r, pp] { r.status = run_fit_populations(r.session, *pp); });
}

}  // namespace chargetune::cli
