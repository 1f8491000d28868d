#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "chargetune/config.hpp"
#include "chargetune/errors.hpp"
#include "chargetune/formats.hpp"
#include "chargetune/synth.hpp"
#include "oracles/closed_forms.hpp"
#include "support.hpp"

using namespace chargetune;
using nlohmann::json;
using testing::cli;
using testing::rel;
using testing::ScratchDir;
using testing::slurp;
using testing::spit;

namespace {

std::size_t parse_line_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_csv(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

json error_json(const std::string& err) { return json::parse(err).at("error"); }

}  // namespace

// --- formats -----------------------------------------------------------------

TEST_CASE("numbers round trip through text") {
  for (double x : {0.1, 1.0 / 3.0, 2.9e-4, -18.48, 6.02214076e23, 5e-324}) {
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
}

TEST_CASE("csv round trip") {
  CsvTable t;
  t.meta["integration_time_s"] = "2";
  t.header = {"a", "b"};
  t.rows = {{1.0 / 3.0, -2.5e-7}, {4.0, 1e300}};
  std::ostringstream out;
  write_csv(out, t);
  CHECK(out.str().rfind("# schema_version: 1\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = parse_csv(in);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.meta.at("integration_time_s") == "2");
  CHECK(back.column("b") == 1);
  CHECK_THROWS_AS(back.column("c"), ParseError);
}

TEST_CASE("csv errors carry line numbers") {
  CHECK(parse_line_of("# schema_version: 2\nx,y\n1,2\n") == 1);
  CHECK(parse_line_of("# schema_version: 1\nx,y\n1,2\n3,oops\n") == 4);
  CHECK(parse_line_of("x,y\n1,2\n3\n") == 3);
  CHECK(parse_line_of("x,y\n1,nan\n") == 2);
  CHECK(parse_line_of("# schema_version: 1.4\nx\n1\n") == 0);  // minor versions are accepted
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_csv(empty), ParseError);
}

TEST_CASE("typed tables") {
  PLTrace tr{{0, 90, 180}, {1, 2, 3}, {}};
  const auto back = trace_from_table(trace_to_table(tr));
  CHECK(back.t_park_s == tr.t_park_s);
  CHECK(back.counts_per_s == tr.counts_per_s);
  CHECK(back.sigma.empty());

  Spectrum sp{{570, 570.5}, {10, 11}, 2.5, "LT"};
  const auto sb = spectrum_from_table(spectrum_to_table(sp));
  CHECK(sb.counts == sp.counts);
  CHECK(sb.integration_time_s == 2.5);
  CHECK(sb.temperature_tag == "LT");

  const std::vector<ScalingPoint> pts{{1, 2, 0.1}, {10, 3, 0.2}};
  const auto pb = scaling_from_table(scaling_to_table(pts));
  CHECK(pb[1].flux == 10);
  CHECK(pb[1].sigma_k == 0.2);

  CsvTable wrong;
  wrong.header = {"t", "counts_per_s"};
  CHECK_THROWS_AS(trace_from_table(wrong), ParseError);
}

// --- config --------------------------------------------------------------------

TEST_CASE("config defaults round trip") {
  const auto c = RunConfig::defaults();
  CHECK_NOTHROW(c.validate());
  const auto text = config_to_json(c);
  CHECK(config_to_json(parse_config(text)) == text);
  CHECK(json::parse(text).at("schema_version") == 1);
}

TEST_CASE("config rejects unknown keys and bad types") {
  try {
    parse_config(R"({"schema_version": 1, "kinetics": {"k9": 1}})");
    FAIL("accepted an unknown key");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("kinetics.k9") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "material": {"band_gap_eV": "big"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "kinetics": {"k5": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schema_version": 1, "seed": -4})"), ConfigError);
}

TEST_CASE("config partial override keeps the rest") {
  const auto c = parse_config(R"({"schema_version": 1, "seed": 9,
      "illumination": {"schedule": {"cycles": [{"on_s": 1200, "off_s": 2400}], "repeat": true}}})");
  CHECK(c.seed == 9u);
  CHECK(c.illumination.schedule.repeat);
  CHECK(c.illumination.schedule.cycles.at(0).off_s == 2400);
  CHECK(c.kinetics.k6 == RunConfig::defaults().kinetics.k6);
  const auto inf = parse_config(R"({"schema_version": 1, "illumination": {"schedule": {"cycles": [{"on_s": null}]}}})");
  CHECK(std::isinf(inf.illumination.schedule.cycles.at(0).on_s));
}

// --- synthetic data ----------------------------------------------------------------

TEST_CASE("uniform and log grids") {
  const auto g = uniform_grid(0.0, 14400.0, 90.0);
  CHECK(g.size() == 161);
  CHECK(g.back() == 14400.0);
  const auto l = log_grid(1e4, 1e6, 9);
  CHECK(l.front() == 1e4);
  CHECK(l.back() == doctest::Approx(1e6).epsilon(1e-14));
  CHECK(l[4] == doctest::Approx(1e5).epsilon(1e-14));
}

TEST_CASE("noiseless synthesis is the forward model") {
  const TraceModelParams p{-18.48, 78.65, 2.9e-4, 1e4, 0.0};
  const auto tr = synth_trace(p, uniform_grid(0, 14400, 90), NoiseModel{}, 0);
  for (std::size_t i = 0; i < tr.t_park_s.size(); ++i) {
    CHECK(rel(tr.counts_per_s[i], oracle::trace(tr.t_park_s[i], -18.48, 78.65, 2.9e-4, 1e4)) < 1e-12);
  }
}

TEST_CASE("poisson counts have variance equal to the mean") {
  // A flat trace at 1e4 counts/s; pool the across-replicate variance over time.
  const TraceModelParams flat{0.0, 0.0, 1e-3, 2e4, 0.0};
  const auto ts = uniform_grid(0, 14400, 90);
  NoiseModel n;
  n.kind = NoiseKind::Poisson;
  std::vector<double> sum(ts.size()), sum2(ts.size());
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    const auto tr = synth_trace(flat, ts, n, 1000 + r);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sum[i] += tr.counts_per_s[i];
      sum2[i] += tr.counts_per_s[i] * tr.counts_per_s[i];
    }
  }
  double ratio = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double mean = sum[i] / reps;
    const double var = (sum2[i] - reps * mean * mean) / (reps - 1);
    ratio += var / mean;
  }
  ratio /= ts.size();
  CHECK(std::abs(ratio - 1.0) < 0.05);
}

TEST_CASE("synthesis is seeded") {
  NoiseModel n;
  n.kind = NoiseKind::Gaussian;
  n.sigma = 3.0;
  const TraceModelParams p{-5, 10, 1e-3, 100, 0};
  const auto ts = uniform_grid(0, 3600, 60);
  CHECK(synth_trace(p, ts, n, 4).counts_per_s == synth_trace(p, ts, n, 4).counts_per_s);
  CHECK(synth_trace(p, ts, n, 4).counts_per_s != synth_trace(p, ts, n, 5).counts_per_s);
  NoiseModel bad;
  bad.kind = NoiseKind::Gaussian;
  bad.sigma = -1;
  CHECK_THROWS(bad.validate());
}

// --- command line ----------------------------------------------------------------

TEST_CASE("simulate trace matches the model") {
  ScratchDir dir("sim_trace");
  const auto out = dir / "trace.csv";
  const auto r = cli({"simulate", "trace", "--A", "-18.48", "--B", "78.65", "--k", "2.9e-4", "--D", "1e4",
                      "--t-end", "14400", "--dt", "90", "-o", out});
  REQUIRE(r.code == 0);
  const auto tr = trace_from_table(read_csv(out));
  CHECK(tr.t_park_s.size() == 161);
  for (std::size_t i = 0; i < tr.t_park_s.size(); ++i) {
    CHECK(rel(tr.counts_per_s[i], oracle::trace(tr.t_park_s[i], -18.48, 78.65, 2.9e-4, 1e4)) < 1e-12);
  }
  const auto meta = json::parse(slurp(out + ".meta.json"));
  CHECK(meta.at("schema_version") == 1);
  CHECK(meta.at("config").at("kinetics").contains("k6"));
}

TEST_CASE("simulate surface reports both clocks") {
  ScratchDir dir("sim_surface");
  const auto out = dir / "surface.csv";
  const auto r = cli({"simulate", "surface", "--on", "1200", "--off", "2400", "--t-end", "14400", "--dt", "300",
                      "-o", out});
  REQUIRE(r.code == 0);
  const auto t = read_csv(out);
  const auto wall = t.column_values("wall_clock_s");
  const auto park = t.column_values("park_s");
  const auto sch = IlluminationSchedule::gated(1200, 2400);
  for (std::size_t i = 0; i < wall.size(); ++i) CHECK(park[i] == doctest::Approx(cumulative_on_time(sch, wall[i])));
  const auto ch = t.column_values("ch_bonds"), closed = t.column_values("ch_bonds_closed_form");
  for (std::size_t i = 0; i < ch.size(); ++i) CHECK(rel(ch[i], closed[i]) < 2e-3);
}

TEST_CASE("simulate nv-cycle in the dark is constant") {
  ScratchDir dir("sim_nv");
  const auto out = dir / "nv.csv";
  REQUIRE(cli({"simulate", "nv-cycle", "--intensity", "0", "--t-end", "10", "-o", out}).code == 0);
  const auto t = read_csv(out);
  for (double v : t.column_values("nv_minus")) CHECK(v == doctest::Approx(RunConfig::defaults().cycle.total_nv));
  for (double v : t.column_values("nv_zero")) CHECK(v == 0.0);
}

TEST_CASE("bandbend flat") {
  auto r = cli({"bandbend", "flat", "--surface", "H"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("d_dep_m").get<double>() == doctest::Approx(1.65e-6).epsilon(0.005));
  r = cli({"bandbend", "flat", "--ebb", "0"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("d_dep_m").get<double>() == 0.0);
}

TEST_CASE("estimate rate") {
  auto r = cli({"estimate", "rate", "--json"});
  REQUIRE(r.code == 0);
  const double k = json::parse(r.out).at("k_hz");
  CHECK(k == doctest::Approx(5.0e-3).epsilon(0.05));
  r = cli({"estimate", "rate", "--json", "--eta", "0"});
  CHECK(json::parse(r.out).at("k_hz").get<double>() == 0.0);
  r = cli({"estimate", "rate", "--json", "--gamma-ion", "2e6"});
  CHECK(json::parse(r.out).at("k_hz").get<double>() == doctest::Approx(2 * k).epsilon(1e-14));
  r = cli({"estimate", "rate"});
  CHECK(r.out.find("N_eff") != std::string::npos);
}

TEST_CASE("synth to fit round trips") {
  ScratchDir dir("roundtrip");

  SUBCASE("trace") {
    const auto csv = dir / "trace.csv";
    REQUIRE(cli({"--seed", "21", "synth", "trace", "--noise", "poisson", "--bin", "90", "-o", csv}).code == 0);
    const auto truth = json::parse(slurp(csv + ".truth.json")).at("truth");
    const auto r = cli({"fit", "trace", csv});
    REQUIRE(r.code == 0);
    const auto fit = json::parse(r.out);
    CHECK(rel(fit.at("parameters").at("k").at("value"), truth.at("k")) < 0.03);
  }
  SUBCASE("scaling") {
    const auto csv = dir / "scaling.csv";
    REQUIRE(cli({"synth", "scaling", "-o", csv}).code == 0);
    const auto r = cli({"fit", "scaling", csv});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("parameters").at("beta").at("value").get<double>() ==
          doctest::Approx(0.5).epsilon(0.04));
  }
  SUBCASE("spectrum") {
    const auto csv = dir / "spectrum.csv";
    REQUIRE(cli({"synth", "spectrum", "--line", "lorentzian,2,575,0.5", "-o", csv}).code == 0);
    const auto r = cli({"fit", "spectrum", "--profile", "lorentzian", csv, "--plot-data", dir / "plot.csv"});
    REQUIRE(r.code == 0);
    const auto fit = json::parse(r.out);
    CHECK(fit.at("derived").at("area").get<double>() == doctest::Approx(oracle::kPi * 2 * 0.5).epsilon(1e-6));
    const auto plot = read_csv(dir / "plot.csv");
    CHECK(plot.header == std::vector<std::string>{"wavelength_nm", "value", "model", "kind"});
  }
  SUBCASE("populations") {
    const auto a = dir / "a.csv", b = dir / "b.csv";
    const std::vector<std::string> common{"--lo", "560", "--hi", "660", "--step", "0.02"};
    auto args = std::vector<std::string>{"synth", "spectrum", "--line", "lorentzian,100,575,0.4", "--line",
                                         "lorentzian,300,637,0.4", "-o", a};
    args.insert(args.end(), common.begin(), common.end());
    REQUIRE(cli(args).code == 0);
    args = {"synth", "spectrum", "--line", "lorentzian,300,637,0.4", "-o", b};
    args.insert(args.end(), common.begin(), common.end());
    REQUIRE(cli(args).code == 0);
    const auto r = cli({"fit", "populations", a, b});
    CHECK(r.code == 2);  // second spectrum has no NV0 line
    const auto j = json::parse(r.out);
    CHECK(j.at("samples")[0].at("nv_zero").get<double>() == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(j.at("samples")[1].at("nv_plus_attributed").get<bool>());
  }
}

TEST_CASE("reruns are byte identical") {
  ScratchDir dir("determinism");
  const std::vector<std::vector<std::string>> commands{
      {"--seed", "3", "synth", "trace", "--noise", "poisson", "-o", dir / "t.csv"},
      {"--seed", "3", "synth", "spectrum", "--noise", "gaussian", "--sigma", "2", "-o", dir / "s.csv"},
      {"--seed", "3", "synth", "scaling", "--noise", "gaussian", "--sigma", "0.05", "-o", dir / "k.csv"},
      {"simulate", "surface", "--t-end", "3600", "-o", dir / "surf.csv"},
      {"fit", "trace", dir / "t.csv", "-o", dir / "fit.json", "--plot-data", dir / "fit.csv"},
  };
  const std::vector<std::string> files{"t.csv", "t.csv.truth.json", "s.csv", "k.csv", "surf.csv",
                                       "surf.csv.meta.json", "fit.json", "fit.csv"};
  std::vector<std::string> first;
  for (const auto& c : commands) CHECK(cli(c).code == 0);
  for (const auto& f : files) first.push_back(slurp(dir / f));
  for (const auto& c : commands) CHECK(cli(c).code == 0);
  for (std::size_t i = 0; i < files.size(); ++i) {
    CAPTURE(files[i]);
    CHECK(!first[i].empty());
    CHECK(slurp(dir / files[i]) == first[i]);
  }
}

TEST_CASE("exit codes and error reports") {
  ScratchDir dir("errors");

  auto r = cli({"simulate", "bogus"});
  CHECK(r.code == kExitUsage);
  CHECK(error_json(r.err).at("kind") == "usage");

  r = cli({"synth", "trace", "--noise", "poisson", "-o", dir / "x.csv"});
  CHECK(r.code == kExitUsage);
  CHECK(error_json(r.err).at("message").get<std::string>().find("seed") != std::string::npos);

  spit(dir / "unknown.json", R"({"schema_version": 1, "geometry": {"height": 3}})");
  r = cli({"-c", dir / "unknown.json", "estimate", "rate"});
  CHECK(r.code == kExitUsage);
  CHECK(error_json(r.err).at("kind") == "config");

  spit(dir / "v2.csv", "# schema_version: 2\nt_park_s,counts_per_s\n0,1\n");
  r = cli({"fit", "trace", dir / "v2.csv"});
  CHECK(r.code == kExitUsage);
  CHECK(error_json(r.err).at("line") == 1);

  spit(dir / "bad.csv", "t_park_s,counts_per_s\n0,1\n90,x\n");
  r = cli({"fit", "trace", dir / "bad.csv"});
  CHECK(error_json(r.err).at("line") == 3);

  std::string flat = "t_park_s,counts_per_s\n";
  for (int i = 0; i < 20; ++i) flat += std::to_string(90 * i) + ",100\n";
  spit(dir / "flat.csv", flat);
  CHECK(cli({"fit", "trace", dir / "flat.csv"}).code == kExitFlaggedFit);

  spit(dir / "tight.json", R"({"schema_version": 1, "grid": {"n_rho": 150, "n_z": 300, "max_iterations": 1}})");
  r = cli({"-c", dir / "tight.json", "bandbend", "pillar", "-o", dir / "field.csv"});
  CHECK(r.code == kExitSolver);
  CHECK(error_json(r.err).at("kind") == "solver");

  CHECK(cli({"--help"}).code == kExitOk);
}
