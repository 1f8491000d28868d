#include <doctest.h>

#include <random>

#include "chargetune/charge_state.hpp"
#include "chargetune/errors.hpp"
#include "oracles/closed_forms.hpp"
#include "support.hpp"

using namespace chargetune;
using testing::rel;

TEST_CASE("transition level offsets") {
  EnergyBalance b;
  CHECK(transition_level_offset(b) == doctest::Approx(1.53).epsilon(1e-12));
  b.electron_affinity_eV = 1.7;
  CHECK(transition_level_offset(b) == doctest::Approx(-0.47).epsilon(1e-12));
  const double base = transition_level_offset(b);
  b.delta_bb_eV = 0.3;
  CHECK(transition_level_offset(b) == doctest::Approx(base - 0.3).epsilon(1e-14));
}

TEST_CASE("fermi-dirac population") {
  const auto T = Temperature::room();
  const double kT = T.thermal_energy_eV();
  CHECK(population(0.0, T) == 0.5);
  CHECK(population(kT * std::log(99.0), T) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(population(kT * std::log(7.0 / 3.0), T) == doctest::Approx(0.30).epsilon(1e-12));
  CHECK(population(1e3, T) == 0.0);
  CHECK(population(-1e3, T) == 1.0);
}

TEST_CASE("population antisymmetry") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> x(-2.0, 2.0), kt(1e-4, 0.1);
  for (int i = 0; i < 2000; ++i) {
    const auto T = Temperature::from_thermal_energy(kt(rng));
    const double v = x(rng);
    CHECK(std::abs(population(-v, T) + population(v, T) - 1.0) <= 1e-15);
    CHECK(rel(population(v, T), oracle::fermi(v, T.thermal_energy_eV())) < 1e-12);
  }
}

TEST_CASE("electron affinity during oxidation") {
  const SurfaceState s;
  CHECK(electron_affinity_at(0.0, 1e-3, s) == doctest::Approx(-0.3));
  CHECK(electron_affinity_at(1e9, 1e-3, s) == doctest::Approx(1.7));
  CHECK(electron_affinity_at(std::log(2.0) * 1e3, 1e-3, s) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("trace model limits") {
  const TraceModelParams p{-18.48, 78.65, 2.9e-4, 1e4, 0.0};
  CHECK(pl_trace(1e9, p) == doctest::Approx(1e4 / (1 + std::exp(-18.48))));
  CHECK(pl_trace(0.0, p) == doctest::Approx(1e4 / (1 + std::exp(60.17))));
  const TraceModelParams flat{0.0, 0.0, 1e-3, 8.0, 0.0};
  for (double t : {0.0, 10.0, 1e5}) CHECK(pl_trace(t, flat) == 4.0);
  for (double t : {0.0, 1000.0, 4000.0, 9000.0}) CHECK(rel(pl_trace(t, p), oracle::trace(t, -18.48, 78.65, 2.9e-4, 1e4)) < 1e-12);
}

TEST_CASE("trace gradient against finite differences") {
  const TraceModelParams p{-3.0, 8.0, 1e-3, 100.0, 0.0};
  for (double t : {0.0, 500.0, 2000.0, 5000.0}) {
    const auto g = pl_trace_gradient(t, p);
    auto fd = [&](auto mutate, double h) {
      TraceModelParams a = p, b = p;
      mutate(a, h);
      mutate(b, -h);
      return (pl_trace(t, a) - pl_trace(t, b)) / (2 * h);
    };
    CHECK(g.dA == doctest::Approx(fd([](auto& q, double h) { q.A += h; }, 1e-6)).epsilon(1e-6));
    CHECK(g.dB == doctest::Approx(fd([](auto& q, double h) { q.B += h; }, 1e-6)).epsilon(1e-6));
    CHECK(g.dk == doctest::Approx(fd([](auto& q, double h) { q.k_per_s += h; }, 1e-10)).epsilon(1e-5));
    CHECK(g.dD == doctest::Approx(fd([](auto& q, double h) { q.D += h; }, 1e-4)).epsilon(1e-8));
  }
}

TEST_CASE("trace monotone iff B non-negative") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> a(-20, 5), b(-30, 30), k(1e-4, 1e-2);
  for (int i = 0; i < 300; ++i) {
    const TraceModelParams p{a(rng), b(rng), k(rng), 1.0, 0.0};
    bool nondecreasing = true;
    double last = pl_trace(0.0, p);
    for (int j = 1; j <= 400; ++j) {
      const double v = pl_trace(j * 25.0, p);
      if (v < last - 1e-15) nondecreasing = false;
      last = v;
    }
    if (p.B >= 0.0) CHECK(nondecreasing);
    // Strictly decreasing somewhere unless the change is below double resolution.
    else if (std::abs(pl_trace(0.0, p) - pl_trace(1e4, p)) > 1e-12) CHECK_FALSE(nondecreasing);
  }
}

TEST_CASE("trace parameters from the energy balance") {
  EnergyBalance fin;
  fin.electron_affinity_eV = 1.7;
  const auto p = trace_params_from_physics(fin, SurfaceState{}, 2.9e-4, 0.0, 1e4);
  CHECK(p.A == doctest::Approx(-18.48).epsilon(0.003));
  CHECK(p.B == doctest::Approx(78.65).epsilon(0.003));
  CHECK(p.A + p.B == doctest::Approx(60.16).epsilon(0.003));
  CHECK(p.A + p.B > 0.0);

  const auto later = trace_params_from_physics(fin, SurfaceState{}, 2.9e-4, 1000.0, 1e4);
  CHECK(later.A == p.A);
  CHECK(later.B == doctest::Approx(p.B * std::exp(-0.29)).epsilon(1e-14));
}

TEST_CASE("trace model equals the physical population pointwise") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> k(1e-4, 1e-2), t0(0.0, 2000.0), th(0.2, 1.0), dbb(0.0, 0.3);
  for (int i = 0; i < 50; ++i) {
    EnergyBalance fin;
    fin.electron_affinity_eV = 1.7;
    fin.delta_bb_eV = dbb(rng);
    SurfaceState s;
    s.hydrogen_fraction = th(rng);
    const double kk = k(rng), tt0 = t0(rng);
    const auto p = trace_params_from_physics(fin, s, kk, tt0, 500.0);
    const auto constant = [&](double) { return fin.delta_bb_eV; };
    for (int j = 0; j <= 50; ++j) {
      const double t = j * 100.0;
      // Independent route: the balance re-evaluated at the decayed affinity.
      EnergyBalance now = fin;
      now.electron_affinity_eV = electron_affinity_at(t + tt0, kk, s);
      const double want = 500.0 * population(transition_level_offset(now), fin.temperature);
      CHECK(std::abs(pl_trace(t, p) - want) <= 1e-12 * 500.0);
      CHECK(std::abs(pl_trace_from_physics(t, fin, s, kk, tt0, 500.0, constant) - want) <= 1e-12 * 500.0);
    }
  }
}

TEST_CASE("ensemble intensity") {
  const auto T = Temperature::room();
  EmitterEnsemble one{{{2.0, 0.04}}, 0.0};
  CHECK(ensemble_intensity(one, T) == doctest::Approx(2.0 * population(0.04, T)).epsilon(1e-15));

  EmitterEnsemble pair{{{0.7, 0.03}, {0.7, -0.03}}, 0.0};
  CHECK(ensemble_intensity(pair, T) == doctest::Approx(0.7).epsilon(1e-15));

  EmitterEnsemble same{{{0.2, 0.05}, {0.5, 0.05}, {1.1, 0.05}}, 0.0};
  CHECK(ensemble_intensity(same, T) == doctest::Approx(1.8 * population(0.05, T)).epsilon(1e-15));
  CHECK(ensemble_mean_approximation_error(same, T) < 1e-15);
}

TEST_CASE("two-emitter mean-level approximation") {
  EmitterEnsemble e{{{0.5, 0.020}, {0.5, 0.030}}, 0.0};
  const auto kt25 = Temperature::from_thermal_energy(0.025);
  CHECK(ensemble_intensity(e, kt25) == doctest::Approx(0.27075).epsilon(1e-4));
  CHECK(population(0.025, kt25) * 1.0 == doctest::Approx(0.26894).epsilon(1e-4));
  CHECK(ensemble_mean_approximation_error(e, kt25) == doctest::Approx(0.0067).epsilon(0.07));
  CHECK(ensemble_mean_approximation_error(e, Temperature::room()) == doctest::Approx(0.0064).epsilon(0.05));
  CHECK(ensemble_mean_approximation_error(e, kt25) <= ensemble_first_order_bound(e, kt25));
}

TEST_CASE("first-order bound holds for small spreads") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> w(0.1, 1.0), mean(-0.1, 0.1), d(-1.0, 1.0);
  const auto T = Temperature::room();
  const double kT = T.thermal_energy_eV();
  for (int i = 0; i < 500; ++i) {
    EmitterEnsemble e;
    const double m = mean(rng);
    for (int j = 0; j < 4; ++j) e.emitters.push_back({w(rng), m + 0.5 * kT * d(rng)});
    CHECK(ensemble_mean_approximation_error(e, T) <= ensemble_first_order_bound(e, T) * (1 + 1e-9) + 1e-15);
  }
}

TEST_CASE("fermi shift inference") {
  const auto lt = Temperature::low();
  CHECK(infer_fermi_shift(0.4, 0.4, lt).value_eV == 0.0);
  const auto s = infer_fermi_shift(0.5, 0.30, lt);
  CHECK(s.kind == ShiftKind::Point);
  CHECK(s.value_eV == doctest::Approx(-0.51e-3).epsilon(0.01));

  const auto rt = Temperature::room();
  const auto b = infer_fermi_shift(1e-4, 0.30, rt);
  CHECK(b.kind == ShiftKind::LowerBound);
  const double kT = rt.thermal_energy_eV();
  CHECK(b.value_eV == doctest::Approx(kT * (std::log(999.0) - std::log(7.0 / 3.0))).epsilon(1e-9));

  CHECK(infer_fermi_shift(0.3, 0.9999, rt).kind == ShiftKind::LowerBound);
  CHECK(infer_fermi_shift(0.9999, 0.3, rt).kind == ShiftKind::UpperBound);
  CHECK(infer_fermi_shift(1e-5, 0.99999, rt).kind == ShiftKind::LowerBound);
  const auto both = infer_fermi_shift(1e-5, 2e-5, rt);
  CHECK(both.kind == ShiftKind::Indeterminate);
  CHECK(std::isnan(both.value_eV));
  CHECK_THROWS_AS(infer_fermi_shift(-0.1, 0.3, rt), DomainError);
}

TEST_CASE("charge-state validation") {
  TraceModelParams p;
  p.D = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.k_per_s = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  EmitterEnsemble e;
  CHECK_THROWS_AS(e.validate(), DomainError);
}
