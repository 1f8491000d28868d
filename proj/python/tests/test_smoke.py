import json
import math

import pytest

import chargetune as ct


def test_all_ones_steady_state():
    pops = ct.nv_steady_state(ct.NVCycleParams(), 1.0)
    assert pops == pytest.approx([1 / 3, 1 / 6, 1 / 3, 1 / 6], rel=1e-12)
    assert ct.generation_rate(ct.NVCycleParams(), 1.0) == pytest.approx(1 / 6)


def test_dark_steady_state_raises():
    with pytest.raises(ArithmeticError):
        ct.nv_steady_state(ct.NVCycleParams(), 0.0)


def test_hole_root_and_rate():
    kin = ct.SurfaceKineticsParams(k5=1.0, k6=1.0)
    assert ct.hole_steady_state(kin, 1.0, 2.0) == pytest.approx(1.0)
    assert ct.rate_constant(kin, 1.0, 2.0) == pytest.approx(1.0)


def test_flux_and_schedule():
    e = ct.photon_energy_from_wavelength_nm(445.0)
    assert ct.photon_flux_from_power(3e-3, e) == pytest.approx(1.12e-8, rel=5e-3)
    assert ct.cumulative_on_time(1200.0, 2400.0, 4800.0) == pytest.approx(2400.0)


def test_depletion_depths():
    assert ct.surface_band_bending(1.0) == pytest.approx(3.9)
    assert ct.depletion_depth(3.9) == pytest.approx(1.65e-6, rel=5e-3)
    assert ct.depletion_depth(ct.surface_band_bending(0.0)) == pytest.approx(1.15e-6, rel=5e-3)


def test_population_symmetry():
    for x in (-0.1, 0.0, 0.03, 0.2):
        assert ct.population(x) + ct.population(-x) == pytest.approx(1.0, abs=1e-15)


def test_trace_round_trip():
    t = [90.0 * i for i in range(161)]
    y = ct.pl_trace(t, -18.48, 78.65, 2.9e-4, 1e4)
    fit = ct.fit_trace(t, y)
    assert fit["ok"]
    assert fit["parameters"]["k"][0] == pytest.approx(2.9e-4, rel=1e-6)


def test_power_law_and_line():
    assert ct.fit_power_law([1, 4, 9], [1, 2, 3])["parameters"]["beta"][0] == pytest.approx(0.5)
    x = [720 + 0.01 * i for i in range(4001)]
    y = [1.0 / ((v - 740.0) ** 2 + 1.0) for v in x]
    fit = ct.fit_line(x, y, 720.0, 760.0, "lorentzian")
    assert fit["derived"]["area"] == pytest.approx(math.pi, rel=1e-8)


def test_cli_in_process(tmp_path):
    code, out, err = ct.run_cli(["estimate", "rate", "--json"])
    assert code == 0, err
    assert json.loads(out)["k_hz"] == pytest.approx(5.0e-3, rel=0.05)

    code, _, err = ct.run_cli(["synth", "trace", "--noise", "poisson", "-o", str(tmp_path / "t.csv")])
    assert code == 1
    assert json.loads(err)["error"]["kind"] == "config"

    target = str(tmp_path / "t.csv")
    first = ct.run_cli(["--seed", "4", "synth", "trace", "--noise", "poisson", "-o", target])
    data = (tmp_path / "t.csv").read_bytes()
    second = ct.run_cli(["--seed", "4", "synth", "trace", "--noise", "poisson", "-o", target])
    assert first == second
    assert (tmp_path / "t.csv").read_bytes() == data
