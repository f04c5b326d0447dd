import math

import pytest
import tomli_w

from inhomspdc import units
from inhomspdc.apertures import CircularAperture, GaussianAperture
from inhomspdc.config import (ConfigDiagnostics, load_config, load_preset,
                              parse_run_config, preset_names, validate)
from inhomspdc.interference import v_pol
from inhomspdc.nonlinearity import Cascade, FourierPeriodic

SHIPPED = ["fig10_antiparallel", "fig10_parallel", "fig11", "fig1a", "fig1b",
           "fig2a", "fig2b", "fig7", "fig8"]


def write(tmp_path, tree, name="cfg.toml"):
    path = tmp_path / name
    path.write_bytes(tomli_w.dumps(tree).encode())
    return path


def test_units():
    assert units.parse_quantity("0.5 mm", units.LENGTH) == 0.5e-3
    assert units.parse_quantity("351.1nm", units.LENGTH) == pytest.approx(351.1e-9)
    assert units.parse_quantity("0.19 ps/mm", units.DISPERSION) == pytest.approx(1.9e-10)
    assert units.parse_quantity("45 deg", units.ANGLE) == pytest.approx(math.pi / 4)
    for bad, kind in [(0.5, units.LENGTH), ("0.5", units.LENGTH), ("3 ps", units.LENGTH),
                      ("mm", units.LENGTH), (True, units.TIME)]:
        with pytest.raises(units.UnitError):
            units.parse_quantity(bad, kind)


def test_shipped_presets():
    assert preset_names() == SHIPPED
    for name in SHIPPED:
        run = load_preset(name)
        assert run.name == name
        assert run.sweep.steps >= 2


def test_fig10_preset_contents():
    run = load_preset("fig10_parallel")
    s = run.series[0].system
    assert s.aperture == CircularAperture(2.5e-3)
    assert s.geometry.d1 == pytest.approx(0.75)
    assert s.thickness == pytest.approx(0.5e-3)
    assert s.pump.wavelength_p == pytest.approx(351.1e-9)
    assert s.crystal1.walkoff_M == (0.07, 0.0)
    grid = run.sweep.grid(s)
    assert grid[0] == pytest.approx(2e-3) and grid[-1] == pytest.approx(0.1)
    assert v_pol(run.series[0].analyzers) == -1.0


def test_fig8_preset_contents():
    run = load_preset("fig8")
    thick = sorted({s.system.thickness for s in run.series})
    assert thick == pytest.approx([0.5e-3, 1.5e-3, 5e-3])
    assert {s.system.axes for s in run.series} == {"parallel", "antiparallel"}
    for s in run.series:
        assert s.system.gap.length_d == 0.0
        assert s.system.geometry.d1 == pytest.approx(1.0)
        assert isinstance(s.system.aperture, GaussianAperture)
    assert run.sweep.variable == "r"


def test_state_presets():
    assert isinstance(load_preset("fig2a").series[0].system, Cascade)
    assert load_preset("fig1a").sweep.variable == "delta"


def test_validate_examples(tmp_path):
    assert validate(write(tmp_path, {"preset": "fig10_parallel"})) == []
    neg = write(tmp_path, {"preset": "fig10_parallel",
                           "system": {"crystal": {"thickness": "-0.5 mm"}}}, "neg.toml")
    diags = validate(neg)
    assert len(diags) == 1 and "system.crystal.thickness" in diags[0]
    one = write(tmp_path, {"preset": "fig10_parallel", "sweep": {"steps": 1}}, "one.toml")
    diags = validate(one)
    assert len(diags) == 1 and "sweep.steps" in diags[0]


def test_validate_collects_all(tmp_path):
    tree = {"preset": "fig10_parallel",
            "system": {"crystal": {"thickness": "0.5", "dispersion": "1 mm"},
                       "aperture": {"model": "hexagonal"}, "extra": 1},
            "sweep": {"start": "5 mm", "stop": "1 mm"}}
    diags = validate(write(tmp_path, tree))
    joined = "\n".join(diags)
    for field in ("system.crystal.thickness", "system.crystal.dispersion",
                  "system.aperture.model", "system.extra", "sweep"):
        assert field in joined
    assert len(diags) >= 5


def test_validate_io_error(tmp_path):
    with pytest.raises(OSError):
        validate(tmp_path / "missing.toml")


def test_syntax_error(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[system\n")
    assert len(validate(p)) == 1


def test_unknown_preset():
    with pytest.raises(ConfigDiagnostics):
        parse_run_config({"preset": "fig99"})


def test_custom_two_crystal(tmp_path):
    tree = {
        "name": "custom",
        "system": {
            "model": "two_crystal", "pump_wavelength": "351.1 nm", "axes": "antiparallel",
            "crystal": {"thickness": "1 mm", "dispersion": "0.19 ps/mm", "walkoff": [0.05, 0.01]},
            "gap": {"length": "3 mm", "index_pump": 1.0003, "index_degenerate": 1.0002},
            "geometry": {"d1": "1 m"},
            "aperture": {"model": "gaussian", "radius_a": "1 mm", "radius_b": "0.5 mm"},
            "analyzers": {"theta_A": "45 deg", "theta_B": "-45 deg"},
        },
        "sweep": {"variable": "tau", "start": "0 LD", "stop": "2 LD", "steps": 5},
        "quadrature": {"order": 96},
    }
    run = load_config(write(tmp_path, tree))
    s = run.series[0].system
    assert s.crystal2.walkoff_M == pytest.approx((-0.05, -0.01))
    assert s.aperture == GaussianAperture(1e-3, 0.5e-3)
    assert s.gap.phase == pytest.approx(s.pump.k_p * 1e-4 * 3e-3, rel=1e-9)
    assert run.sweep.grid(s)[-1] == pytest.approx(2 * s.window_delay)
    assert run.quadrature_order == 96
    assert v_pol(run.series[0].analyzers) == pytest.approx(-1.0)


def test_custom_fourier(tmp_path):
    tree = {"system": {"model": "state_function",
                       "profile": {"kind": "fourier_periodic", "thickness": "1 mm",
                                   "period": "0.1 mm", "coefficients": [[1, 0.5, 0.0], [-1, 0.5, 0.0]]}},
            "sweep": {"variable": "delta", "start": "-100 rad/mm", "stop": "100 rad/mm", "steps": 3}}
    run = load_config(write(tmp_path, tree))
    p = run.series[0].system
    assert isinstance(p, FourierPeriodic)
    assert list(p.orders) == [-1, 0, 1]
    assert run.name == "cfg"


def test_sweep_variable_must_match_model(tmp_path):
    tree = {"preset": "fig1a", "sweep": {"variable": "d", "start": "1 mm", "stop": "2 mm"}}
    diags = validate(write(tmp_path, tree))
    assert any("sweep.variable" in d for d in diags)


def test_series_override_paths(tmp_path):
    tree = {"preset": "fig7", "series": [{"label": "x", "set": {"crystal.nope": "1 mm"}}]}
    assert validate(write(tmp_path, tree))
