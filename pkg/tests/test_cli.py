import csv
import io
import math

import numpy as np
import pytest
import tomli
import tomli_w

from inhomspdc.cli import WORKERS_ENV, execute, main, workers_from_env
from inhomspdc.config import load_config, load_preset, preset_names
from inhomspdc.output import read_config_text


def rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.reader(lines))


def small_config(tmp_path, steps=11, **extra):
    tree = {"preset": "fig10_antiparallel", "name": "small",
            "sweep": {"start": "2 mm", "stop": "40 mm", "steps": steps},
            "output": {"svg": True}}
    tree.update(extra)
    p = tmp_path / "small.toml"
    p.write_bytes(tomli_w.dumps(tree).encode())
    return p


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [l.split("\t")[0] for l in out] == preset_names()


def test_validate_verb(tmp_path, capsys):
    assert main(["validate", str(small_config(tmp_path))]) == 0
    bad = tmp_path / "bad.toml"
    bad.write_text('preset = "fig10_parallel"\n[sweep]\nsteps = 1\n')
    assert main(["validate", str(bad)]) == 2
    assert "sweep.steps" in capsys.readouterr().out
    assert main(["validate", str(tmp_path / "nope.toml")]) == 3


def test_run_config(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(small_config(tmp_path)), "--out", str(out)]) == 0
    summary = capsys.readouterr().out
    assert "small" in summary and "zero crossings" in summary
    data = rows(out / "small.csv")
    assert data[0] == ["abscissa", "V", "phi_disp", "phi_gamma"]
    assert len(data) == 12
    assert (out / "small.svg").read_text().lstrip().startswith("<?xml")
    first = data[1]
    digits = first[1].lstrip("-").split("e")[0].replace(".", "").lstrip("0")
    assert len(digits) <= 17
    assert float(first[0]) == pytest.approx(2e-3)


def test_steps_two(tmp_path):
    assert main(["run", str(small_config(tmp_path, steps=2)), "--out", str(tmp_path)]) == 0
    assert len(rows(tmp_path / "small.csv")) == 3


def test_run_errors(tmp_path, capsys):
    assert main(["run"]) == 2
    assert main(["run", "--preset", "nope"]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text('preset = "fig10_parallel"\n[system.crystal]\nthickness = "-1 mm"\n')
    assert main(["run", str(bad)]) == 2
    assert "system.crystal.thickness" in capsys.readouterr().err
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(small_config(tmp_path)), "--out", str(blocker / "sub")]) == 3


def test_round_trip(tmp_path):
    first = tmp_path / "a"
    assert main(["run", str(small_config(tmp_path)), "--out", str(first)]) == 0
    echoed = read_config_text(first / "small.csv")
    tomli.loads(echoed)
    again = tmp_path / "again.toml"
    again.write_text(echoed)
    second = tmp_path / "b"
    assert main(["run", str(again), "--out", str(second)]) == 0
    assert (first / "small.csv").read_bytes() == (second / "small.csv").read_bytes()


def test_preset_fig8(tmp_path):
    paths, _ = execute(load_preset("fig8"), tmp_path)
    csvs = sorted(p.name for p in paths if p.suffix == ".csv")
    assert len(csvs) == 6
    par = np.array(rows(tmp_path / "fig8_parallel_L5.0mm.csv")[1:], dtype=float)
    anti = np.array(rows(tmp_path / "fig8_antiparallel_L5.0mm.csv")[1:], dtype=float)
    assert np.all(np.abs(par[:, 1]) < np.abs(anti[:, 1]))


def test_state_preset(tmp_path):
    paths, summary = execute(load_preset("fig1a"), tmp_path)
    data = np.array(rows(paths[0])[1:], dtype=float)
    np.testing.assert_allclose(data[:, 3], data[:, 1] ** 2 + data[:, 2] ** 2, rtol=1e-14)
    assert rows(paths[0])[0] == ["delta", "re", "im", "magnitude_sq"]


def test_tau_sweep_header(tmp_path):
    p = small_config(tmp_path, steps=5)
    tree = tomli.loads(p.read_text())
    tree["sweep"] = {"variable": "tau", "start": "-0.5 LD", "stop": "2.5 LD", "steps": 7}
    p.write_bytes(tomli_w.dumps(tree).encode())
    paths, _ = execute(load_config(p), tmp_path)
    text = paths[0].read_text()
    assert "# R0: " in text and "# v_pol: -1" in text
    data = np.array(rows(paths[0])[1:], dtype=float)
    assert data[0, 1] == 0.0 and data[-1, 1] == 0.0


def test_workers_env(monkeypatch, tmp_path):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert workers_from_env() == 3
    monkeypatch.setenv(WORKERS_ENV, "zero")
    with pytest.raises(ValueError):
        workers_from_env()
    monkeypatch.delenv(WORKERS_ENV)
    assert workers_from_env() == 1
    run = load_config(small_config(tmp_path))
    execute(run, tmp_path / "one", workers=1)
    execute(run, tmp_path / "four", workers=4)
    assert (tmp_path / "one" / "small.csv").read_bytes() == (tmp_path / "four" / "small.csv").read_bytes()
