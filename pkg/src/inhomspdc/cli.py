"""Command-line entry point.

    inhomspdc run CONFIG [--out DIR]
    inhomspdc run --preset NAME [--out DIR]
    inhomspdc validate CONFIG
    inhomspdc list-presets

The worker count for sweeps comes from the INHOMSPDC_WORKERS environment
variable (default 1). Exit status: 0 success, 2 invalid configuration or
usage, 3 file I/O failure.
"""

import argparse
from dataclasses import replace
import os
from pathlib import Path
import sys

import numpy as np

from . import config as cfgmod
from .errors import ConfigurationError
from .interference import (baseline_rate, v_pol, visibility_vs_aperture,
                           visibility_vs_delay, visibility_vs_separation)
from .nonlinearity import sample_state_function
from .output import (header_lines, write_state_csv, write_svg,
                     write_visibility_csv)

WORKERS_ENV = "INHOMSPDC_WORKERS"
EXIT_CONFIG = 2
EXIT_IO = 3


def workers_from_env():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be at least 1")
    return n


def _series_curve(run, series, workers):
    sweep = run.sweep
    system = series.system
    grid = sweep.grid(system)
    order = run.quadrature_order
    at_center = sweep.evaluate == "center"
    if sweep.variable == "d":
        curve = visibility_vs_separation(system, grid, at_center, sweep.form, order, workers)
    elif sweep.variable in ("r", "aperture_b"):
        curve = visibility_vs_aperture(system, grid, sweep.variable, at_center,
                                       sweep.form, order, workers)
    else:
        curve = visibility_vs_delay(system, grid, order, workers)
    if sweep.magnitude:
        curve = replace(curve, value=np.abs(curve.value))
    return curve


def _paths(run, out_dir, labels):
    csv_name = Path(run.csv_path or f"{run.name}.csv")
    svg_name = Path(run.svg_path) if run.svg_path else None
    if out_dir is not None:
        csv_name = Path(out_dir) / csv_name.name
        svg_name = Path(out_dir) / svg_name.name if svg_name else None
    if len(labels) > 1 or labels[0]:
        csvs = [csv_name.with_name(f"{csv_name.stem}_{lab}{csv_name.suffix}")
                for lab in labels]
    else:
        csvs = [csv_name]
    return csvs, svg_name


def execute(run, out_dir=None, workers=1):
    """Evaluate every series, write the artifacts, return (paths, summary)."""
    labels = [s.label for s in run.series]
    csv_paths, svg_path = _paths(run, out_dir, labels)
    for p in csv_paths + ([svg_path] if svg_path else []):
        p.parent.mkdir(parents=True, exist_ok=True)
    echo = run.echo()
    plotted = []
    values = []
    crossings = 0
    for series, path in zip(run.series, csv_paths):
        extra = [f"sweep: {run.sweep.variable}"]
        if run.model == cfgmod.STATE_FUNCTION:
            grid = run.sweep.grid()
            sample = sample_state_function(series.system, grid[0], grid[-1], grid.size)
            write_state_csv(path, sample, header_lines(run.name, series.label, echo, extra))
            plotted.append((series.label, sample.delta_grid, sample.magnitude_sq))
            values.append(sample.magnitude_sq)
            continue
        extra.append(f"v_pol: {format(v_pol(series.analyzers), '.17g')}")
        if run.sweep.variable == "tau":
            extra.append(f"R0: {format(baseline_rate(series.system), '.17g')}")
        curve = _series_curve(run, series, workers)
        write_visibility_csv(path, curve, header_lines(run.name, series.label, echo, extra))
        plotted.append((series.label, curve.abscissa, curve.value))
        values.append(curve.value)
        crossings += len(curve.zero_crossings())
    if svg_path:
        if run.model == cfgmod.STATE_FUNCTION:
            ylabel = "|chi(Delta)|^2"
        else:
            ylabel = "|V(LD)|" if run.sweep.magnitude else "V"
            if run.sweep.variable == "tau":
                ylabel = "V(tau)"
        write_svg(svg_path, run.name, run.sweep.variable, plotted, ylabel)
    allv = np.concatenate(values)
    n = sum(v.size for v in values)
    if run.model == cfgmod.STATE_FUNCTION:
        summary = (f"{run.name}: {len(values)} series, {n} points, "
                   f"|chi|^2 in [{allv.min():.6g}, {allv.max():.6g}]")
    else:
        summary = (f"{run.name}: {len(values)} series, {n} points, "
                   f"V in [{allv.min():.6g}, {allv.max():.6g}], "
                   f"{crossings} zero crossings")
    return csv_paths + ([svg_path] if svg_path else []), summary


def _cmd_run(args):
    if (args.config is None) == (args.preset is None):
        print("error: give either a config path or --preset NAME", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.preset is not None:
            run = cfgmod.load_preset(args.preset)
        else:
            run = cfgmod.load_config(args.config)
        workers = workers_from_env()
    except cfgmod.ConfigDiagnostics as exc:
        for line in exc.diagnostics:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        paths, summary = execute(run, args.out, workers)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(summary)
    return 0


def _cmd_validate(args):
    try:
        diagnostics = cfgmod.validate(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    for line in diagnostics:
        print(line)
    if diagnostics:
        return EXIT_CONFIG
    print("ok")
    return 0


def _cmd_list(args):
    for name in cfgmod.preset_names():
        print(f"{name}\t{cfgmod.preset_description(name)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="inhomspdc",
        description="Polarization interference of SPDC from cascaded crystals.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate a config or preset and write CSV/SVG")
    run.add_argument("config", nargs="?", help="TOML config file")
    run.add_argument("--preset", help="name of a shipped preset")
    run.add_argument("--out", help="directory for output files")
    run.set_defaults(func=_cmd_run)
    val = sub.add_parser("validate", help="report every problem in a config")
    val.add_argument("config")
    val.set_defaults(func=_cmd_validate)
    lst = sub.add_parser("list-presets", help="list shipped presets")
    lst.set_defaults(func=_cmd_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
