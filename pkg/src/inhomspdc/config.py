"""Run configuration: TOML ingestion, preset merging and validation.

A config is a TOML document. Physical quantities are strings carrying a unit
suffix (``"0.5 mm"``); dimensionless fields take plain numbers. A config may
name a shipped preset with ``preset = "<name>"``; its own keys then override
the preset's tables key by key.

Validation collects every violation as ``"<dotted.path>: <message>"`` rather
than stopping at the first one.
"""

from copy import deepcopy
from dataclasses import dataclass, field
from importlib import resources
import math
from pathlib import Path

import numpy as np
import tomli
import tomli_w

from . import units
from .apertures import (CircularAperture, DeltaAperture, GaussianAperture,
                        OpticalGeometry)
from .dispersion import (AIR_INDEX_DIFFERENCE, CrystalSpec, GapSpec,
                         PumpSpec)
from .errors import ConfigurationError
from .interference import (ANALYZER_PRESETS, CENTER_FORMS, AnalyzerSpec,
                           TwoCrystalSystem)
from .nonlinearity import (DEFAULT_M_MAX, Bulk, Cascade, FourierPeriodic,
                           Sinusoidal)
from .oracle import SCHEMES, QuadratureSpec

TWO_CRYSTAL = "two_crystal"
STATE_FUNCTION = "state_function"

SWEEP_KINDS = {
    "tau": units.TIME,
    "d": units.LENGTH,
    "aperture_b": units.LENGTH,
    "r": units.LENGTH,
    "delta": units.WAVENUMBER,
}

TOP_KEYS = {"name", "preset", "preset_version", "description", "system",
            "sweep", "series", "quadrature", "output"}


class ConfigDiagnostics(ConfigurationError):
    """Raised with the full list of violations found in a config."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: str
    stop: str
    steps: int
    evaluate: str = "center"
    form: str = "auto"
    magnitude: bool = False

    def grid(self, system=None):
        """Sweep abscissa in SI units; ``LD`` delays need the system."""
        lo = _sweep_value(self.start, self.variable, system)
        hi = _sweep_value(self.stop, self.variable, system)
        return np.linspace(lo, hi, self.steps)


@dataclass(frozen=True)
class Series:
    label: str
    system: object
    analyzers: AnalyzerSpec = None


@dataclass(frozen=True)
class RunConfig:
    name: str
    model: str
    series: tuple
    sweep: SweepSpec
    quadrature_order: int = 64
    quadrature: QuadratureSpec = QuadratureSpec()
    csv_path: str = None
    svg_path: str = None
    resolved: dict = field(default_factory=dict, compare=False)

    def echo(self):
        """Canonical TOML text of the resolved config (output table excluded)."""
        return tomli_w.dumps(_sorted(self.resolved))


def _sorted(obj):
    if isinstance(obj, dict):
        return {k: _sorted(obj[k]) for k in sorted(obj)}
    if isinstance(obj, list):
        return [_sorted(v) for v in obj]
    return obj


def _sweep_value(text, variable, system):
    value, unit = units.split_quantity(text)
    if variable == "tau" and unit == "LD":
        if system is None:
            raise ConfigurationError("an LD-relative delay needs a system")
        return value * system.window_delay
    return units.parse_quantity(text, SWEEP_KINDS[variable])


# ---------------------------------------------------------------- presets

def preset_names():
    files = resources.files("inhomspdc.presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".toml"))


def load_preset_dict(name):
    if name not in preset_names():
        raise ConfigDiagnostics([f"preset: unknown preset {name!r}"])
    text = resources.files("inhomspdc.presets").joinpath(f"{name}.toml").read_text()
    return tomli.loads(text)


def preset_description(name):
    return load_preset_dict(name).get("description", "")


def _merge(base, over):
    out = deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = deepcopy(value)
    return out


def resolve(raw, default_name):
    """Apply the named preset, if any. Returns (resolved, output table)."""
    raw = dict(raw)
    name = raw.get("preset")
    if name is not None:
        if not isinstance(name, str):
            raise ConfigDiagnostics(["preset: must be a string"])
        merged = _merge(load_preset_dict(name), {k: v for k, v in raw.items()
                                                  if k != "preset"})
        merged.setdefault("name", name)
    else:
        merged = raw
    merged.setdefault("name", default_name)
    merged.pop("preset_version", None)
    merged.pop("preset", None)
    output = merged.pop("output", {})
    return merged, output


# ---------------------------------------------------------------- reader

_MISSING = object()


class _Reader:
    def __init__(self):
        self.errors = []

    def error(self, path, message):
        self.errors.append(f"{path}: {message}")

    def table(self, parent, key, path, required=True):
        value = parent.get(key, _MISSING)
        if value is _MISSING:
            if required:
                self.error(path, "missing table")
            return {} if not required else None
        if not isinstance(value, dict):
            self.error(path, "must be a table")
            return None
        return value

    def unknown(self, tbl, allowed, path):
        for key in tbl:
            if key not in allowed:
                self.error(f"{path}.{key}" if path else key, "unknown key")

    def quantity(self, tbl, key, kind, path, required=True, default=None,
                 check=None):
        where = f"{path}.{key}"
        raw = tbl.get(key, _MISSING)
        if raw is _MISSING:
            if required:
                self.error(where, "missing")
                return None
            return default
        try:
            value = units.parse_quantity(raw, kind)
        except units.UnitError as exc:
            self.error(where, str(exc))
            return None
        return self._check(value, check, where)

    def number(self, tbl, key, path, required=True, default=None, check=None):
        where = f"{path}.{key}"
        raw = tbl.get(key, _MISSING)
        if raw is _MISSING:
            if required:
                self.error(where, "missing")
                return None
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self.error(where, "must be a plain number")
            return None
        return self._check(float(raw), check, where)

    def integer(self, tbl, key, path, required=True, default=None, minimum=None):
        where = f"{path}.{key}"
        raw = tbl.get(key, _MISSING)
        if raw is _MISSING:
            if required:
                self.error(where, "missing")
                return None
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.error(where, "must be an integer")
            return None
        if minimum is not None and raw < minimum:
            self.error(where, f"must be at least {minimum}")
            return None
        return raw

    def choice(self, tbl, key, choices, path, required=True, default=None):
        where = f"{path}.{key}"
        raw = tbl.get(key, _MISSING)
        if raw is _MISSING:
            if required:
                self.error(where, "missing")
                return None
            return default
        if raw not in choices:
            self.error(where, f"must be one of {', '.join(map(str, choices))}")
            return None
        return raw

    def _check(self, value, check, where):
        if check == "positive" and not value > 0:
            self.error(where, "must be positive")
            return None
        if check == "nonneg" and not value >= 0:
            self.error(where, "must be non-negative")
            return None
        if check == "nonzero" and value == 0:
            self.error(where, "must be non-zero")
            return None
        if not math.isfinite(value):
            self.error(where, "must be finite")
            return None
        return value

    def build(self, path, factory, *args, **kwargs):
        if any(a is None for a in args) or any(v is None for v in kwargs.values()):
            return None
        try:
            return factory(*args, **kwargs)
        except (ConfigurationError, ValueError) as exc:
            self.error(path, str(exc))
            return None


# ------------------------------------------------------------ two crystals

def _walkoff(rd, tbl, path):
    raw = tbl.get("walkoff", 0.0)
    where = f"{path}.walkoff"
    if isinstance(raw, bool):
        rd.error(where, "must be a number or a pair of numbers")
        return None
    if isinstance(raw, (int, float)):
        if raw < 0:
            rd.error(where, "magnitude must be non-negative")
            return None
        return (float(raw), 0.0)
    if (isinstance(raw, list) and len(raw) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)):
        return (float(raw[0]), float(raw[1]))
    rd.error(where, "must be a number or a pair of numbers")
    return None


def _gap(rd, tbl, path, pump):
    rd.unknown(tbl, {"length", "medium", "delta_prime", "index_difference",
                     "index_pump", "index_degenerate"}, path)
    length = rd.quantity(tbl, "length", units.LENGTH, path, required=False,
                         default=0.0, check="nonneg")
    given = [k for k in ("delta_prime", "index_difference", "index_pump")
             if k in tbl]
    if "medium" in tbl:
        rd.choice(tbl, "medium", ("air",), path)
        if given:
            rd.error(path, "give either medium or an explicit dispersion, not both")
            return None
    if len(given) > 1:
        rd.error(path, f"conflicting gap dispersion keys: {', '.join(given)}")
        return None
    if "delta_prime" in tbl:
        dprime = rd.quantity(tbl, "delta_prime", units.WAVENUMBER, path)
    else:
        if "index_pump" in tbl or "index_degenerate" in tbl:
            n_p = rd.number(tbl, "index_pump", path)
            n_d = rd.number(tbl, "index_degenerate", path)
            diff = None if n_p is None or n_d is None else n_p - n_d
        else:
            diff = rd.number(tbl, "index_difference", path, required=False,
                             default=AIR_INDEX_DIFFERENCE)
        dprime = None if diff is None or pump is None else pump.k_p * diff
    return rd.build(path, GapSpec, length, dprime)


def _aperture(rd, tbl, path):
    model = rd.choice(tbl, "model", ("delta", "gaussian", "circular"), path)
    if model == "delta":
        rd.unknown(tbl, {"model"}, path)
        return DeltaAperture()
    if model == "gaussian":
        rd.unknown(tbl, {"model", "radius", "radius_a", "radius_b"}, path)
        keys = ("radius", "radius_a", "radius_b")
        factory = GaussianAperture
    elif model == "circular":
        rd.unknown(tbl, {"model", "diameter", "diameter_a", "diameter_b"}, path)
        keys = ("diameter", "diameter_a", "diameter_b")
        factory = CircularAperture
    else:
        return None
    both, a_key, b_key = keys
    if both in tbl:
        if a_key in tbl or b_key in tbl:
            rd.error(path, f"give {both} or {a_key}/{b_key}, not both")
            return None
        v = rd.quantity(tbl, both, units.LENGTH, path, check="positive")
        return rd.build(path, factory, v, v)
    va = rd.quantity(tbl, a_key, units.LENGTH, path, check="positive")
    vb = rd.quantity(tbl, b_key, units.LENGTH, path, check="positive")
    return rd.build(path, factory, va, vb)


def _analyzers(rd, tbl, path):
    if tbl is None:
        return None
    rd.unknown(tbl, {"preset", "mu_AoBe", "mu_BoAe", "theta_A", "theta_B"}, path)
    if "preset" in tbl:
        if len(tbl) > 1:
            rd.error(path, "a named analyzer preset excludes explicit settings")
            return None
        name = rd.choice(tbl, "preset", tuple(ANALYZER_PRESETS), path)
        return ANALYZER_PRESETS.get(name)
    if "theta_A" in tbl or "theta_B" in tbl:
        ta = rd.quantity(tbl, "theta_A", units.ANGLE, path)
        tb = rd.quantity(tbl, "theta_B", units.ANGLE, path)
        return rd.build(path, AnalyzerSpec.from_angles, ta, tb)
    a = rd.number(tbl, "mu_AoBe", path)
    b = rd.number(tbl, "mu_BoAe", path)
    spec = rd.build(path, AnalyzerSpec, a, b)
    if spec is not None and a == 0 and b == 0:
        rd.error(path, "both analyzer projections are zero")
        return None
    return spec


def _two_crystal(rd, sys_tbl, path):
    rd.unknown(sys_tbl, {"model", "pump_wavelength", "axes", "crystal", "gap",
                         "geometry", "aperture", "analyzers"}, path)
    wl = rd.quantity(sys_tbl, "pump_wavelength", units.LENGTH, path, check="positive")
    pump = rd.build(f"{path}.pump_wavelength", PumpSpec, wl)
    axes = rd.choice(sys_tbl, "axes", ("parallel", "antiparallel"), path)

    crystal = None
    ctbl = rd.table(sys_tbl, "crystal", f"{path}.crystal")
    if ctbl is not None:
        cp = f"{path}.crystal"
        rd.unknown(ctbl, {"thickness", "dispersion", "walkoff", "chi0"}, cp)
        crystal = rd.build(
            cp, CrystalSpec,
            rd.quantity(ctbl, "thickness", units.LENGTH, cp, check="positive"),
            rd.quantity(ctbl, "dispersion", units.DISPERSION, cp, check="nonzero"),
            _walkoff(rd, ctbl, cp),
            rd.number(ctbl, "chi0", cp, required=False, default=1.0, check="positive"))

    gtbl = rd.table(sys_tbl, "gap", f"{path}.gap", required=False)
    gap = _gap(rd, gtbl, f"{path}.gap", pump) if gtbl is not None else None

    geometry = None
    otbl = rd.table(sys_tbl, "geometry", f"{path}.geometry")
    if otbl is not None:
        op = f"{path}.geometry"
        rd.unknown(otbl, {"d1", "d2", "f"}, op)
        d1 = rd.quantity(otbl, "d1", units.LENGTH, op, check="positive")
        d2 = rd.quantity(otbl, "d2", units.LENGTH, op, required=False, check="positive")
        f = rd.quantity(otbl, "f", units.LENGTH, op, required=False, check="positive")
        bad_optional = ("d2" in otbl and d2 is None) or ("f" in otbl and f is None)
        if d1 is not None and not bad_optional:
            geometry = OpticalGeometry(d1, d2, f)

    atbl = rd.table(sys_tbl, "aperture", f"{path}.aperture")
    aperture = _aperture(rd, atbl, f"{path}.aperture") if atbl is not None else None

    antbl = rd.table(sys_tbl, "analyzers", f"{path}.analyzers", required=False)
    analyzers = _analyzers(rd, antbl, f"{path}.analyzers") if antbl else \
        ANALYZER_PRESETS["paper-45-45"]

    system = rd.build(path, TwoCrystalSystem.from_crystal, crystal, axes, gap,
                      geometry, aperture, pump)
    return system, analyzers


# ---------------------------------------------------------- state function

def _profile_crystal(rd, tbl, path):
    rd.unknown(tbl, {"thickness", "chi0", "epsilon"}, path)
    eps = rd.integer(tbl, "epsilon", path, required=False, default=1)
    if eps not in (None, 1, -1):
        rd.error(f"{path}.epsilon", "must be +1 or -1")
        eps = None
    return rd.build(path, CrystalSpec,
                    rd.quantity(tbl, "thickness", units.LENGTH, path, check="positive"),
                    1.0, (0.0, 0.0),
                    rd.number(tbl, "chi0", path, required=False, default=1.0),
                    eps)


def _profile(rd, sys_tbl, path):
    rd.unknown(sys_tbl, {"model", "pump_wavelength", "profile"}, path)
    wl = rd.quantity(sys_tbl, "pump_wavelength", units.LENGTH, path,
                     required=False, check="positive")
    pump = rd.build(f"{path}.pump_wavelength", PumpSpec, wl) if wl else None
    pp = f"{path}.profile"
    tbl = rd.table(sys_tbl, "profile", pp)
    if tbl is None:
        return None
    kind = rd.choice(tbl, "kind", ("bulk", "sinusoidal", "fourier_periodic",
                                   "cascade"), pp)
    if kind == "bulk":
        rd.unknown(tbl, {"kind", "thickness", "chi0"}, pp)
        return rd.build(pp, Bulk,
                        rd.quantity(tbl, "thickness", units.LENGTH, pp, check="positive"),
                        rd.number(tbl, "chi0", pp, required=False, default=1.0))
    if kind == "sinusoidal":
        rd.unknown(tbl, {"kind", "thickness", "period", "chi0"}, pp)
        return rd.build(pp, Sinusoidal,
                        rd.quantity(tbl, "thickness", units.LENGTH, pp, check="positive"),
                        rd.quantity(tbl, "period", units.LENGTH, pp, check="positive"),
                        rd.number(tbl, "chi0", pp, required=False, default=1.0))
    if kind == "fourier_periodic":
        return _fourier(rd, tbl, pp)
    if kind == "cascade":
        return _cascade(rd, tbl, pp, pump, path)
    return None


def _fourier(rd, tbl, pp):
    rd.unknown(tbl, {"kind", "thickness", "period", "chi0", "poling", "duty",
                     "m_max", "coefficients"}, pp)
    L = rd.quantity(tbl, "thickness", units.LENGTH, pp, check="positive")
    period = rd.quantity(tbl, "period", units.LENGTH, pp, check="positive")
    chi0 = rd.number(tbl, "chi0", pp, required=False, default=1.0)
    if "coefficients" in tbl:
        if "poling" in tbl:
            rd.error(pp, "give coefficients or poling, not both")
            return None
        raw = tbl["coefficients"]
        mapping = {}
        ok = isinstance(raw, list) and raw
        for i, entry in enumerate(raw if isinstance(raw, list) else []):
            if (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[0], int)
                    and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                            for v in entry[1:])):
                mapping[entry[0]] = complex(entry[1], entry[2])
            else:
                rd.error(f"{pp}.coefficients[{i}]", "must be [m, re, im]")
                ok = False
        if not ok:
            if not raw:
                rd.error(f"{pp}.coefficients", "must be a non-empty list")
            return None
        if L is None or period is None or chi0 is None:
            return None
        return rd.build(pp, FourierPeriodic.from_orders, L, period, mapping, chi0)
    rd.choice(tbl, "poling", ("square",), pp)
    duty = rd.number(tbl, "duty", pp, required=False, default=0.5)
    m_max = rd.integer(tbl, "m_max", pp, required=False, default=DEFAULT_M_MAX, minimum=0)
    return rd.build(pp, FourierPeriodic.square_wave, L, period, duty, m_max, chi0)


def _cascade(rd, tbl, pp, pump, path):
    rd.unknown(tbl, {"kind", "crystals", "gaps"}, pp)
    crystals = tbl.get("crystals")
    if not isinstance(crystals, list) or not crystals \
            or not all(isinstance(c, dict) for c in crystals):
        rd.error(f"{pp}.crystals", "must be a non-empty array of tables")
        return None
    gaps = tbl.get("gaps", [])
    if not isinstance(gaps, list) or not all(isinstance(g, dict) for g in gaps):
        rd.error(f"{pp}.gaps", "must be an array of tables")
        return None
    built_c = [_profile_crystal(rd, c, f"{pp}.crystals[{i}]") for i, c in enumerate(crystals)]
    built_g = []
    for i, g in enumerate(gaps):
        gp = f"{pp}.gaps[{i}]"
        uses_pump = not ("delta_prime" in g)
        if uses_pump and pump is None:
            rd.error(gp, f"needs delta_prime or {path}.pump_wavelength")
            built_g.append(None)
            continue
        built_g.append(_gap(rd, g, gp, pump))
    if len(gaps) != len(crystals) - 1:
        rd.error(f"{pp}.gaps", f"expected {len(crystals) - 1} gaps for "
                 f"{len(crystals)} crystals, got {len(gaps)}")
        return None
    if any(c is None for c in built_c) or any(g is None for g in built_g):
        return None
    return rd.build(pp, Cascade, tuple(built_c), tuple(built_g))


# ------------------------------------------------------------------ sweep

def _sweep(rd, tbl, model):
    if tbl is None:
        return None
    rd.unknown(tbl, {"variable", "start", "stop", "steps", "evaluate", "form",
                     "magnitude"}, "sweep")
    allowed = ("delta",) if model == STATE_FUNCTION else ("tau", "d", "aperture_b", "r")
    variable = rd.choice(tbl, "variable", allowed, "sweep")
    steps = rd.integer(tbl, "steps", "sweep", minimum=2)
    evaluate = rd.choice(tbl, "evaluate", ("center", "general"), "sweep",
                         required=False, default="center")
    form = rd.choice(tbl, "form", CENTER_FORMS, "sweep", required=False, default="auto")
    magnitude = tbl.get("magnitude", False)
    if not isinstance(magnitude, bool):
        rd.error("sweep.magnitude", "must be true or false")
    ends = {}
    for key in ("start", "stop"):
        raw = tbl.get(key, _MISSING)
        if raw is _MISSING:
            rd.error(f"sweep.{key}", "missing")
            continue
        if variable is None:
            continue
        try:
            value, unit = units.split_quantity(raw)
            if variable == "tau" and unit == "LD":
                ends[key] = (value, "LD")
            else:
                ends[key] = (units.parse_quantity(raw, SWEEP_KINDS[variable]), "si")
        except units.UnitError as exc:
            rd.error(f"sweep.{key}", str(exc))
    if len(ends) == 2:
        (a, ua), (b, ub) = ends["start"], ends["stop"]
        if ua != ub:
            rd.error("sweep", "start and stop must use compatible units")
        elif not a < b:
            rd.error("sweep", "start must be less than stop")
        elif variable in ("d",) and a < 0:
            rd.error("sweep.start", "gap length must be non-negative")
        elif variable in ("r", "aperture_b") and a <= 0:
            rd.error("sweep.start", "aperture size must be positive")
    if None in (variable, steps, evaluate, form) or len(ends) < 2 \
            or not isinstance(magnitude, bool):
        return None
    return SweepSpec(variable, tbl["start"], tbl["stop"], steps, evaluate, form,
                     magnitude)


def _quadrature(rd, tbl):
    if tbl is None:
        return 64, QuadratureSpec()
    rd.unknown(tbl, {"order", "scheme", "points_per_axis", "domain_halfwidth",
                     "target_rel_err"}, "quadrature")
    order = rd.integer(tbl, "order", "quadrature", required=False, default=64, minimum=8)
    defaults = QuadratureSpec()
    scheme = rd.choice(tbl, "scheme", SCHEMES, "quadrature", required=False,
                       default=defaults.scheme)
    ppa = rd.integer(tbl, "points_per_axis", "quadrature", required=False,
                     default=defaults.points_per_axis, minimum=16)
    half = rd.number(tbl, "domain_halfwidth", "quadrature", required=False,
                     default=defaults.domain_halfwidth, check="positive")
    target = rd.number(tbl, "target_rel_err", "quadrature", required=False,
                       default=defaults.target_rel_err, check="positive")
    spec = rd.build("quadrature", QuadratureSpec, scheme, ppa, half, target)
    return order, spec


def _set_path(tree, dotted, value):
    keys = dotted.split(".")
    node = tree
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def _series_tables(rd, resolved):
    raw = resolved.get("series")
    system = resolved.get("system", {})
    if raw is None:
        return [("", system)]
    if not isinstance(raw, list) or not raw:
        rd.error("series", "must be a non-empty array of tables")
        return []
    out = []
    labels = set()
    for i, entry in enumerate(raw):
        path = f"series[{i}]"
        if not isinstance(entry, dict):
            rd.error(path, "must be a table")
            continue
        rd.unknown(entry, {"label", "set"}, path)
        label = entry.get("label")
        if not isinstance(label, str) or not label:
            rd.error(f"{path}.label", "must be a non-empty string")
            continue
        if not all(ch.isalnum() or ch in "-_." for ch in label):
            rd.error(f"{path}.label", "use only letters, digits, '-', '_' and '.'")
            continue
        if label in labels:
            rd.error(f"{path}.label", f"duplicate label {label!r}")
        labels.add(label)
        overrides = entry.get("set", {})
        if not isinstance(overrides, dict):
            rd.error(f"{path}.set", "must be a table of dotted system paths")
            continue
        tree = deepcopy(system)
        for key, value in overrides.items():
            _set_path(tree, key, value)
        out.append((label, tree))
    return out


def parse_run_config(raw, default_name="run"):
    """Build a RunConfig from a parsed TOML tree, or raise ConfigDiagnostics."""
    if not isinstance(raw, dict):
        raise ConfigDiagnostics(["config: must be a table"])
    resolved, output = resolve(raw, default_name)
    rd = _Reader()
    rd.unknown(resolved, TOP_KEYS, "")
    name = resolved.get("name")
    if not isinstance(name, str) or not name:
        rd.error("name", "must be a non-empty string")

    sys_tbl = rd.table(resolved, "system", "system")
    model = None
    if sys_tbl is not None:
        model = rd.choice(sys_tbl, "model", (TWO_CRYSTAL, STATE_FUNCTION), "system")

    series = []
    for label, tree in _series_tables(rd, resolved) if sys_tbl is not None else []:
        prefix = f"series[{label}].system" if label else "system"
        n_before = len(rd.errors)
        if model == TWO_CRYSTAL:
            system, analyzers = _two_crystal(rd, tree, prefix)
        elif model == STATE_FUNCTION:
            system, analyzers = _profile(rd, tree, prefix), None
        else:
            continue
        if system is None and len(rd.errors) == n_before:
            rd.error(prefix, "could not build system")
        series.append(Series(label, system, analyzers))

    sweep = _sweep(rd, rd.table(resolved, "sweep", "sweep"), model)
    order, quad = _quadrature(rd, resolved.get("quadrature"))

    csv_path = svg_path = None
    if not isinstance(output, dict):
        rd.error("output", "must be a table")
    else:
        rd.unknown(output, {"csv", "svg"}, "output")
        csv_path = output.get("csv")
        if csv_path is not None and not isinstance(csv_path, str):
            rd.error("output.csv", "must be a path string")
        svg = output.get("svg")
        if isinstance(svg, bool):
            svg_path = f"{name}.svg" if svg and isinstance(name, str) else None
        elif isinstance(svg, str):
            svg_path = svg
        elif svg is not None:
            rd.error("output.svg", "must be a path string or a boolean")

    if rd.errors:
        raise ConfigDiagnostics(rd.errors)
    return RunConfig(name, model, tuple(series), sweep, order, quad,
                     csv_path, svg_path, resolved)


def read_toml(path):
    with open(path, "rb") as fh:
        return tomli.load(fh)


def load_config(path):
    path = Path(path)
    try:
        raw = read_toml(path)
    except tomli.TOMLDecodeError as exc:
        raise ConfigDiagnostics([f"config: TOML syntax error: {exc}"]) from None
    return parse_run_config(raw, default_name=path.stem)


def load_preset(name):
    return parse_run_config({"preset": name}, default_name=name)


def validate(path):
    """All violations in the config at ``path``; empty when runnable.

    Raises OSError when the file cannot be read.
    """
    try:
        load_config(path)
    except ConfigDiagnostics as exc:
        return exc.diagnostics
    return []
