"""Unit-suffixed quantity parsing for configuration files.

Every physical quantity in a config is a string such as ``"0.5 mm"`` or
``"351.1 nm"``; it is converted to SI on ingestion. Bare numbers are rejected
for dimensional fields.
"""

import math
import re

LENGTH = "length"
TIME = "time"
WAVENUMBER = "wavenumber"
DISPERSION = "dispersion"
ANGLE = "angle"

UNITS = {
    LENGTH: {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    TIME: {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    WAVENUMBER: {
        "rad/m": 1.0, "1/m": 1.0,
        "rad/mm": 1e3, "1/mm": 1e3,
        "rad/um": 1e6, "1/um": 1e6,
    },
    DISPERSION: {
        "s/m": 1.0, "ps/m": 1e-12,
        "ps/mm": 1e-9, "fs/mm": 1e-12, "fs/um": 1e-9,
    },
    ANGLE: {"rad": 1.0, "deg": math.pi / 180.0},
}

_QUANTITY = re.compile(
    r"^\s*(?P<value>[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)\s*(?P<unit>\S+)\s*$"
)


class UnitError(ValueError):
    pass


def split_quantity(text):
    """Split ``"0.5 mm"`` into ``(0.5, "mm")``."""
    if isinstance(text, bool) or isinstance(text, (int, float)):
        raise UnitError(f"missing unit suffix on {text!r}")
    if not isinstance(text, str):
        raise UnitError(f"expected a quantity string, got {type(text).__name__}")
    match = _QUANTITY.match(text)
    if not match:
        raise UnitError(f"cannot parse quantity {text!r} (expected e.g. '0.5 mm')")
    return float(match["value"]), match["unit"]


def parse_quantity(text, kind):
    """Parse a unit-suffixed string into SI units of the given kind."""
    value, unit = split_quantity(text)
    table = UNITS[kind]
    if unit not in table:
        allowed = ", ".join(table)
        raise UnitError(f"unit {unit!r} is not a {kind} unit (allowed: {allowed})")
    return value * table[unit]
