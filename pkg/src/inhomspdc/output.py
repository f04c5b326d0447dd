"""CSV and SVG writers for sweep results.

CSV files use 17 significant digits, "\\n" line endings and a "#"-prefixed
header that embeds the resolved run configuration between ``# config:`` and
``# end config`` markers, so any result file can be re-run verbatim.
"""

import csv
import io

import numpy as np

from . import __version__

CONFIG_BEGIN = "config:"
CONFIG_END = "end config"


def _fmt(value):
    return format(float(value), ".17g")


def header_lines(name, series_label, config_text, extra=()):
    lines = [f"inhomspdc {__version__}", f"name: {name}"]
    if series_label:
        lines.append(f"series: {series_label}")
    lines.extend(extra)
    lines.append(CONFIG_BEGIN)
    lines.extend(config_text.rstrip("\n").split("\n"))
    lines.append(CONFIG_END)
    return lines


def _write(path, header, columns, rows):
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n" if line else "#\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def write_visibility_csv(path, curve, header):
    rows = zip(curve.abscissa, curve.value, curve.phi_disp, curve.phi_gamma)
    _write(path, header, ["abscissa", "V", "phi_disp", "phi_gamma"], rows)


def write_state_csv(path, sample, header):
    _write(path, header, ["delta", "re", "im", "magnitude_sq"], sample.rows())


def read_config_text(path):
    """The config block embedded in a result CSV's header."""
    lines = []
    inside = False
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            text = raw[2:].rstrip("\n") if raw.startswith("# ") else raw[1:].rstrip("\n")
            if text == CONFIG_BEGIN:
                inside = True
            elif text == CONFIG_END:
                inside = False
            elif inside:
                lines.append(text)
    return "\n".join(lines) + "\n"


_AXIS = {
    "d": ("crystal separation d [mm]", 1e3),
    "r": ("Gaussian aperture radius r [mm]", 1e3),
    "aperture_b": ("aperture diameter b [mm]", 1e3),
    "tau": ("delay tau [fs]", 1e15),
    "delta": ("mismatch Delta [rad/mm]", 1e-3),
}


def write_svg(path, title, variable, series, ylabel):
    """Line chart of ``series``: a list of (label, x, y) in SI units."""
    import matplotlib
    matplotlib.use("Agg")
    from matplotlib import pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "inhomspdc"
    xlabel, scale = _AXIS[variable]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, x, y in series:
        ax.plot(np.asarray(x) * scale, y, label=label or None, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if any(label for label, _, _ in series):
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
