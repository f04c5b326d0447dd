"""Longitudinal nonlinearity profiles and their state functions.

The state function of a monochromatic plane-wave pump is the transform
chi~(Delta) = integral of chi(z) exp(i Delta z) dz. The origin sits on the
output face of the last crystal, so every profile occupies z <= 0.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np

from ._numerics import sinc
from .dispersion import CrystalSpec, GapSpec
from .errors import ConfigurationError

DEFAULT_M_MAX = 16


def _positive(value, name):
    if not (value > 0 and math.isfinite(value)):
        raise ConfigurationError(f"{name} must be positive")


@dataclass(frozen=True)
class Bulk:
    thickness_L: float
    chi0: float = 1.0

    def __post_init__(self):
        _positive(self.thickness_L, "thickness")


@dataclass(frozen=True)
class Sinusoidal:
    """chi(z) = chi0 cos(2 pi z / Lambda) over a crystal of length L."""

    thickness_L: float
    period_Lambda: float
    chi0: float = 1.0

    def __post_init__(self):
        _positive(self.thickness_L, "thickness")
        _positive(self.period_Lambda, "period")


@dataclass(frozen=True)
class FourierPeriodic:
    """Periodic poling given by Fourier coefficients G_m, m in [-m_max, m_max].

    ``coefficients[k]`` holds G_{k - m_max}. ``truncation_error`` is the
    magnitude of the largest coefficient dropped when the series was cut.
    """

    thickness_L: float
    period_Lambda: float
    coefficients: tuple
    chi0: float = 1.0
    truncation_error: float = 0.0

    def __post_init__(self):
        _positive(self.thickness_L, "thickness")
        _positive(self.period_Lambda, "period")
        coeffs = tuple(complex(c) for c in self.coefficients)
        if not coeffs:
            raise ConfigurationError("coefficient list must be non-empty")
        if len(coeffs) % 2 != 1:
            raise ConfigurationError(
                "coefficient list must have odd length (m = -m_max..m_max)")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def m_max(self):
        return (len(self.coefficients) - 1) // 2

    @property
    def orders(self):
        return np.arange(-self.m_max, self.m_max + 1)

    @classmethod
    def from_orders(cls, thickness_L, period_Lambda, mapping, chi0=1.0):
        """Build from a ``{m: G_m}`` mapping; missing orders are zero."""
        m_max = max((abs(int(m)) for m in mapping), default=0)
        coeffs = [0j] * (2 * m_max + 1)
        for m, g in mapping.items():
            coeffs[int(m) + m_max] = complex(g)
        return cls(thickness_L, period_Lambda, tuple(coeffs), chi0)

    @classmethod
    def square_wave(cls, thickness_L, period_Lambda, duty=0.5,
                    m_max=DEFAULT_M_MAX, chi0=1.0):
        """Domain-inverted poling: g = +1 on the first ``duty`` of each
        period and -1 on the rest."""
        if not 0 < duty < 1:
            raise ConfigurationError("duty cycle must lie in (0, 1)")
        if m_max < 0:
            raise ConfigurationError("m_max must be non-negative")

        def coeff(m):
            if m == 0:
                return complex(2 * duty - 1)
            return 2 * (1 - np.exp(-2j * np.pi * m * duty)) / (2j * np.pi * m)

        coeffs = tuple(coeff(m) for m in range(-m_max, m_max + 1))
        dropped = max(abs(coeff(m)) for m in range(m_max + 1, 4 * m_max + 64))
        return cls(thickness_L, period_Lambda, coeffs, chi0, float(dropped))

    def density(self, z):
        """Truncated-series chi(z) on the crystal support, zero outside."""
        z = np.asarray(z, dtype=float)
        k = 2 * np.pi * self.orders / self.period_Lambda
        g = np.exp(1j * np.multiply.outer(z, k)) @ np.array(self.coefficients)
        inside = (z >= -self.thickness_L) & (z <= 0)
        return np.where(inside, self.chi0 * g, 0)


@dataclass(frozen=True)
class Cascade:
    """Crystals in beam order; ``gaps[i]`` separates crystal i and i+1."""

    crystals: tuple
    gaps: tuple = ()

    def __post_init__(self):
        crystals = tuple(self.crystals)
        gaps = tuple(self.gaps)
        if not crystals:
            raise ConfigurationError("cascade needs at least one crystal")
        if len(gaps) != len(crystals) - 1:
            raise ConfigurationError(
                f"cascade of {len(crystals)} crystals needs {len(crystals) - 1} "
                f"gaps, got {len(gaps)}")
        if not all(isinstance(c, CrystalSpec) for c in crystals):
            raise ConfigurationError("cascade crystals must be CrystalSpec")
        if not all(isinstance(g, GapSpec) for g in gaps):
            raise ConfigurationError("cascade gaps must be GapSpec")
        object.__setattr__(self, "crystals", crystals)
        object.__setattr__(self, "gaps", gaps)

    @classmethod
    def from_pairs(cls, pairs):
        """Build from ``(crystal, gap_before)`` pairs; the first gap is ignored."""
        pairs = list(pairs)
        return cls(tuple(c for c, _ in pairs), tuple(g for _, g in pairs[1:]))

    @property
    def total_length(self):
        return sum(c.thickness_L for c in self.crystals) + sum(
            g.length_d for g in self.gaps)


def chi_tilde_bulk(delta, L, chi0=1.0):
    """chi0 L sinc(L Delta/2) exp(-i L Delta/2)."""
    _positive(L, "thickness")
    half = 0.5 * L * np.asarray(delta, dtype=float)
    out = chi0 * L * sinc(half) * np.exp(-1j * half)
    return out if np.ndim(out) else complex(out)


def chi_tilde_periodic(delta, profile):
    delta = np.asarray(delta, dtype=float)
    k = 2 * np.pi * profile.orders / profile.period_Lambda
    shifted = 0.5 * profile.thickness_L * (delta[..., None] + k)
    terms = sinc(shifted) * np.exp(-1j * shifted)
    out = profile.chi0 * profile.thickness_L * (terms @ np.array(profile.coefficients))
    return out if out.ndim else complex(out)


def chi_tilde_sinusoidal(delta, L, Lambda, chi0=1.0):
    """State function of chi0 cos(2 pi z / Lambda).

    The cosine splits into two harmonics of weight 1/2 each, at
    Delta = +-2 pi / Lambda.
    """
    _positive(L, "thickness")
    _positive(Lambda, "period")
    delta = np.asarray(delta, dtype=float)
    k = 2 * np.pi / Lambda
    out = 0.5 * (chi_tilde_bulk(delta + k, L, chi0) + chi_tilde_bulk(delta - k, L, chi0))
    return out if np.ndim(out) else complex(out)


def chi_tilde_cascade(delta, cascade, delta_prime_per_gap=None):
    """Sum of crystal terms, each delayed by everything downstream of it.

    Crystal j picks up exp(-i sum_{k>j} (L_k Delta + d_k Delta'_k)), where
    d_k is the gap in front of crystal k. ``delta_prime_per_gap`` overrides
    the mismatch stored on each gap.
    """
    if delta_prime_per_gap is None:
        dprime = [g.delta_prime for g in cascade.gaps]
    else:
        dprime = list(delta_prime_per_gap)
        if len(dprime) != len(cascade.gaps):
            raise ConfigurationError(
                f"expected {len(cascade.gaps)} gap mismatches, got {len(dprime)}")
    delta = np.asarray(delta, dtype=float)
    total = np.zeros(delta.shape, dtype=complex)
    offset = np.zeros(delta.shape)
    crystals = cascade.crystals
    for j in range(len(crystals) - 1, -1, -1):
        c = crystals[j]
        total = total + chi_tilde_bulk(delta, c.thickness_L, c.signed_chi0) \
            * np.exp(-1j * offset)
        if j > 0:
            offset = offset + c.thickness_L * delta + cascade.gaps[j - 1].length_d * dprime[j - 1]
    return total if total.ndim else complex(total)


def chi_tilde(delta, profile):
    """Dispatch to the closed form for the profile's variant."""
    if isinstance(profile, Bulk):
        return chi_tilde_bulk(delta, profile.thickness_L, profile.chi0)
    if isinstance(profile, Sinusoidal):
        return chi_tilde_sinusoidal(delta, profile.thickness_L,
                                    profile.period_Lambda, profile.chi0)
    if isinstance(profile, FourierPeriodic):
        return chi_tilde_periodic(delta, profile)
    if isinstance(profile, Cascade):
        return chi_tilde_cascade(delta, profile)
    raise ConfigurationError(f"unknown profile type {type(profile).__name__}")


@dataclass(frozen=True)
class StateFunctionSample:
    delta_grid: np.ndarray
    amplitude: np.ndarray
    magnitude_sq: np.ndarray

    def rows(self):
        for d, a, m in zip(self.delta_grid, self.amplitude, self.magnitude_sq):
            yield d, a.real, a.imag, m

    def write_csv(self, stream, header_lines=()):
        for line in header_lines:
            stream.write(f"# {line}\n" if line else "#\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["delta", "re", "im", "magnitude_sq"])
        for row in self.rows():
            writer.writerow([format(float(v), ".17g") for v in row])


def sample_state_function(profile, delta_min, delta_max, n_points):
    n_points = int(n_points)
    if n_points < 2:
        raise ConfigurationError("n_points must be at least 2")
    if not delta_min < delta_max:
        raise ConfigurationError("delta_min must be less than delta_max")
    grid = np.linspace(delta_min, delta_max, n_points)
    amp = np.asarray(chi_tilde(grid, profile), dtype=complex)
    return StateFunctionSample(grid, amp, amp.real ** 2 + amp.imag ** 2)
