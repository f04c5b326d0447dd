"""Aperture models and the normalized diffraction kernel N(z0, Z, s_k, s_n).

Two closed forms are provided: point-like (delta) pupils and soft Gaussian
pupils. A sharp circular pupil of diameter b is mapped onto a Gaussian of
1/e radius r = b / (2 sqrt 2).

Kernel arguments are 2-vectors; ``z0`` and ``Z`` may also be stacked arrays
of shape ``(..., 2)`` for vectorized evaluation.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._numerics import as_vec2, dot, sqnorm
from .errors import ConfigurationError

#: Relative |s_k - s_n| / s_n below which the equal-distance limit is used.
DEGENERATE_THRESHOLD = 1e-9


@dataclass(frozen=True)
class DeltaAperture:
    """Vanishingly small pupils: only collinear modes reach the detectors."""


@dataclass(frozen=True)
class GaussianAperture:
    r_A: float
    r_B: float = None

    def __post_init__(self):
        if self.r_B is None:
            object.__setattr__(self, "r_B", self.r_A)
        for name in ("r_A", "r_B"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"Gaussian aperture {name} must be positive")

    @property
    def r_squared(self):
        """Mean square radius r^2 = (r_A^2 + r_B^2) / 2."""
        return 0.5 * (self.r_A ** 2 + self.r_B ** 2)

    @property
    def pupil_at_zero(self):
        """Product of both pupil transforms at q = 0 (their areas)."""
        return math.pi * self.r_A ** 2 * math.pi * self.r_B ** 2

    def to_gaussian(self):
        return self


@dataclass(frozen=True)
class CircularAperture:
    b_A: float
    b_B: float = None

    def __post_init__(self):
        if self.b_B is None:
            object.__setattr__(self, "b_B", self.b_A)
        for name in ("b_A", "b_B"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"circular aperture {name} must be positive")

    def to_gaussian(self):
        k = 2.0 * math.sqrt(2.0)
        return GaussianAperture(self.b_A / k, self.b_B / k)

    @property
    def r_squared(self):
        return self.to_gaussian().r_squared

    @property
    def pupil_at_zero(self):
        return self.to_gaussian().pupil_at_zero


def as_gaussian(aperture):
    """Gaussian equivalent of an aperture, or None for delta pupils."""
    if isinstance(aperture, DeltaAperture):
        return None
    if isinstance(aperture, (GaussianAperture, CircularAperture)):
        return aperture.to_gaussian()
    raise ConfigurationError(f"unknown aperture model {type(aperture).__name__}")


@dataclass(frozen=True)
class OpticalGeometry:
    """Distances from the output face of the last crystal.

    ``d2`` and ``f`` are kept for completeness; they cancel from every
    normalized quantity computed here.
    """

    d1: float
    d2: float = None
    f: float = None

    def __post_init__(self):
        if not (self.d1 > 0 and math.isfinite(self.d1)):
            raise ConfigurationError("d1 must be positive")
        for name in ("d2", "f"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"{name} must be positive when given")

    def distances(self, d):
        """Effective distances (s1, s2) = (d1 + d, d1) for a gap of length d."""
        if d < 0:
            raise ConfigurationError("gap length must be non-negative")
        return self.d1 + d, self.d1


@dataclass(frozen=True)
class NKernelArgs:
    z0: tuple
    Z: tuple
    s_k: float
    s_n: float

    def __post_init__(self):
        object.__setattr__(self, "z0", tuple(as_vec2(self.z0, "z0")))
        object.__setattr__(self, "Z", tuple(as_vec2(self.Z, "Z")))
        if not (self.s_k > 0 and self.s_n > 0):
            raise ConfigurationError("s_k and s_n must be positive")


def gamma_factor(pump, aperture, d1, d):
    """Gaussian spatial parameter gamma = k_p r^2 / (4 d1) * d / (d1 + d)."""
    if d1 <= 0 or d < 0:
        raise ConfigurationError("need d1 > 0 and d >= 0")
    g = as_gaussian(aperture)
    if g is None:
        return 0.0
    return pump.k_p * g.r_squared / (4.0 * d1) * d / (d1 + d)


def phi_gamma(pump, aperture, d1, d):
    return -math.atan(gamma_factor(pump, aperture, d1, d))


def _kernel_small(z0, Z, s_k, s_n, k_p):
    z0 = np.asarray(z0, dtype=float)
    Z = np.asarray(Z, dtype=float)
    phase = (k_p / 8.0) * (sqnorm(Z - z0) / s_n - sqnorm(z0) / s_k)
    return np.exp(-1j * phase)


def _kernel_gauss(z0, Z, s_k, s_n, k_p, rA2_plus_rB2):
    z0 = np.asarray(z0, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if abs(s_k - s_n) < DEGENERATE_THRESHOLD * s_n:
        s = s_n
        atten = np.exp(-(k_p / (4.0 * s)) ** 2 * sqnorm(Z) * rA2_plus_rB2 / 4.0)
        return atten * _kernel_small(z0, Z, s, s, k_p)
    # One rounded difference feeds both 1/d_r and the s_k - s_n phase so the
    # large terms cancel consistently near the degenerate limit.
    diff = s_k - s_n
    inv_dr = diff / (s_k * s_n)
    gamma = k_p * inv_dr * rA2_plus_rB2 / 8.0
    g2 = 1.0 + gamma * gamma
    w = z0 - (s_k / diff) * Z
    w2 = sqnorm(w)
    base = k_p * inv_dr / 8.0
    attenuation = np.exp(-base * gamma / g2 * w2)
    quad_phase = -base / g2 * w2
    z_phase = k_p * sqnorm(Z) / (8.0 * diff) - math.atan(gamma)
    return attenuation * np.exp(1j * (quad_phase + z_phase)) / math.sqrt(g2)


def _kernel_unified(z0, Z, s_k, s_n, k_p, rA2_plus_rB2):
    """Completed-square form, regular at s_k = s_n and at zero radius.

    Used to cross-check the two closed-form branches; not on the hot path.
    """
    z0 = np.asarray(z0, dtype=float)
    Z = np.asarray(Z, dtype=float)
    sigma = rA2_plus_rB2 / 4.0
    c = k_p / (4.0 * s_n)
    u = 1.0 / s_n - 1.0 / s_k
    w = z0 + 2j * sigma * c * Z
    lead = -0.5j * c * sqnorm(Z) + 1j * c * dot(Z, z0) - sigma * c * c * sqnorm(Z)
    tail = -k_p * u * dot(w, w) / (4.0 * (k_p * u * sigma - 2j))
    return np.exp(lead + tail) / (1.0 + 0.5j * sigma * k_p * u)


def n_small(args, pump):
    """Kernel for delta pupils; always of unit modulus."""
    return complex(_kernel_small(args.z0, args.Z, args.s_k, args.s_n, pump.k_p))


def n_gauss(args, pump, aperture):
    """Kernel for Gaussian (or circular, via the Gaussian map) pupils."""
    g = as_gaussian(aperture)
    if g is None:
        raise ConfigurationError("n_gauss needs a Gaussian or circular aperture")
    return complex(_kernel_gauss(args.z0, args.Z, args.s_k, args.s_n, pump.k_p,
                                 g.r_A ** 2 + g.r_B ** 2))


def n_function(args, pump, aperture):
    """Kernel matching the aperture model."""
    if isinstance(aperture, DeltaAperture):
        return n_small(args, pump)
    return n_gauss(args, pump, aperture)


def kernel(z0, Z, s_k, s_n, pump, aperture):
    """Vectorized kernel over stacked ``z0``/``Z`` arrays."""
    g = as_gaussian(aperture)
    if g is None:
        return _kernel_small(z0, Z, s_k, s_n, pump.k_p)
    return _kernel_gauss(z0, Z, s_k, s_n, pump.k_p, g.r_A ** 2 + g.r_B ** 2)
