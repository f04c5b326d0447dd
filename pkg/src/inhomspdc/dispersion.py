"""Material and geometric parameters plus the mismatch and phase functions.

All quantities are SI: meters, seconds, radians.

The delay-line phase drops the constant ``-(K_o + K_e) l_tau`` term. It is a
global phase common to every amplitude and never affects a rate.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._numerics import as_vec2
from .errors import ConfigurationError

#: Pump wavelength at which the default air index difference is calibrated.
AIR_CALIBRATION_WAVELENGTH = 351.1e-9

#: Measured air-dispersion slope at the calibration wavelength, in units of
#: pi radians per millimeter of gap.
AIR_SLOPE_PI_PER_MM = 0.059

#: n(lambda_p) - n(2 lambda_p) for air, chosen so that k_p * dn * d reproduces
#: the slope above exactly at the calibration wavelength.
AIR_INDEX_DIFFERENCE = AIR_SLOPE_PI_PER_MM * 1e3 * AIR_CALIBRATION_WAVELENGTH / 2.0


@dataclass(frozen=True)
class PumpSpec:
    wavelength_p: float

    def __post_init__(self):
        if not (self.wavelength_p > 0 and math.isfinite(self.wavelength_p)):
            raise ConfigurationError("pump wavelength must be positive and finite")

    @property
    def k_p(self):
        return 2.0 * math.pi / self.wavelength_p


@dataclass(frozen=True)
class CrystalSpec:
    """One bulk birefringent crystal.

    ``walkoff_M`` is a transverse 2-vector; a scalar is read as ``(M, 0)``.
    ``epsilon`` is the sign of the crystal's quadratic susceptibility.
    """

    thickness_L: float
    dispersion_D: float
    walkoff_M: tuple = (0.0, 0.0)
    chi0: float = 1.0
    epsilon: int = 1

    def __post_init__(self):
        if not (self.thickness_L > 0 and math.isfinite(self.thickness_L)):
            raise ConfigurationError("crystal thickness must be positive")
        if not math.isfinite(self.dispersion_D):
            raise ConfigurationError("crystal dispersion must be finite")
        if self.epsilon not in (1, -1):
            raise ConfigurationError("crystal epsilon must be +1 or -1")
        try:
            m = as_vec2(self.walkoff_M, "walkoff")
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        if not np.all(np.isfinite(m)):
            raise ConfigurationError("walkoff must be finite")
        object.__setattr__(self, "walkoff_M", (float(m[0]), float(m[1])))

    @property
    def walkoff(self):
        return np.array(self.walkoff_M)

    @property
    def signed_chi0(self):
        return self.epsilon * self.chi0


@dataclass(frozen=True)
class GapSpec:
    """Linear medium between two crystals."""

    length_d: float
    delta_prime: float = 0.0

    def __post_init__(self):
        if not (self.length_d >= 0 and math.isfinite(self.length_d)):
            raise ConfigurationError("gap length must be non-negative")
        if not math.isfinite(self.delta_prime):
            raise ConfigurationError("gap mismatch must be finite")

    @property
    def phase(self):
        return self.delta_prime * self.length_d


def air_gap(length_d, pump, index_difference=AIR_INDEX_DIFFERENCE):
    """Gap filled with air; its mismatch is k_p times the index difference."""
    return GapSpec(length_d=length_d, delta_prime=pump.k_p * index_difference)


@dataclass(frozen=True)
class DelayLineSpec:
    thickness_l_tau: float = 0.0
    dispersion_D_tau: float = 0.0
    walkoff_M_tau: tuple = field(default=(0.0, 0.0))

    def __post_init__(self):
        if self.thickness_l_tau < 0:
            raise ConfigurationError("delay-line thickness must be non-negative")
        m = as_vec2(self.walkoff_M_tau, "delay-line walkoff")
        object.__setattr__(self, "walkoff_M_tau", (float(m[0]), float(m[1])))

    @property
    def tau(self):
        return -self.thickness_l_tau * self.dispersion_D_tau

    @classmethod
    def for_delay(cls, tau, dispersion_D_tau=-1e-9):
        """Plate of the thickness that yields delay ``tau`` (walkoff-free)."""
        if tau == 0:
            return cls(0.0, dispersion_D_tau)
        l_tau = -tau / dispersion_D_tau
        if l_tau < 0:
            dispersion_D_tau = -dispersion_D_tau
            l_tau = -l_tau
        return cls(l_tau, dispersion_D_tau)


def delta_mismatch(q, nu, crystal, pump):
    """Fresnel-expanded mismatch -nu*D + 2|q|^2/k_p + M.q in rad/m.

    ``q`` may be an array of 2-vectors (last axis of length 2).
    """
    q = np.asarray(q, dtype=float)
    q2 = np.sum(q * q, axis=-1)
    mq = q @ crystal.walkoff
    out = -np.asarray(nu) * crystal.dispersion_D + 2.0 * q2 / pump.k_p + mq
    return out if np.ndim(out) else float(out)


def phi_disp(d, pump, index_pump=None, index_degenerate=None,
             index_difference=None):
    """Phase k_p [n(lambda_p) - n(2 lambda_p)] d acquired across a linear gap.

    Supply either both indices or ``index_difference``; with neither, the
    calibrated air difference is used. Working with the difference directly
    avoids cancellation between two indices close to 1.
    """
    if (index_pump is None) != (index_degenerate is None):
        raise ConfigurationError("give both indices or neither")
    if index_pump is not None:
        if index_difference is not None:
            raise ConfigurationError("give an index pair or a difference, not both")
        index_difference = index_pump - index_degenerate
    elif index_difference is None:
        index_difference = AIR_INDEX_DIFFERENCE
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ConfigurationError("gap length must be non-negative")
    out = pump.k_p * index_difference * d
    return out if out.ndim else float(out)


def eta_tau(q, nu, delay, pump):
    """Delay-line phase [-nu D_tau + 2|q|^2/k_p + M_tau.q] l_tau.

    The constant ``-(K_o + K_e) l_tau`` is omitted, so q = 0 and M_tau = 0
    give exactly ``nu * tau``.
    """
    q = np.asarray(q, dtype=float)
    q2 = np.sum(q * q, axis=-1)
    mq = q @ np.asarray(delay.walkoff_M_tau)
    out = (-np.asarray(nu) * delay.dispersion_D_tau + 2.0 * q2 / pump.k_p + mq) \
        * delay.thickness_l_tau
    return out if np.ndim(out) else float(out)
