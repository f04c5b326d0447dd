"""Two-crystal interference: G-functions, V(tau), centre visibilities, R(tau).

The dip is described relative to the delay tau introduced by the delay line.
Crystal 1 is upstream, crystal 2 sits against the output plane z = 0, and the
gap between them has length d. With rho = (d1 + d) / d1 the visibility is

    V(tau) = (1/L) [ w1 I1 + w2 I2 + 2 eps rho / (1 + rho^2) I12 ]

with w1 = 1 / (1 + rho^2), w2 = rho^2 / (1 + rho^2), where each I is a
z-integral of a G-function over the overlap window its rect factors allow.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.special import erf

from ._numerics import gauss_legendre, sinc
from .apertures import (CircularAperture, DeltaAperture, GaussianAperture,
                        OpticalGeometry, as_gaussian, gamma_factor, kernel)
from .dispersion import CrystalSpec, DelayLineSpec, GapSpec, PumpSpec
from .errors import (ConfigurationError, DegenerateAnalyzerError,
                     UnsupportedConfigurationError)

DEFAULT_ORDER = 64
PARALLEL = "parallel"
ANTIPARALLEL = "antiparallel"
CENTER_FORMS = ("auto", "small_parallel", "small_antiparallel",
                "gauss_parallel", "gauss_antiparallel")


@dataclass(frozen=True)
class AnalyzerSpec:
    mu_AoBe: float
    mu_BoAe: float

    def __post_init__(self):
        for name in ("mu_AoBe", "mu_BoAe"):
            v = getattr(self, name)
            if not (abs(v) <= 1 and math.isfinite(v)):
                raise ConfigurationError(f"{name} must lie in [-1, 1]")

    @classmethod
    def from_angles(cls, theta_A, theta_B):
        """Analyzer angles in radians, measured from each detector's o axis.

        Convention: mu_AoBe = cos(theta_A) sin(theta_B) and
        mu_BoAe = cos(theta_B) sin(theta_A).
        """
        return cls(math.cos(theta_A) * math.sin(theta_B),
                   math.cos(theta_B) * math.sin(theta_A))


#: Named analyzer settings. ``paper-45-45`` yields v_pol = -1.
ANALYZER_PRESETS = {"paper-45-45": AnalyzerSpec(-0.5, 0.5)}


def v_pol(analyzers):
    a, b = analyzers.mu_AoBe, analyzers.mu_BoAe
    scale = max(abs(a), abs(b))
    if scale == 0:
        raise DegenerateAnalyzerError("both analyzer projections are zero")
    a, b = a / scale, b / scale  # avoids underflow for tiny projections
    return 2.0 * a * b / (a * a + b * b)


@dataclass(frozen=True)
class TwoCrystalSystem:
    crystal1: CrystalSpec
    crystal2: CrystalSpec
    gap: GapSpec
    geometry: OpticalGeometry
    aperture: object
    pump: PumpSpec
    axes: str = PARALLEL
    delay: DelayLineSpec = field(default_factory=DelayLineSpec)

    def __post_init__(self):
        if self.axes not in (PARALLEL, ANTIPARALLEL):
            raise ConfigurationError(f"axes must be '{PARALLEL}' or '{ANTIPARALLEL}'")
        if not isinstance(self.aperture, (DeltaAperture, GaussianAperture,
                                          CircularAperture)):
            raise ConfigurationError("unknown aperture model")
        sign = 1 if self.axes == PARALLEL else -1
        m1, m2 = self.crystal1.walkoff, self.crystal2.walkoff
        if not np.allclose(m2, sign * m1, rtol=1e-12, atol=0):
            raise ConfigurationError(f"{self.axes} axes require M2 = {sign:+d} M1")
        if self.crystal1.epsilon * self.crystal2.epsilon != sign:
            raise ConfigurationError(
                f"{self.axes} axes require eps1*eps2 = {sign:+d}")
        if any(self.delay.walkoff_M_tau):
            raise UnsupportedConfigurationError(
                "delay lines with transverse walkoff are not supported")

    @classmethod
    def from_crystal(cls, crystal, axes, gap, geometry, aperture, pump,
                     delay=None):
        """Pair ``crystal`` with a copy whose orientation follows ``axes``."""
        if axes == ANTIPARALLEL:
            second = replace(crystal, walkoff_M=tuple(-crystal.walkoff),
                             epsilon=-crystal.epsilon)
        else:
            second = crystal
        return cls(crystal, second, gap, geometry, aperture, pump, axes,
                   delay or DelayLineSpec())

    @property
    def epsilon(self):
        return self.crystal1.epsilon * self.crystal2.epsilon

    @property
    def rho(self):
        return (self.geometry.d1 + self.gap.length_d) / self.geometry.d1

    @property
    def distances(self):
        return self.geometry.distances(self.gap.length_d)

    @property
    def thickness(self):
        l1, l2 = self.crystal1.thickness_L, self.crystal2.thickness_L
        if l1 != l2:
            raise UnsupportedConfigurationError(
                "V(tau) is only defined here for equal crystal thicknesses")
        return l1

    @property
    def window_delay(self):
        """The delay L*D at the centre of the interference region."""
        return self.thickness * self.crystal1.dispersion_D

    def with_gap_length(self, d):
        return replace(self, gap=replace(self.gap, length_d=d))

    def with_aperture(self, aperture):
        return replace(self, aperture=aperture)


def _g_arguments(kind, z, x, system):
    """Kernel arguments (z0, Z, s_k, s_n) for one G-function.

    ``z`` is the depth in crystal coordinates (array), ``x = tau / (L D)``.
    Derived from the general two-crystal expressions with M_tau = 0:
    L1_vec = M2 L, L2_vec = 0, tau1/D = (x - 1) L, tau2/D = x L.
    """
    L = system.thickness
    m1, m2 = system.crystal1.walkoff, system.crystal2.walkoff
    s1, s2 = system.distances
    z = np.asarray(z, dtype=float)[..., None]
    if kind == "G1":
        z0 = -(m1 * z + m2 * L)
        Z = -2.0 * (m1 * (x - 1.0) * L + m2 * L)
        return z0, np.broadcast_to(Z, z0.shape), s1, s1
    if kind == "G2":
        z0 = -(m2 * z)
        Z = -2.0 * m2 * x * L
        return z0, np.broadcast_to(Z, z0.shape), s2, s2
    if kind == "G12":
        z0 = -(m1 * z + m2 * L)
        Z = -(z * (m1 - m2) + 2.0 * m2 * x * L)
        return z0, np.broadcast_to(Z, z0.shape), s1, s2
    raise ConfigurationError(f"unknown G-function kind {kind!r}")


def g_function(kind, zeta, x, system):
    """G-function at depth ``zeta = z / L`` and delay ``x = tau / (L D)``.

    The gap phase exp(-i Delta' d) of the cross term is not included.
    """
    z = np.asarray(zeta, dtype=float) * system.thickness
    z0, Z, s_k, s_n = _g_arguments(kind, z, x, system)
    out = kernel(z0, Z, s_k, s_n, system.pump, system.aperture)
    return out if np.ndim(out) else complex(out)


def _window(lo, hi, length):
    return max(0.0, lo), min(length, hi)


def _window_integral(fn, lo, hi, order):
    if hi <= lo:
        return 0.0
    nodes, weights = gauss_legendre(order, lo, hi)
    return float(np.real(fn(nodes)) @ weights)


def _check_order(order):
    order = int(order)
    if order < 8:
        raise ConfigurationError("quadrature order must be at least 8")
    return order


def assemble_visibility(tau, system, n_eval, quadrature_order=DEFAULT_ORDER):
    """Build V(tau) from a kernel evaluator ``n_eval(z0, Z, s_k, s_n)``.

    Shared by the closed-form path and the oracle path so that both assemble
    the windows and weights the same way.
    """
    order = _check_order(quadrature_order)
    L = system.thickness
    D = system.crystal1.dispersion_D
    if D == 0:
        raise ConfigurationError("crystal dispersion D must be non-zero")
    x = tau / (L * D)
    c = 2.0 * tau / D
    rho = system.rho
    w1 = 1.0 / (1.0 + rho * rho)
    w2 = rho * rho / (1.0 + rho * rho)
    w12 = 2.0 * system.epsilon * rho / (1.0 + rho * rho)
    gap_phase = np.exp(-1j * system.gap.phase)

    def term(kind, extra=1.0):
        def f(z):
            z0, Z, s_k, s_n = _g_arguments(kind, z, x, system)
            return n_eval(z0, Z, s_k, s_n) * extra
        return f

    lo1, hi1 = _window(c - 3.0 * L, c - 2.0 * L, L)
    lo2, hi2 = _window(c - L, c, L)
    lo12, hi12 = _window(c - 2.0 * L, c - L, L)
    total = (w1 * _window_integral(term("G1"), lo1, hi1, order)
             + w2 * _window_integral(term("G2"), lo2, hi2, order)
             + w12 * _window_integral(term("G12", gap_phase), lo12, hi12, order))
    return total / L


def visibility_tau(tau, system, quadrature_order=DEFAULT_ORDER):
    """Visibility V(tau) for two crystals of equal thickness."""
    def n_eval(z0, Z, s_k, s_n):
        return kernel(z0, Z, s_k, s_n, system.pump, system.aperture)
    return assemble_visibility(tau, system, n_eval, quadrature_order)


def visibility_single_crystal(tau, crystal, s, aperture, pump,
                              quadrature_order=DEFAULT_ORDER):
    """V(tau) of one crystal whose output face is a distance ``s`` from the
    apertures (the reference pattern for the d = 0 and d -> infinity limits)."""
    order = _check_order(quadrature_order)
    L = crystal.thickness_L
    D = crystal.dispersion_D
    c = 2.0 * tau / D
    m = crystal.walkoff
    Zv = -2.0 * m * tau / D

    def f(z):
        z0 = -(m * np.asarray(z)[..., None])
        return kernel(z0, np.broadcast_to(Zv, z0.shape), s, s, pump, aperture)

    lo, hi = _window(c - L, c, L)
    return _window_integral(f, lo, hi, order) / L


def _center_parameters(system):
    L = system.thickness
    d1 = system.geometry.d1
    d = system.gap.length_d
    k_p = system.pump.k_p
    m = float(np.linalg.norm(system.crystal1.walkoff))
    return L, d1, d, k_p, m


def _prefactor(d1, d):
    return 2.0 * d1 * (d1 + d) / (d1 * d1 + (d1 + d) ** 2)


def _center_small_parallel(system, order):
    L, d1, d, k_p, m = _center_parameters(system)
    a = k_p * (m * L) ** 2 / (2.0 * (d1 + d))
    zeta, w = gauss_legendre(order, 0.0, 1.0)
    arg = a * ((1 + zeta ** 2) * d / (4 * d1) - zeta * (1 + d / (2 * d1))) \
        + system.gap.phase
    return _prefactor(d1, d) * float(np.cos(arg) @ w)


def _center_small_antiparallel(system, order):
    L, d1, d, k_p, m = _center_parameters(system)
    a = k_p * (m * L) ** 2 * d / (8.0 * d1 * (d1 + d))
    zeta, w = gauss_legendre(order, 0.0, 1.0)
    arg = a * (zeta - 1) ** 2 + system.gap.phase
    return -_prefactor(d1, d) * float(np.cos(arg) @ w)


def _gauss_coefficients(system):
    L, d1, d, k_p, m = _center_parameters(system)
    g = as_gaussian(system.aperture)
    if g is None:
        raise ConfigurationError("Gaussian centre forms need a finite aperture")
    r2 = g.r_squared
    gamma = gamma_factor(system.pump, g, d1, d)
    g2 = 1.0 + gamma * gamma
    mL2 = (m * L) ** 2
    B = 2.0 * (k_p * m * L * math.sqrt(r2) / (4.0 * (d1 + d))) ** 2 / g2 \
        * (1 + d / (2 * d1)) ** 2
    C = k_p * mL2 / (8 * (d1 + d)) * d / d1 / g2
    Dc = -k_p * mL2 / (2 * (d1 + d)) * (1 + d / (2 * d1)) / g2
    # gamma^2 (d1 + d) / d written without the 0/0 at d = 0
    g2_ratio = (k_p * r2 / (4 * d1)) ** 2 * d / (d1 + d)
    E = k_p * mL2 / (8 * (d1 + d)) * (d / d1 - 4 * g2_ratio) / g2
    return dict(L=L, d1=d1, d=d, gamma=gamma, B=B, C=C, D=Dc, E=E)


def _center_gauss_parallel(system, order):
    p = _gauss_coefficients(system)
    d1, d = p["d1"], p["d"]
    zeta, w = gauss_legendre(order, 0.0, 1.0)
    env = np.exp(-p["B"] * (1 - zeta * d / (d + 2 * d1)) ** 2)
    phase = (p["C"] * zeta ** 2 + p["D"] * zeta + p["E"]
             + math.atan(p["gamma"]) + system.gap.phase)
    return _prefactor(d1, d) / math.sqrt(1 + p["gamma"] ** 2) \
        * float((env * np.cos(phase)) @ w)


def _center_gauss_antiparallel(system, order):
    p = _gauss_coefficients(system)
    d1, d = p["d1"], p["d"]
    zeta, w = gauss_legendre(order, 0.0, 1.0)
    env = np.exp(-p["B"] * (1 - zeta) ** 2)
    phase = p["E"] * (1 - zeta) ** 2 + math.atan(p["gamma"]) + system.gap.phase
    return -_prefactor(d1, d) / math.sqrt(1 + p["gamma"] ** 2) \
        * float((env * np.cos(phase)) @ w)


_CENTER = {
    "small_parallel": _center_small_parallel,
    "small_antiparallel": _center_small_antiparallel,
    "gauss_parallel": _center_gauss_parallel,
    "gauss_antiparallel": _center_gauss_antiparallel,
}


def resolve_center_form(system, form="auto"):
    if form not in CENTER_FORMS:
        raise ConfigurationError(
            f"unknown centre form {form!r}; expected one of {', '.join(CENTER_FORMS)}")
    if form != "auto":
        return form
    size = "small" if isinstance(system.aperture, DeltaAperture) else "gauss"
    return f"{size}_{system.axes}"


def visibility_center(system, form="auto", quadrature_order=DEFAULT_ORDER):
    """V(LD) from the closed-form one-dimensional integrals."""
    order = _check_order(quadrature_order)
    system.thickness  # equal-thickness check
    return _CENTER[resolve_center_form(system, form)](system, order)


def baseline_rate(system):
    """Unnormalized shoulder rate (k_p/2)^2 [L1/(D s1^2) + L2/(D s2^2)] P_A(0) P_B(0)."""
    s1, s2 = system.distances
    pupils = 1.0 if isinstance(system.aperture, DeltaAperture) \
        else system.aperture.pupil_at_zero
    k = 0.5 * system.pump.k_p
    return k * k * (system.crystal1.thickness_L / (system.crystal1.dispersion_D * s1 ** 2)
                    + system.crystal2.thickness_L / (system.crystal2.dispersion_D * s2 ** 2)) \
        * pupils


def coincidence_rate(tau, system, analyzers, quadrature_order=DEFAULT_ORDER):
    """R(tau) / R0 = 1 + v_pol V(tau); the shoulder is exactly 1."""
    return 1.0 + v_pol(analyzers) * visibility_tau(tau, system, quadrature_order)


@dataclass(frozen=True)
class VisibilityCurve:
    sweep_variable: str
    abscissa: np.ndarray
    value: np.ndarray
    phi_disp: np.ndarray
    phi_gamma: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.sweep_variable not in ("tau", "d", "r", "aperture_b"):
            raise ConfigurationError(f"unknown sweep variable {self.sweep_variable!r}")
        v = np.asarray(self.value)
        if v.size and np.max(np.abs(v)) > 1 + 1e-9:
            raise ValueError("visibility magnitude exceeds 1")

    def zero_crossings(self):
        """Abscissae where V changes sign, by linear interpolation."""
        x = np.asarray(self.abscissa)
        v = np.asarray(self.value)
        idx = np.nonzero(np.signbit(v[:-1]) != np.signbit(v[1:]))[0]
        return x[idx] - v[idx] * (x[idx + 1] - x[idx]) / (v[idx + 1] - v[idx])


def parallel_map(fn, items, workers=1):
    """Ordered map that may fan out to a thread pool."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _phi_gamma(system):
    return -math.atan(gamma_factor(system.pump, system.aperture,
                                   system.geometry.d1, system.gap.length_d))


def visibility_vs_separation(system, d_values, at_center=True, form="auto",
                             quadrature_order=DEFAULT_ORDER, workers=1):
    """V(LD) as a function of gap length.

    With ``at_center`` the closed-form centre integrals are used; otherwise
    the general V(tau) assembly is evaluated at tau = L D.
    """
    d_values = np.asarray(d_values, dtype=float)
    if d_values.size == 0:
        raise ConfigurationError("d_values must be non-empty")
    systems = [system.with_gap_length(float(d)) for d in d_values]

    def one(s):
        if at_center:
            return visibility_center(s, form, quadrature_order)
        return visibility_tau(s.window_delay, s, quadrature_order)

    values = np.array(parallel_map(one, systems, workers))
    return VisibilityCurve(
        "d", d_values, values,
        np.array([s.gap.phase for s in systems]),
        np.array([_phi_gamma(s) for s in systems]),
        {"system": system, "at_center": at_center, "form": form})


def visibility_vs_delay(system, tau_values, quadrature_order=DEFAULT_ORDER,
                        workers=1):
    taus = np.asarray(tau_values, dtype=float)
    values = np.array(parallel_map(
        lambda t: visibility_tau(t, system, quadrature_order), taus, workers))
    n = taus.size
    return VisibilityCurve(
        "tau", taus, values, np.full(n, system.gap.phase),
        np.full(n, _phi_gamma(system)),
        {"system": system, "R0": baseline_rate(system)})


def visibility_vs_aperture(system, values, variable="r", at_center=True,
                           form="auto", quadrature_order=DEFAULT_ORDER,
                           workers=1):
    """V(LD) versus Gaussian radius ``r`` or circular diameter ``aperture_b``."""
    values = np.asarray(values, dtype=float)
    if variable == "r":
        make = GaussianAperture
    elif variable == "aperture_b":
        make = CircularAperture
    else:
        raise ConfigurationError(f"unknown aperture sweep variable {variable!r}")
    systems = [system.with_aperture(make(float(v))) for v in values]

    def one(s):
        if at_center:
            return visibility_center(s, form, quadrature_order)
        return visibility_tau(s.window_delay, s, quadrature_order)

    out = np.array(parallel_map(one, systems, workers))
    return VisibilityCurve(
        variable, values, out,
        np.array([s.gap.phase for s in systems]),
        np.array([_phi_gamma(s) for s in systems]),
        {"system": system, "at_center": at_center, "form": form})
