"""Brute-force reference integrators.

Nothing here calls the closed-form kernels. The diffraction kernel is
obtained by numerically integrating its defining transverse-momentum
integral,

    N = exp(-i k_p |Z|^2 / (8 s_n)) * integral dq  P_A(-q) P_B(q)
            W(q + k_p Z / (4 s_n)) exp(-i q.z0),
    W(q) = -(2 i d_r / (pi k_p)) exp(2 i d_r |q|^2 / k_p),  1/d_r = 1/s_n - 1/s_k,

with normalized Gaussian pupil transforms exp(-r_i^2 |q|^2 / 4), or unity
for point pupils. The integrand factorizes over the two Cartesian axes, so
each evaluation is a product of two one-dimensional integrals.

Two contours are available:

* ``gauss_legendre``: composite Gauss-Legendre on the real axis truncated at
  ``domain_halfwidth`` Gaussian widths. Needs a Gaussian envelope and enough
  points per phase cycle; it refuses otherwise.
* ``adaptive``: uses the real axis when that is affordable and otherwise the
  steepest-descent line through the saddle of the quadratic exponent (valid
  by Cauchy's theorem because the integrand is entire and decays in the
  swept sector). Point pupils always take this route.

At s_k = s_n the kernel W becomes a delta function; the value there is
extrapolated from s_k on either side with a fourth-order symmetric
Richardson rule.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np

from ._numerics import composite_gauss_legendre, gauss_legendre
from .apertures import (DEGENERATE_THRESHOLD, DeltaAperture, NKernelArgs,
                        as_gaussian, n_function)
from .errors import (ConfigurationError, OracleConvergenceError,
                     OracleSamplingError)
from .interference import _g_arguments
from .nonlinearity import Bulk, Cascade, FourierPeriodic, Sinusoidal

SCHEMES = ("gauss_legendre", "adaptive")


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "adaptive"
    points_per_axis: int = 32
    domain_halfwidth: float = 8.0
    target_rel_err: float = 1e-7
    max_points: int = 1 << 18
    min_points_per_cycle: float = 6.0
    degenerate_step: float = 1e-5

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"quadrature scheme must be one of {SCHEMES}")
        if self.points_per_axis < 16:
            raise ConfigurationError("points_per_axis must be at least 16")
        if not self.target_rel_err > 0:
            raise ConfigurationError("target_rel_err must be positive")
        if not self.domain_halfwidth > 0:
            raise ConfigurationError("domain_halfwidth must be positive")


@dataclass(frozen=True)
class OracleResult:
    value: complex
    method: str
    points: int
    points_per_cycle: float


def _log_integrand(q, a, sigma, shift, z0):
    return -sigma * q * q + 1j * a * (q + shift) ** 2 - 1j * q * z0


def _converged(coarse, fine, target):
    scale = max(abs(fine), 1e-300)
    return abs(fine - coarse) <= target * scale


def _real_axis(a, sigma, shift, z0, quad, strict):
    """Both axes at once: ``shift`` and ``z0`` are length-2 arrays."""
    half = quad.domain_halfwidth / math.sqrt(sigma)
    omega = np.max(np.abs([2 * a * (half + shift) - z0, 2 * a * (-half + shift) - z0]))
    cycles = max(omega * 2 * half / (2 * math.pi), 1e-12)
    order = quad.points_per_axis
    panels = max(1, math.ceil(2 * quad.min_points_per_cycle * cycles / order))
    if panels * order * 2 > quad.max_points:
        density = quad.max_points / 2 / cycles
        if density < quad.min_points_per_cycle or strict:
            raise OracleSamplingError(
                f"real-axis quadrature needs ~{cycles:.3g} phase cycles per axis; "
                f"{quad.max_points} points give {density:.3g} points per cycle "
                f"(minimum {quad.min_points_per_cycle})")

    def estimate(p):
        q, w = composite_gauss_legendre(order, -half, half, p)
        vals = np.exp(_log_integrand(q[None, :], a, sigma, shift[:, None], z0[:, None]))
        return vals @ w

    coarse = estimate(panels)
    while True:
        fine = estimate(2 * panels)
        if all(_converged(c, f, quad.target_rel_err * 0.1) for c, f in zip(coarse, fine)):
            return fine, 2 * panels * order, 2 * panels * order / cycles
        panels *= 2
        if panels * order > quad.max_points:
            raise OracleConvergenceError("real-axis quadrature did not converge",
                                         complex(np.prod(coarse)), complex(np.prod(fine)))
        coarse = fine


def _steepest_descent(a, sigma, shift, z0, quad):
    A = sigma - 1j * a
    beta = 1j * (2 * a * shift - z0)
    saddle = beta / (2 * A)
    theta = -0.5 * np.angle(A)
    direction = np.exp(1j * theta)
    half = quad.domain_halfwidth / math.sqrt(abs(A))

    def estimate(order):
        t, w = gauss_legendre(order, -half, half)
        q = saddle[:, None] + direction * t[None, :]
        vals = np.exp(_log_integrand(q, a, sigma, shift[:, None], z0[:, None]))
        return direction * (vals @ w)

    order = quad.points_per_axis
    coarse = estimate(order)
    while True:
        fine = estimate(2 * order)
        if all(_converged(c, f, quad.target_rel_err * 0.1) for c, f in zip(coarse, fine)):
            return fine, 2 * order, math.inf
        order *= 2
        if order > 4096:
            raise OracleConvergenceError("steepest-descent quadrature did not converge",
                                         complex(np.prod(coarse)), complex(np.prod(fine)))
        coarse = fine


def _oracle_nondegenerate(z0, Z, s_k, s_n, k_p, sigma, quad):
    inv_dr = (s_k - s_n) / (s_k * s_n)
    a = 2.0 / (k_p * inv_dr)
    c = k_p / (4.0 * s_n)
    shift = c * Z
    strict = quad.scheme == "gauss_legendre"
    method = None
    if sigma > 0:
        try:
            axes, points, density = _real_axis(a, sigma, shift, z0, quad, strict)
            method = "real_axis"
        except OracleSamplingError:
            if strict:
                raise
    elif strict:
        raise OracleSamplingError(
            "point pupils leave the chirped integrand without a Gaussian "
            "envelope; real-axis sampling cannot converge")
    if method is None:
        axes, points, density = _steepest_descent(a, sigma, shift, z0, quad)
        method = "steepest_descent"
    prefactor = -1j * a / math.pi
    value = np.exp(-0.5j * c * np.dot(Z, Z)) * prefactor * axes[0] * axes[1]
    return OracleResult(complex(value), method, points, density)


def oracle_n_result(args, pump, aperture, quad=QuadratureSpec()):
    """Oracle kernel value with diagnostics."""
    g = as_gaussian(aperture)
    sigma = 0.0 if g is None else (g.r_A ** 2 + g.r_B ** 2) / 4.0
    z0 = np.asarray(args.z0, dtype=float)
    Z = np.asarray(args.Z, dtype=float)
    s_k, s_n = args.s_k, args.s_n
    k_p = pump.k_p
    if abs(s_k - s_n) >= DEGENERATE_THRESHOLD * s_n:
        return _oracle_nondegenerate(z0, Z, s_k, s_n, k_p, sigma, quad)
    if quad.scheme == "gauss_legendre":
        raise OracleSamplingError(
            "s_k = s_n turns the W kernel into a delta function; "
            "real-axis sampling is impossible")
    h = quad.degenerate_step / s_n
    vals = {}
    for m in (-2, -1, 1, 2):
        sk = 1.0 / (1.0 / s_n - m * h)
        vals[m] = _oracle_nondegenerate(z0, Z, sk, s_n, k_p, sigma, quad)
    near = 0.5 * (vals[1].value + vals[-1].value)
    far = 0.5 * (vals[2].value + vals[-2].value)
    value = (4.0 * near - far) / 3.0
    return OracleResult(value, "richardson_" + vals[1].method,
                        sum(v.points for v in vals.values()), vals[1].points_per_cycle)


def oracle_n_function(args, pump, aperture, quad=QuadratureSpec()):
    return oracle_n_result(args, pump, aperture, quad).value


def _oracle_kernel_array(z0, Z, s_k, s_n, pump, aperture, quad):
    z0 = np.asarray(z0).reshape(-1, 2)
    Z = np.asarray(Z).reshape(-1, 2)
    return np.array([oracle_n_function(NKernelArgs(a, b, s_k, s_n), pump, aperture, quad)
                     for a, b in zip(z0, Z)])


def oracle_visibility(tau, system, quad=QuadratureSpec(), z_order=48):
    """V(tau) built from oracle kernel values.

    Each term is integrated over the full crystal depth [0, L] with its rect
    factors applied as indicator functions; the z-axis is split at the rect
    edges so the Gauss-Legendre panels see a smooth integrand.
    """
    L = system.thickness
    D = system.crystal1.dispersion_D
    x = tau / (L * D)
    c = 2.0 * tau / D
    rho2 = system.rho ** 2
    weights = {"G1": 1 / (1 + rho2), "G2": rho2 / (1 + rho2),
               "G12": 2 * system.epsilon * system.rho / (1 + rho2)}
    # partner-crystal depth as a function of z for each term
    partner = {"G1": lambda z: c - 2 * L - z, "G2": lambda z: c - z,
               "G12": lambda z: c - L - z}
    edges = {"G1": (c - 3 * L, c - 2 * L), "G2": (c - L, c), "G12": (c - 2 * L, c - L)}
    extra = {"G1": 1.0, "G2": 1.0, "G12": np.exp(-1j * system.gap.phase)}
    total = 0.0
    for kind in ("G1", "G2", "G12"):
        cuts = sorted({0.0, L, *(min(max(e, 0.0), L) for e in edges[kind])})
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi <= lo:
                continue
            mid = 0.5 * (lo + hi)
            p = partner[kind](mid)
            if not 0.0 <= p <= L:
                continue
            z, w = gauss_legendre(z_order, lo, hi)
            z0, Z, s_k, s_n = _g_arguments(kind, z, x, system)
            vals = _oracle_kernel_array(z0, Z, s_k, s_n, system.pump, system.aperture, quad)
            total += weights[kind] * float(np.real(vals * extra[kind]) @ w)
    return total / L


@dataclass(frozen=True)
class OracleComparison:
    args: NKernelArgs
    analytic: complex
    oracle: complex

    @property
    def rel_err(self):
        return abs(self.analytic - self.oracle) / max(abs(self.oracle), 1e-300)


def compare_n_functions(arg_list, pump, aperture, quad=QuadratureSpec()):
    return [OracleComparison(a, n_function(a, pump, aperture),
                             oracle_n_function(a, pump, aperture, quad))
            for a in arg_list]


def write_oracle_report(stream, comparisons):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["z0_x", "z0_y", "Z_x", "Z_y", "s_k", "s_n", "analytic_re",
                     "analytic_im", "oracle_re", "oracle_im", "rel_err"])
    for c in comparisons:
        row = [*c.args.z0, *c.args.Z, c.args.s_k, c.args.s_n, c.analytic.real,
               c.analytic.imag, c.oracle.real, c.oracle.imag, c.rel_err]
        writer.writerow([format(float(v), ".17g") for v in row])


def argument_grid(walkoff_length, d1, d):
    """Deterministic 5 x 5 x 2 x 2 grid of kernel arguments.

    z0 and Z span magnitudes up to 3 |M| L in several directions; s_k and s_n
    each take the values d1 and d1 + d.
    """
    m = walkoff_length
    z0s = [(0.0, 0.0), (m, 0.0), (-1.5 * m, 0.5 * m), (2.0 * m, -2.0 * m), (0.0, -3.0 * m)]
    Zs = [(0.0, 0.0), (-2.0 * m, 0.0), (0.7 * m, 1.1 * m), (3.0 * m, 0.0), (-1.2 * m, -2.5 * m)]
    dists = (d1, d1 + d)
    return [NKernelArgs(z0, Z, sk, sn)
            for z0 in z0s for Z in Zs for sk in dists for sn in dists]


def _profile_segments(profile):
    """(z_lo, z_hi, density(z), phase_at_hi, local mismatch flag) pieces."""
    if isinstance(profile, Bulk):
        return [(-profile.thickness_L, 0.0, lambda z: profile.chi0 + 0 * z, 0)]
    if isinstance(profile, Sinusoidal):
        k = 2 * math.pi / profile.period_Lambda
        return [(-profile.thickness_L, 0.0,
                 lambda z: profile.chi0 * np.cos(k * z), 0)]
    if isinstance(profile, FourierPeriodic):
        return [(-profile.thickness_L, 0.0, profile.density, 0)]
    raise TypeError


def oracle_chi_tilde(delta, profile, order=32):
    """State function by direct quadrature of chi(z) exp(i phi(z)) dz.

    For a cascade, phi(z) accumulates Delta across crystals and Delta' across
    gaps, measured from the output face at z = 0.
    """
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    out = np.zeros(delta.shape, dtype=complex)
    dmax = float(np.max(np.abs(delta))) if delta.size else 0.0

    def integrate(lo, hi, density, phase_at_hi, extra_rate=0.0):
        rate = dmax + extra_rate
        panels = max(1, math.ceil((hi - lo) * rate / (2 * math.pi)))
        z, w = composite_gauss_legendre(order, lo, hi, panels)
        phase = np.multiply.outer(delta, z - hi) + phase_at_hi[:, None]
        return (np.exp(1j * phase) * density(z)[None, :]) @ w

    if isinstance(profile, Cascade):
        hi = 0.0
        phase = np.zeros(delta.shape)
        crystals, gaps = profile.crystals, profile.gaps
        for j in range(len(crystals) - 1, -1, -1):
            c = crystals[j]
            lo = hi - c.thickness_L
            out += integrate(lo, hi, lambda z, v=c.signed_chi0: v + 0 * z, phase)
            phase = phase - delta * c.thickness_L
            if j > 0:
                g = gaps[j - 1]
                phase = phase - g.delta_prime * g.length_d
                lo -= g.length_d
            hi = lo
        return out if out.size > 1 else complex(out[0])

    extra = 0.0
    if isinstance(profile, Sinusoidal):
        extra = 2 * math.pi / profile.period_Lambda
    elif isinstance(profile, FourierPeriodic):
        extra = 2 * math.pi * profile.m_max / profile.period_Lambda
    for lo, hi, density, _ in _profile_segments(profile):
        out += integrate(lo, hi, density, np.zeros(delta.shape), extra)
    return out if out.size > 1 else complex(out[0])
