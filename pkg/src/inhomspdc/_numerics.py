"""Small numerical helpers shared by the physics modules."""

from functools import lru_cache

import numpy as np

SINC_SERIES_THRESHOLD = 1e-4


def sinc(x):
    """Unnormalized sinc, sin(x)/x, with sinc(0) = 1.

    Below ``|x| < 1e-4`` the two-term series 1 - x^2/6 is used.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SINC_SERIES_THRESHOLD
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


@lru_cache(maxsize=64)
def _leggauss(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(order, a, b):
    """Nodes and weights of an ``order``-point Gauss-Legendre rule on [a, b]."""
    nodes, weights = _leggauss(int(order))
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return mid + half * nodes, half * weights


def composite_gauss_legendre(order, a, b, panels):
    """Composite rule with ``panels`` equal sub-intervals of [a, b]."""
    nodes, weights = _leggauss(int(order))
    edges = np.linspace(a, b, int(panels) + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * nodes).ravel(), (half * weights).ravel()


def sqnorm(v):
    """Squared Euclidean norm over the last axis (2-vectors)."""
    v = np.asarray(v)
    return np.sum(v * v, axis=-1)


def dot(u, v):
    return np.sum(np.asarray(u) * np.asarray(v), axis=-1)


def as_vec2(v, name="vector"):
    arr = np.asarray(v, dtype=float)
    if arr.shape == ():
        arr = np.array([float(arr), 0.0])
    if arr.shape != (2,):
        raise ValueError(f"{name} must be a 2-vector, got shape {arr.shape}")
    return arr
