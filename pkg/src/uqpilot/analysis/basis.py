"""Orthonormal polynomial families matched to the input distributions.

Legendre (uniform measure on [-1, 1], density 1/2) and probabilists'
Hermite (standard normal) are normalized so E[phi_m phi_n] = delta_mn.
Variance and Sobol indices then read directly off squared coefficients.
"""

from __future__ import annotations

import math

import numpy as np

from uqpilot.errors import BasisError
from uqpilot.sampling.distributions import Distribution1D


def legendre_orthonormal(z: np.ndarray, max_degree: int) -> np.ndarray:
    """Rows: degrees 0..max_degree evaluated at z in [-1, 1].

    Orthonormal under the uniform probability measure: sqrt(2n+1) P_n.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty((max_degree + 1, len(z)))
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = z
    for n in range(1, max_degree):
        out[n + 1] = ((2 * n + 1) * z * out[n] - n * out[n - 1]) / (n + 1)
    scale = np.sqrt(2 * np.arange(max_degree + 1) + 1.0)
    return out * scale[:, None]


def hermite_orthonormal(z: np.ndarray, max_degree: int) -> np.ndarray:
    """Rows: He_n(z) / sqrt(n!) for degrees 0..max_degree."""
    z = np.asarray(z, dtype=float)
    out = np.empty((max_degree + 1, len(z)))
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = z
    for n in range(1, max_degree):
        out[n + 1] = z * out[n] - n * out[n - 1]
    scale = np.array([1.0 / math.sqrt(math.factorial(n)) for n in range(max_degree + 1)])
    return out * scale[:, None]


def to_reference(dist: Distribution1D, x: np.ndarray) -> np.ndarray:
    """Map physical values into the basis reference domain."""
    x = np.asarray(x, dtype=float)
    if dist.variant == "uniform":
        lo, hi = dist.args
        return 2.0 * (x - lo) / (hi - lo) - 1.0
    if dist.variant == "normal":
        mu, sigma = dist.args
        return (x - mu) / sigma
    raise BasisError(f"no polynomial basis for {dist.variant!r} inputs")


def evaluate_basis(dist: Distribution1D, x: np.ndarray, max_degree: int) -> np.ndarray:
    z = to_reference(dist, x)
    if dist.variant == "uniform":
        return legendre_orthonormal(z, max_degree)
    return hermite_orthonormal(z, max_degree)
