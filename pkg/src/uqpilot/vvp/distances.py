"""Distribution distances: Hellinger, Jensen-Shannon, Wasserstein-1.

Hellinger and JS operate on histograms over a shared support; sample
inputs are first binned with Freedman-Diaconis widths computed on the
pooled data so both sides see identical edges. JS uses base-2 logs, so
both metrics live in [0, 1]. Wasserstein-1 works directly on samples
through the quantile-function formulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uqpilot.errors import BinningError, EmptyInput

EDGE_TOL = 1e-12
MAX_BINS = 512


@dataclass(frozen=True)
class EmpiricalDist:
    """Sample form (raw draws) or histogram form (edges + masses)."""

    samples: np.ndarray | None = None
    edges: np.ndarray | None = None
    masses: np.ndarray | None = None

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDist":
        x = np.asarray(values, dtype=float).ravel()
        if x.size == 0:
            raise EmptyInput("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise EmptyInput("samples must be finite")
        return cls(samples=x)

    @classmethod
    def from_histogram(cls, edges, masses) -> "EmpiricalDist":
        e = np.asarray(edges, dtype=float)
        m = np.asarray(masses, dtype=float)
        if e.ndim != 1 or len(e) != len(m) + 1 or len(m) < 1:
            raise BinningError("histogram needs len(edges) == len(masses) + 1 >= 2")
        if not np.all(np.diff(e) > 0):
            raise BinningError("bin edges must be strictly increasing")
        if np.any(m < 0):
            raise BinningError("masses must be non-negative")
        total = m.sum()
        if total <= 0:
            raise BinningError("histogram carries no mass")
        return cls(edges=e, masses=m / total)

    @property
    def is_histogram(self) -> bool:
        return self.edges is not None


def fd_edges(pooled: np.ndarray) -> np.ndarray:
    """Freedman-Diaconis shared bin edges over pooled data."""
    lo, hi = float(pooled.min()), float(pooled.max())
    if hi - lo <= 0:
        return np.array([lo - 0.5, lo + 0.5])
    q75, q25 = np.percentile(pooled, [75, 25])
    iqr = q75 - q25
    width = 2.0 * iqr / len(pooled) ** (1 / 3) if iqr > 0 else 0.0
    if width <= 0:
        nbins = max(1, int(np.ceil(np.sqrt(len(pooled)))))
    else:
        nbins = max(1, int(np.ceil((hi - lo) / width)))
    nbins = min(nbins, MAX_BINS)
    return np.linspace(lo, hi, nbins + 1)


def _bin_samples(x: np.ndarray, edges: np.ndarray) -> np.ndarray:
    # out-of-range samples are clipped into the end bins so mass is kept
    clipped = np.clip(x, edges[0], edges[-1])
    counts, _ = np.histogram(clipped, bins=edges)
    return counts / counts.sum()


def as_masses(p: EmpiricalDist, q: EmpiricalDist) -> tuple[np.ndarray, np.ndarray]:
    """Common-support mass vectors for two distributions."""
    if p.is_histogram and q.is_histogram:
        if len(p.edges) != len(q.edges) or np.any(np.abs(p.edges - q.edges) > EDGE_TOL):
            raise BinningError("histogram bin edges do not match")
        return p.masses, q.masses
    if p.is_histogram:
        return p.masses, _bin_samples(q.samples, p.edges)
    if q.is_histogram:
        return _bin_samples(p.samples, q.edges), q.masses
    edges = fd_edges(np.concatenate([p.samples, q.samples]))
    return _bin_samples(p.samples, edges), _bin_samples(q.samples, edges)


def hellinger(p: EmpiricalDist, q: EmpiricalDist) -> float:
    """H(p, q) = sqrt(sum (sqrt(p_i) - sqrt(q_i))^2) / sqrt(2), in [0, 1]."""
    pm, qm = as_masses(p, q)
    h = np.sqrt(np.sum((np.sqrt(pm) - np.sqrt(qm)) ** 2) / 2.0)
    return float(min(h, 1.0))


def jensen_shannon_dist(p: EmpiricalDist, q: EmpiricalDist) -> float:
    """sqrt of the JS divergence against the even mixture, base-2 logs."""
    pm, qm = as_masses(p, q)
    m = 0.5 * (pm + qm)
    div = 0.5 * _kl(pm, m) + 0.5 * _kl(qm, m)
    return float(min(np.sqrt(max(div, 0.0)), 1.0))


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def wasserstein1(p_samples, q_samples) -> float:
    """1-D earth mover's distance via the CDF-difference integral."""
    x = np.sort(np.asarray(p_samples, dtype=float).ravel())
    y = np.sort(np.asarray(q_samples, dtype=float).ravel())
    if x.size == 0 or y.size == 0:
        raise EmptyInput("wasserstein1 needs non-empty samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise EmptyInput("samples must be finite")
    if x.size == y.size:
        return float(np.mean(np.abs(x - y)))
    values = np.concatenate([x, y])
    values.sort(kind="mergesort")
    deltas = np.diff(values)
    x_cdf = np.searchsorted(x, values[:-1], side="right") / x.size
    y_cdf = np.searchsorted(y, values[:-1], side="right") / y.size
    return float(np.sum(np.abs(x_cdf - y_cdf) * deltas))
