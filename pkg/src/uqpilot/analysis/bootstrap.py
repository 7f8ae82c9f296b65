"""Percentile bootstrap confidence intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from uqpilot.errors import DomainError, EmptyInput


@dataclass(frozen=True)
class BootstrapCI:
    statistic: str
    point: float
    lower: float
    upper: float
    confidence: float
    replicates: int
    seed: int


def _statistic_fn(name: str):
    if name == "mean":
        return lambda m: np.mean(m, axis=1)
    if name == "variance":
        return lambda m: np.var(m, axis=1, ddof=1)
    if name.startswith("quantile(") and name.endswith(")"):
        q = float(name[len("quantile("):-1])
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"quantile level must be in [0, 1], got {q}")
        return lambda m: np.quantile(m, q, axis=1)
    raise DomainError(f"unknown statistic {name!r}; use mean, variance, or quantile(q)")


def bootstrap(
    samples,
    statistic: str = "mean",
    B: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
) -> BootstrapCI:
    """Percentile interval at confidence 1-alpha from B resamples."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInput("bootstrap needs at least one sample")
    if B < 100:
        raise DomainError(f"need B >= 100 replicates, got {B}")
    fn = _statistic_fn(statistic)
    rng = np.random.Generator(np.random.Philox(key=seed))
    idx = rng.integers(0, x.size, size=(B, x.size))
    stats = fn(x[idx])
    point = float(fn(x[None, :])[0])
    lower = float(np.quantile(stats, alpha / 2))
    upper = float(np.quantile(stats, 1 - alpha / 2))
    return BootstrapCI(
        statistic=statistic,
        point=point,
        lower=lower,
        upper=upper,
        confidence=1 - alpha,
        replicates=B,
        seed=seed,
    )
