"""Analytic test models with known variance decompositions.

All three take independent uniform(-1, 1) inputs; their exact first-
and total-order Sobol indices fall out of the ANOVA decomposition by
hand, which makes them the reference cases for both the spectral and
the pick-freeze estimators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from uqpilot.sampling.distributions import Distribution1D, uniform


@dataclass(frozen=True)
class AnalyticModel:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    dists: tuple[Distribution1D, ...]
    first: tuple[float, ...]
    total: tuple[float, ...]
    degree: int                       # max per-dimension polynomial degree

    def __call__(self, x) -> np.ndarray:
        return self.fn(np.atleast_2d(np.asarray(x, dtype=float)))

    @property
    def dimension(self) -> int:
        return len(self.dists)


# y = x1 + x2: V = 2/3, each main effect 1/3
ADDITIVE = AnalyticModel(
    "additive",
    lambda x: x[:, 0] + x[:, 1],
    (uniform(-1, 1), uniform(-1, 1)),
    first=(0.5, 0.5),
    total=(0.5, 0.5),
    degree=1,
)

# y = 3*x1: x2 inert
SINGLE_FACTOR = AnalyticModel(
    "single-factor",
    lambda x: 3.0 * x[:, 0],
    (uniform(-1, 1), uniform(-1, 1)),
    first=(1.0, 0.0),
    total=(1.0, 0.0),
    degree=1,
)

# y = x1 + x2 + x1*x2: V = 1/3 + 1/3 + 1/9 = 7/9
# S_i = (1/3)/(7/9) = 3/7, ST_i = (1/3 + 1/9)/(7/9) = 4/7
BILINEAR = AnalyticModel(
    "bilinear",
    lambda x: x[:, 0] + x[:, 1] + x[:, 0] * x[:, 1],
    (uniform(-1, 1), uniform(-1, 1)),
    first=(3 / 7, 3 / 7),
    total=(4 / 7, 4 / 7),
    degree=1,
)

ALL_MODELS = (ADDITIVE, SINGLE_FACTOR, BILINEAR)
