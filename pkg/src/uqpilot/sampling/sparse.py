"""Smolyak sparse grids via the combination technique.

A level-L grid over d dimensions is the signed sum of component tensor
grids Q_{k_1} x ... x Q_{k_d} over multi-indices k with |k|_1 <= L,
where the combination coefficient

    c_k = (-1)^(L - |k|) * C(d - 1, L - |k|)   for L-d+1 <= |k| <= L

and zero otherwise. Component provenance is kept so spectral projection
can later process each tensor grid separately and sum with c_k.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from uqpilot.errors import DomainError, SizeError
from uqpilot.sampling.quadrature import (
    TENSOR_SIZE_CAP,
    QuadRule,
    cc_num_nodes,
    rule_for,
    tensor_grid,
)

MERGE_TOL = 1e-12


def order_at_level(rule: str, level: int) -> int:
    """Growth rule: CC uses m(0)=1, m(l)=2^l+1; Gauss rules grow linearly."""
    return cc_num_nodes(level) if rule == "clenshaw-curtis" else level + 1


@dataclass(frozen=True)
class Component:
    """One tensor grid of the combination, with its signed coefficient."""

    index: tuple[int, ...]             # per-dimension levels
    coefficient: int
    rows: np.ndarray                   # indices into the merged point list
    weights: np.ndarray                # tensor-product weights, sum 1
    orders: tuple[int, ...]            # 1-D rule orders per dimension


@dataclass(frozen=True)
class SparseGrid:
    dimension: int
    level: int
    rules: tuple[str, ...]             # per-dimension 1-D rule names
    points: np.ndarray                 # (N, d) merged nodes, reference domain
    weights: np.ndarray                # (N,) combined weights, sum 1
    components: list[Component] = field(repr=False)
    merged: bool = True

    def __len__(self) -> int:
        return len(self.points)


def combination_coefficient(d: int, level: int, norm: int) -> int:
    q = level - norm
    if q < 0 or q > d - 1:
        return 0
    return (-1) ** q * math.comb(d - 1, q)


def _merge_key(point: np.ndarray) -> tuple[int, ...]:
    # bucket coordinates on a MERGE_TOL lattice; nested rules produce
    # bitwise-equal duplicates so bucket boundaries are not a concern.
    return tuple(int(round(x / MERGE_TOL)) for x in point)


def smolyak_grid(
    d: int,
    level: int,
    rules: list[str] | str = "clenshaw-curtis",
    merge: bool | None = None,
) -> SparseGrid:
    """Build the level-`level` Smolyak grid over `d` dimensions.

    `rules` is a single 1-D rule name or one per dimension. Duplicate
    points are merged (weights summed) unless any dimension uses a
    non-nested rule with `merge=None`, or `merge=False` is forced.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if level < 0:
        raise DomainError(f"level must be >= 0, got {level}")
    if isinstance(rules, str):
        rules = [rules] * d
    if len(rules) != d:
        raise DomainError(f"need one rule per dimension ({d}), got {len(rules)}")
    if merge is None:
        # non-nested Gauss-Hermite dimensions disable merging
        merge = all(r != "gauss-hermite" for r in rules)

    rule_cache: dict[tuple[str, int], QuadRule] = {}

    def rule_at(dim: int, lvl: int) -> QuadRule:
        name = rules[dim]
        # clenshaw_curtis() takes a level, Gauss constructors take an order
        arg = lvl if name == "clenshaw-curtis" else lvl + 1
        key = (name, arg)
        if key not in rule_cache:
            rule_cache[key] = rule_for(name, arg)
        return rule_cache[key]

    index_to_row: dict[tuple[int, ...], int] = {}
    merged_points: list[np.ndarray] = []
    merged_weights: list[float] = []
    components: list[Component] = []
    budget = 0

    for k in itertools.product(range(level + 1), repeat=d):
        norm = sum(k)
        if norm > level:
            continue
        coeff = combination_coefficient(d, level, norm)
        if coeff == 0:
            continue
        comp_rules = [rule_at(i, k[i]) for i in range(d)]
        budget += math.prod(r.order for r in comp_rules)
        if budget > TENSOR_SIZE_CAP:
            raise SizeError(f"sparse grid enumeration exceeds cap {TENSOR_SIZE_CAP}")
        pts, wts = tensor_grid(comp_rules)
        rows = np.empty(len(pts), dtype=np.int64)
        for i, p in enumerate(pts):
            row = index_to_row.get(_merge_key(p)) if merge else None
            if row is None:
                row = len(merged_points)
                if merge:
                    index_to_row[_merge_key(p)] = row
                merged_points.append(p)
                merged_weights.append(0.0)
            rows[i] = row
            merged_weights[row] += coeff * wts[i]
        components.append(
            Component(
                index=k,
                coefficient=coeff,
                rows=rows,
                weights=wts,
                orders=tuple(r.order for r in comp_rules),
            )
        )

    return SparseGrid(
        dimension=d,
        level=level,
        rules=tuple(rules),
        points=np.array(merged_points),
        weights=np.array(merged_weights),
        components=components,
        merged=merge,
    )
