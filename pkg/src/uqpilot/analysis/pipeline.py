"""Stage analysis: from collated QoI vectors to moments and Sobol reports.

Quadrature stages (sc/pce) rebuild their grid deterministically from the
stored sampler spec, match runs to grid points by run order, and go
through pseudo-spectral projection. MC/halton stages get sample moments
and bootstrap intervals instead.
"""

from __future__ import annotations

import numpy as np

from uqpilot.analysis.bootstrap import BootstrapCI, bootstrap
from uqpilot.analysis.spectral import (
    SobolReport,
    SpectralSurrogate,
    moments,
    project_sparse,
    project_tensor,
    sobol,
)
from uqpilot.campaign.store import CampaignStore
from uqpilot.errors import MissingRunError, SamplerError
from uqpilot.sampling.quadrature import clenshaw_curtis, gauss_hermite, gauss_legendre
from uqpilot.sampling.samplers import SamplerSpec, rule_name_for
from uqpilot.sampling.sparse import order_at_level, smolyak_grid


def stage_sampler(store: CampaignStore, stage_id: int) -> SamplerSpec:
    import json

    return SamplerSpec.from_json(json.loads(store.stage(stage_id)["sampler_json"]))


def check_stage_collated(store: CampaignStore, stage_id: int, allow_missing: bool):
    """Quadrature stages must be fully collated; MC may opt out."""
    spec = stage_sampler(store, stage_id)
    missing = [
        r["run_id"] for r in store.runs(stage_id=stage_id) if r["status"] != "COLLATED"
    ]
    if not missing:
        return spec, []
    if spec.is_quadrature or not allow_missing:
        raise MissingRunError(
            f"stage {stage_id} has {len(missing)} non-collated runs: "
            f"{missing[:10]}{'...' if len(missing) > 10 else ''}",
            run_ids=missing,
        )
    return spec, missing


def _stage_values(store: CampaignStore, stage_id: int, qoi: str):
    """(index, run_ids, value matrix) for the stage's collated runs."""
    index, rows = store.load_frame(qoi, stage_id=stage_id)
    if not rows:
        raise MissingRunError(f"no collated values for qoi {qoi!r} in stage {stage_id}")
    run_ids = [rid for rid, _ in rows]
    values = np.array([v for _, v in rows], dtype=float)
    return (None if index is None else np.asarray(index, dtype=float)), run_ids, values


def surrogate_for_stage(
    store: CampaignStore, stage_id: int, qoi: str
) -> SpectralSurrogate:
    """Project a fully collated quadrature stage into a spectral surrogate."""
    spec, _ = check_stage_collated(store, stage_id, allow_missing=False)
    if not spec.is_quadrature:
        raise SamplerError(
            f"stage {stage_id} used sampler {spec.variant!r}; spectral analysis "
            "needs an sc or pce stage"
        )
    params = store.parameters()
    active = [p for p in params if not p.distribution.is_constant]
    names = [p.name for p in active]
    dists = [p.distribution for p in active]
    index, run_ids, values = _stage_values(store, stage_id, qoi)

    expected = store.stage(stage_id)["n_runs"]
    if len(run_ids) != expected:
        raise MissingRunError(
            f"stage {stage_id}: {len(run_ids)} collated of {expected} runs"
        )

    rules = [rule_name_for(d, spec.growth) for d in dists]
    if spec.variant == "sc" and spec.sparse:
        grid = smolyak_grid(len(dists), spec.level, rules)
        _check_points(store, stage_id, run_ids, grid.points, dists, names)
        return project_sparse(values, grid, dists, names, qoi=qoi, index=index)

    level = spec.level if spec.variant == "sc" else spec.order
    one_d = []
    for rule in rules:
        if rule == "gauss-legendre":
            one_d.append(gauss_legendre(order_at_level(rule, level)))
        elif rule == "gauss-hermite":
            one_d.append(gauss_hermite(order_at_level(rule, level)))
        else:
            one_d.append(clenshaw_curtis(level))
    from uqpilot.sampling.quadrature import tensor_grid

    points, _ = tensor_grid(one_d)
    _check_points(store, stage_id, run_ids, points, dists, names)
    total_degree = spec.order if spec.variant == "pce" else None
    return project_tensor(
        values, one_d, dists, points, names, qoi=qoi, index=index,
        total_degree=total_degree,
    )


def _check_points(store, stage_id, run_ids, ref_points, dists, names):
    """Stored run parameters must match the rebuilt grid, point for point."""
    if len(run_ids) != len(ref_points):
        raise MissingRunError(
            f"stage {stage_id}: {len(run_ids)} runs vs {len(ref_points)} grid points"
        )
    rows = {r["run_id"]: store.run_params(r) for r in store.runs(stage_id=stage_id)}
    for rid, zp in zip(run_ids, ref_points):
        params = rows[rid]
        for (name, dist), z in zip(zip(names, dists), zp):
            expect = dist.from_reference(float(z))
            got = params[name]
            if abs(got - expect) > 1e-9 * max(1.0, abs(expect)):
                raise MissingRunError(
                    f"run {rid}: parameter {name}={got} does not match grid value "
                    f"{expect}; store and sampler disagree"
                )


def analyze_quadrature_stage(store: CampaignStore, stage_id: int, qoi: str) -> SobolReport:
    return sobol(surrogate_for_stage(store, stage_id, qoi))


def analyze_mc_stage(
    store: CampaignStore,
    stage_id: int,
    qoi: str,
    allow_missing: bool = False,
    B: int = 1000,
    alpha: float = 0.05,
    seed: int = 0,
):
    """Sample moments plus bootstrap CIs per time point for an MC stage."""
    spec, missing = check_stage_collated(store, stage_id, allow_missing)
    if spec.is_quadrature:
        raise SamplerError(f"stage {stage_id} is a quadrature stage")
    index, run_ids, values = _stage_values(store, stage_id, qoi)
    mean = values.mean(axis=0)
    var = values.var(axis=0, ddof=1) if len(run_ids) > 1 else np.zeros(values.shape[1])
    cis: list[BootstrapCI] = [
        bootstrap(values[:, t], "mean", B=B, alpha=alpha, seed=seed + t)
        for t in range(values.shape[1])
    ]
    return {
        "index": index,
        "n_runs": len(run_ids),
        "missing": missing,
        "mean": mean,
        "variance": var,
        "mean_ci": cis,
    }
