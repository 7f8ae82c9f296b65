"""Validation patterns: distribution similarity and per-run ensemble scoring."""

from __future__ import annotations

import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from uqpilot.campaign.store import CampaignStore
from uqpilot.errors import DomainError, EmptyInput, MissingRunError, ScorerError
from uqpilot.vvp.distances import (
    EmpiricalDist,
    hellinger,
    jensen_shannon_dist,
    wasserstein1,
)

METRICS = ("hellinger", "jsd", "wasserstein1")
AGGREGATORS = ("mean", "weighted_mean", "max")


@dataclass(frozen=True)
class SimilarityResult:
    metric: str
    distance: float
    per_qoi: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class EnsembleScore:
    scorer: str
    aggregator: str
    aggregate: float
    per_run: dict[int, float] = field(default_factory=dict)


def metric_distance(metric: str, ensemble: EmpiricalDist, reference: EmpiricalDist) -> float:
    if metric == "hellinger":
        return hellinger(ensemble, reference)
    if metric == "jsd":
        return jensen_shannon_dist(ensemble, reference)
    if metric == "wasserstein1":
        if ensemble.is_histogram or reference.is_histogram:
            raise DomainError("wasserstein1 takes sample-form distributions")
        return wasserstein1(ensemble.samples, reference.samples)
    raise DomainError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")


def ensemble_distribution(
    store: CampaignStore, qoi: str, at: int | str = "final"
) -> EmpiricalDist:
    """Empirical distribution of a QoI over collated runs.

    `at` picks a time index (int), "final" for the last point, or
    "flat" to pool every time point of every run.
    """
    _, rows = store.load_frame(qoi)
    if not rows:
        raise MissingRunError(f"no collated values for qoi {qoi!r}")
    vectors = [np.asarray(v, dtype=float) for _, v in rows]
    if at == "flat":
        return EmpiricalDist.from_samples(np.concatenate(vectors))
    pos = -1 if at == "final" else int(at)
    return EmpiricalDist.from_samples(np.array([v[pos] for v in vectors]))


def validate_similarity(
    store: CampaignStore,
    qois: list[str],
    reference: EmpiricalDist | dict[str, EmpiricalDist],
    metric: str,
    at: int | str = "final",
) -> SimilarityResult:
    """Score the ensemble's QoI distribution(s) against a reference."""
    per_qoi: dict[str, float] = {}
    for qoi in qois:
        ref = reference[qoi] if isinstance(reference, dict) else reference
        per_qoi[qoi] = metric_distance(metric, ensemble_distribution(store, qoi, at), ref)
    overall = per_qoi[qois[0]] if len(qois) == 1 else float(np.mean(list(per_qoi.values())))
    return SimilarityResult(metric=metric, distance=overall, per_qoi=per_qoi)


def mare(values: np.ndarray, reference: np.ndarray) -> float:
    """Mean absolute relative error; zero reference entries fall back to
    absolute error so the score stays finite."""
    v = np.asarray(values, dtype=float)
    r = np.asarray(reference, dtype=float)
    if v.shape != r.shape:
        raise ScorerError(f"vector length {v.shape} vs reference {r.shape}")
    denom = np.where(np.abs(r) > 0, np.abs(r), 1.0)
    return float(np.mean(np.abs(v - r) / denom))


def _score_builtin(store: CampaignStore, qoi: str, reference: np.ndarray, run_id: int) -> float:
    _, rows = store.load_frame(qoi)
    for rid, values in rows:
        if rid == run_id:
            try:
                return mare(np.asarray(values), reference)
            except ScorerError as exc:
                raise ScorerError(f"run {run_id}: {exc}", run_id=run_id) from exc
    raise ScorerError(f"run {run_id} has no collated {qoi!r} vector", run_id=run_id)


def _score_external(command: list[str], run_dir: str, run_id: int) -> float:
    proc = subprocess.run(
        [*command, run_dir], capture_output=True, text=True, timeout=300
    )
    if proc.returncode != 0:
        raise ScorerError(
            f"run {run_id}: scorer exited {proc.returncode}: {proc.stderr.strip()}",
            run_id=run_id,
        )
    out = proc.stdout.strip().split()
    try:
        (token,) = out
        return float(token)
    except ValueError as exc:
        raise ScorerError(
            f"run {run_id}: scorer must print exactly one real, got {proc.stdout!r}",
            run_id=run_id,
        ) from exc


def ensemble_validate(
    store: CampaignStore,
    scorer: str | list[str],
    aggregator: str = "mean",
    qoi: str | None = None,
    reference: np.ndarray | None = None,
    weights: dict[int, float] | None = None,
    run_ids: list[int] | None = None,
) -> EnsembleScore:
    """Score each collated run and aggregate.

    `scorer` is "mare" (needs qoi + reference vector) or an external
    command list invoked as `cmd <run_dir>` printing one real. Per-run
    scores are recorded in the store.
    """
    if aggregator not in AGGREGATORS:
        raise DomainError(
            f"unknown aggregator {aggregator!r}; choose from {', '.join(AGGREGATORS)}"
        )
    rows = store.runs(status="COLLATED")
    if run_ids is not None:
        wanted = set(run_ids)
        rows = [r for r in rows if r["run_id"] in wanted]
    if not rows:
        raise EmptyInput("no collated runs to validate")

    builtin = isinstance(scorer, str)
    if builtin and scorer != "mare":
        raise DomainError(f"unknown built-in scorer {scorer!r}")
    if builtin and (qoi is None or reference is None):
        raise DomainError("mare scorer needs a qoi and a reference vector")

    scorer_name = scorer if builtin else " ".join(scorer)
    per_run: dict[int, float] = {}
    for row in rows:
        rid = row["run_id"]
        if builtin:
            score = _score_builtin(store, qoi, np.asarray(reference, dtype=float), rid)
        else:
            if not row["run_dir"]:
                raise ScorerError(f"run {rid} has no run directory", run_id=rid)
            score = _score_external(list(scorer), row["run_dir"], rid)
        per_run[rid] = score
        store.record_score(rid, scorer_name, score)

    values = np.array([per_run[rid] for rid in sorted(per_run)])
    if aggregator == "mean":
        aggregate = float(values.mean())
    elif aggregator == "max":
        aggregate = float(values.max())
    else:
        if weights is None:
            raise DomainError("weighted_mean needs per-run weights")
        w = np.array([weights[rid] for rid in sorted(per_run)], dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise DomainError("weights must be non-negative with positive sum")
        aggregate = float(np.sum(w * values) / w.sum())
    return EnsembleScore(
        scorer=scorer_name, aggregator=aggregator, aggregate=aggregate, per_run=per_run
    )
