from uqpilot.vvp.distances import (
    EmpiricalDist,
    fd_edges,
    hellinger,
    jensen_shannon_dist,
    wasserstein1,
)
from uqpilot.vvp.patterns import (
    AGGREGATORS,
    METRICS,
    EnsembleScore,
    SimilarityResult,
    ensemble_validate,
    mare,
    validate_similarity,
)

__all__ = [
    "AGGREGATORS",
    "EmpiricalDist",
    "EnsembleScore",
    "METRICS",
    "SimilarityResult",
    "ensemble_validate",
    "fd_edges",
    "hellinger",
    "jensen_shannon_dist",
    "mare",
    "validate_similarity",
    "wasserstein1",
]
