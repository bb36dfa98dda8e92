"""Consensus procedures merging attributions across models and methods.

Three kinds are provided: averaging one method's normalized attributions
across models, averaging one method's feature *ranks* across models, and
averaging feature ranks across methods for a single model. The first two
filter contributors by model quality (AUC or R^2) with an inclusive
cut-off; rank averaging is used across methods because different methods
score on incommensurable scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .explain import AttributionVector

DEFAULT_CUTOFF = 0.75

ATTRIBUTION_BY_METHOD = "attribution_by_method"
RANK_BY_METHOD = "rank_by_method"
RANK_BY_MODEL = "rank_by_model"


class ConsensusError(ValueError):
    pass


@dataclass(frozen=True)
class ModelScore:
    model: str
    score: float  # AUC for classification, R^2 for regression


@dataclass(frozen=True)
class ConsensusReport:
    kind: str
    subject: str  # method id for per-method kinds, model id for per-model
    included: tuple[str, ...]
    excluded: tuple[tuple[str, str], ...]  # (contributor, reason)
    ranking: tuple[tuple[int, float, float], ...]  # (feature, score, dispersion)
    ascending: bool  # True when lower scores rank first (mean ranks)

    def top_features(self, k: int) -> list[int]:
        return [f for f, _, _ in self.ranking[:k]]


def filter_models(scores: list[ModelScore], cutoff: float
                  ) -> tuple[list[ModelScore], list[ModelScore]]:
    """Inclusive filter: score >= cutoff is kept."""
    if not 0.0 <= cutoff <= 1.0:
        raise ConsensusError("cutoff must be in [0, 1]")
    kept = [s for s in scores if s.score >= cutoff]
    dropped = [s for s in scores if s.score < cutoff]
    return kept, dropped


def normalize_attribution(v: AttributionVector) -> AttributionVector:
    """Unit-L1 absolute attribution; an all-zero vector is returned as-is
    with a flag instead of dividing by zero."""
    mags = np.abs(v.values)
    total = mags.sum()
    if total == 0.0:
        return AttributionVector(v.values, v.dispersion, v.method, v.model,
                                 v.flags + ("all_zero",))
    return AttributionVector(mags / total, v.dispersion, v.method, v.model,
                             v.flags)


def _ranks(values: np.ndarray) -> np.ndarray:
    """Rank 1 = largest |value|; ties go to the lower feature index."""
    mags = np.abs(values)
    order = np.lexsort((np.arange(len(mags)), -mags))
    ranks = np.empty(len(mags))
    ranks[order] = np.arange(1, len(mags) + 1)
    return ranks


def _ordered(scores: np.ndarray, dispersion: np.ndarray, ascending: bool
             ) -> tuple[tuple[int, float, float], ...]:
    key = scores if ascending else -scores
    order = np.lexsort((np.arange(len(scores)), key))
    return tuple((int(j), float(scores[j]), float(dispersion[j])) for j in order)


def _check_lengths(contributions: dict[str, AttributionVector]):
    lengths = {v.n_features for v in contributions.values()}
    if len(lengths) > 1:
        raise ConsensusError("contributions disagree on feature count")


def _apply_cutoff(contributions: dict[str, AttributionVector],
                  scores: list[ModelScore], cutoff: float):
    by_id = {s.model: s for s in scores}
    missing = [m for m in contributions if m not in by_id]
    if missing:
        raise ConsensusError(f"no score for contributing models {missing}")
    kept, dropped = filter_models([by_id[m] for m in contributions], cutoff)
    if not kept:
        raise ConsensusError(
            f"no model passed the cut-off {cutoff}; lower it or retrain"
        )
    included = tuple(sorted(s.model for s in kept))
    excluded = tuple(sorted(
        (s.model, f"score {s.score:.6g} < cutoff {cutoff:.6g}") for s in dropped
    ))
    return included, excluded


def consensus_attribution_by_method(method: str,
                                    contributions: dict[str, AttributionVector],
                                    scores: list[ModelScore],
                                    cutoff: float = DEFAULT_CUTOFF
                                    ) -> ConsensusReport:
    """Mean of unit-L1 normalized |attribution| over models above cutoff."""
    if not contributions:
        raise ConsensusError("no contributions")
    _check_lengths(contributions)
    included, excluded = _apply_cutoff(contributions, scores, cutoff)
    stack = np.vstack([normalize_attribution(contributions[m]).values
                       for m in included])
    return ConsensusReport(
        ATTRIBUTION_BY_METHOD, method, included, excluded,
        _ordered(stack.mean(axis=0), stack.std(axis=0), ascending=False),
        ascending=False,
    )


def consensus_rank_by_method(method: str,
                             contributions: dict[str, AttributionVector],
                             scores: list[ModelScore],
                             cutoff: float = DEFAULT_CUTOFF) -> ConsensusReport:
    """Mean feature rank (1 = most attributed) over models above cutoff."""
    if not contributions:
        raise ConsensusError("no contributions")
    _check_lengths(contributions)
    included, excluded = _apply_cutoff(contributions, scores, cutoff)
    stack = np.vstack([_ranks(contributions[m].values) for m in included])
    return ConsensusReport(
        RANK_BY_METHOD, method, included, excluded,
        _ordered(stack.mean(axis=0), stack.std(axis=0), ascending=True),
        ascending=True,
    )


def consensus_rank_by_model(model: str,
                            contributions: dict[str, AttributionVector]
                            ) -> ConsensusReport:
    """Mean feature rank across explanation methods for one model.

    No quality filter here: the single model is assumed already vetted.
    """
    if not contributions:
        raise ConsensusError("no contributions")
    _check_lengths(contributions)
    included = tuple(sorted(contributions))
    stack = np.vstack([_ranks(contributions[m].values) for m in included])
    return ConsensusReport(
        RANK_BY_MODEL, model, included, (),
        _ordered(stack.mean(axis=0), stack.std(axis=0), ascending=True),
        ascending=True,
    )
