"""Permutation importance: score drop when one feature column is shuffled."""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .. import metrics as metrics_mod
from . import AttributionVector, ExplainError


def _score(model, X, y, metric: str) -> float:
    if model.task == CLASSIFICATION:
        scores = None
        if model.n_classes == 2:
            scores = model.predict_proba(X)[:, 1]
        report = metrics_mod.classification_report(y, model.predict(X), scores)
    else:
        report = metrics_mod.regression_report(y, model.predict(X))
    return metrics_mod.score_value(report, metric)


def permutation_importance(model, data: Dataset, metric: str,
                           n_repeats: int = 5, seed: int = 0) -> AttributionVector:
    """importance_j = baseline - mean score with column j permuted.

    Dispersion is the std over repeats (zero for a single repeat). The
    permutation draw order is fixed (repeat-major, feature-minor) so the
    result is a pure function of the seed.
    """
    if data.n_samples == 0:
        raise ExplainError("empty dataset")
    if not metrics_mod.valid_metric(metric, data.task):
        raise ExplainError(f"metric {metric!r} invalid for task {data.task}")
    if n_repeats < 1:
        raise ExplainError("n_repeats must be >= 1")
    rng = np.random.default_rng(seed)
    X, y = data.features, data.target
    baseline = _score(model, X, y, metric)
    drops = np.empty((n_repeats, data.n_features))
    for r in range(n_repeats):
        for j in range(data.n_features):
            perm = rng.permutation(data.n_samples)
            Xp = X.copy()
            Xp[:, j] = X[perm, j]
            drops[r, j] = baseline - _score(model, Xp, y, metric)
    return AttributionVector(drops.mean(axis=0), drops.std(axis=0),
                             method="permutation")
