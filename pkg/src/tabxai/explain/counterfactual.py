"""Counterfactual search: random restarts plus greedy coordinate refinement.

A restart draws a point uniformly inside the observed feature ranges; if
the model assigns it the target class, each coordinate is pulled back
toward the query point as far as the prediction allows (batched line scan
along the segment, keeping the class). The n_cfs closest results by L1
distance are kept, and the per-feature change frequency doubles as a
global attribution.
"""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from . import AttributionVector, CounterfactualResult, ExplainError

_SCAN_POINTS = 16
_RESTART_BATCH = 32


def counterfactual(model, x, target_class: int, data: Dataset,
                   n_cfs: int = 4, budget: int = 2000,
                   seed: int = 0) -> CounterfactualResult:
    if model.task != CLASSIFICATION:
        raise ExplainError("counterfactuals require a classifier")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    d = x.shape[0]

    def freq(points: np.ndarray) -> AttributionVector:
        if points.shape[0] == 0:
            return AttributionVector(np.zeros(d), np.zeros(d),
                                     method="counterfactual",
                                     flags=("none_found",))
        changed = np.abs(points - x) > 1e-9
        return AttributionVector(changed.mean(axis=0), np.zeros(d),
                                 method="counterfactual")

    if int(model.predict(x)[0]) == target_class:
        pts = x.reshape(1, -1)
        return CounterfactualResult(pts, freq(pts), True)

    lo = data.features.min(axis=0)
    hi = data.features.max(axis=0)
    rng = np.random.default_rng(seed)
    spent = 0
    candidates: list[tuple[float, np.ndarray]] = []

    while spent < budget:
        batch = lo + rng.random((_RESTART_BATCH, d)) * (hi - lo)
        preds = model.predict(batch)
        spent += len(batch)
        for z in batch[preds == target_class]:
            z = z.copy()
            for j in range(d):
                if z[j] == x[j] or spent >= budget:
                    continue
                # candidate values from x_j (ideal) toward the current z_j
                steps = x[j] + (z[j] - x[j]) * np.arange(_SCAN_POINTS) / _SCAN_POINTS
                trials = np.tile(z, (len(steps), 1))
                trials[:, j] = steps
                ok = model.predict(trials) == target_class
                spent += len(steps)
                if ok.any():
                    z[j] = steps[int(np.argmax(ok))]  # closest to x that works
            spent += 1
            if int(model.predict(z.reshape(1, -1))[0]) == target_class:
                candidates.append((float(np.abs(z - x).sum()), z))
            if spent >= budget:
                break

    candidates.sort(key=lambda c: c[0])
    unique: list[np.ndarray] = []
    for _, z in candidates:
        if not any(np.array_equal(z, u) for u in unique):
            unique.append(z)
        if len(unique) == n_cfs:
            break
    points = np.vstack(unique) if unique else np.empty((0, d))
    return CounterfactualResult(points, freq(points), bool(unique))
