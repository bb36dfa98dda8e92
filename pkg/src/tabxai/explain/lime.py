"""Local surrogate explanations over quartile-binned features.

Features are discretized into quartile bins of the reference data.
Perturbations re-draw a bin per feature and sample a value from the
training points inside the drawn bin; the surrogate is a weighted ridge
regression on same-bin-as-the-instance indicators with an exponential
kernel on binary distance. The top coefficients are reported as interval
rules like "0.25 < F3 <= 0.50" whose interval always contains the
explained sample's actual value.
"""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from . import ExplainError, ExplanationRule, LocalExplanation, scalar_output

RIDGE_ALPHA = 1.0


class _Discretizer:
    """Quartile bins per feature; only constant features are excluded.

    Edges are kept strictly below the column maximum so every bin holds at
    least one training value; skewed columns whose quartiles all collapse
    (e.g. mostly-one binaries) fall back to a single midpoint edge.
    """

    def __init__(self, X: np.ndarray):
        self.edges: list[np.ndarray] = []
        self.bin_values: list[list[np.ndarray]] = []
        self.active: list[bool] = []
        for j in range(X.shape[1]):
            col = X[:, j]
            lo, hi = col.min(), col.max()
            edges = np.unique(np.percentile(col, [25, 50, 75]))
            edges = edges[(edges >= lo) & (edges < hi)]
            if len(edges) == 0:
                if lo == hi:  # constant column: no bins, no rules
                    self.edges.append(edges)
                    self.bin_values.append([])
                    self.active.append(False)
                    continue
                edges = np.array([0.5 * (lo + hi)])
            self.active.append(True)
            self.edges.append(edges)
            values = []
            for b in range(len(edges) + 1):
                lo = -np.inf if b == 0 else edges[b - 1]
                hi = np.inf if b == len(edges) else edges[b]
                inside = col[(col > lo) & (col <= hi)]
                values.append(inside)
            self.bin_values.append(values)

    def n_bins(self, j: int) -> int:
        return len(self.edges[j]) + 1

    def bin_of(self, j: int, v: float) -> int:
        return int(np.searchsorted(self.edges[j], v, side="left"))

    def interval(self, j: int, b: int) -> tuple[float, float]:
        edges = self.edges[j]
        lo = -np.inf if b == 0 else float(edges[b - 1])
        hi = np.inf if b == len(edges) else float(edges[b])
        return lo, hi

    def draw_value(self, j: int, b: int, rng) -> float:
        pool = self.bin_values[j][b]
        if len(pool):
            return float(pool[rng.integers(0, len(pool))])
        lo, hi = self.interval(j, b)
        return float(rng.uniform(lo, hi))


def lime_explain(model, x, data: Dataset, n_perturbations: int = 1000,
                 n_rules: int = 10, seed: int = 0,
                 sample_id: int = 0) -> LocalExplanation:
    if n_perturbations < 2:
        raise ExplainError("need at least 2 perturbations")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    d = x.shape[0]
    if d != data.n_features:
        raise ExplainError("x and data disagree on feature count")
    rng = np.random.default_rng(seed)
    disc = _Discretizer(data.features)
    x_bins = [disc.bin_of(j, x[j]) if disc.active[j] else 0 for j in range(d)]

    indicators = np.ones((n_perturbations, d))
    points = np.tile(x, (n_perturbations, 1))
    for i in range(1, n_perturbations):  # row 0 is the instance itself
        for j in range(d):
            if not disc.active[j]:
                continue
            b = int(rng.integers(0, disc.n_bins(j)))
            if b == x_bins[j]:
                continue
            indicators[i, j] = 0.0
            points[i, j] = disc.draw_value(j, b, rng)

    y = scalar_output(model, points)
    width = 0.75 * np.sqrt(d)
    dist_sq = (1.0 - indicators).sum(axis=1)
    weights = np.exp(-dist_sq / width ** 2)

    active_idx = [j for j in range(d) if disc.active[j]]
    A = np.hstack([np.ones((n_perturbations, 1)), indicators[:, active_idx]])
    W = weights
    reg = RIDGE_ALPHA * np.eye(A.shape[1])
    reg[0, 0] = 0.0  # intercept unpenalized
    beta = np.linalg.solve(A.T @ (A * W[:, None]) + reg, A.T @ (W * y))

    coef = np.zeros(d)
    for pos, j in enumerate(active_idx):
        coef[j] = beta[1 + pos]

    order = sorted(active_idx, key=lambda j: (-abs(coef[j]), j))
    rules = []
    for j in order[:n_rules]:
        lo, hi = disc.interval(j, x_bins[j])
        rules.append(ExplanationRule(j, lo, hi,
                                     direction=1 if coef[j] > 0 else 0,
                                     weight=float(coef[j])))

    if model.task == CLASSIFICATION:
        proba = tuple(float(p) for p in model.predict_proba(x)[0])
    else:
        proba = (float(model.predict(x)[0]),)
    return LocalExplanation(sample_id, coef, tuple(rules), proba)
