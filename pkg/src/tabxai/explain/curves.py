"""Feature-response curves: PDP with ICE rows, and accumulated local effects."""

from __future__ import annotations

import numpy as np

from ..data import Dataset
from . import Curve, ExplainError, scalar_output


def _quantile_grid(col: np.ndarray, n_points: int) -> np.ndarray:
    grid = np.unique(np.quantile(col, np.linspace(0.0, 1.0, n_points)))
    return grid


def pdp_ice(model, data: Dataset, feature: int,
            grid_size: int = 10) -> tuple[Curve, Curve]:
    """Equally spaced quantile grid; ICE row s = f(sample s with the
    feature pinned to the grid value); PDP = column mean of ICE."""
    if grid_size < 2:
        raise ExplainError("grid_size must be >= 2")
    col = data.features[:, feature]
    grid = _quantile_grid(col, grid_size)
    if len(grid) < 2:
        raise ExplainError(f"feature {feature} is constant; no PDP grid")
    ice = np.empty((data.n_samples, len(grid)))
    X = data.features.copy()
    for g, value in enumerate(grid):
        X[:, feature] = value
        ice[:, g] = scalar_output(model, X)
    pdp = ice.mean(axis=0)
    sample_ids = tuple(range(data.n_samples))
    return (Curve(feature, grid, pdp, "pdp"),
            Curve(feature, grid, ice, "ice", sample_ids))


def ale(model, data: Dataset, feature: int, n_bins: int = 10) -> Curve:
    """Centered cumulative sum of within-bin mean prediction differences.

    Bins are quantile-based; an empty bin is merged into its left
    neighbour. The response is anchored at the lowest edge and centered
    so the occupancy-weighted mean over samples is zero.
    """
    if n_bins < 1:
        raise ExplainError("n_bins must be >= 1")
    col = data.features[:, feature]
    edges = np.unique(np.quantile(col, np.linspace(0.0, 1.0, n_bins + 1)))
    if len(edges) < 2:
        raise ExplainError(f"feature {feature} is constant; no ALE bins")

    # bin k spans (edges[k], edges[k+1]]; the lowest bin also takes the minimum
    assign = np.searchsorted(edges[1:-1], col, side="left")
    counts = np.bincount(assign, minlength=len(edges) - 1)
    while (counts == 0).any():  # merge empty bins leftward
        k = int(np.flatnonzero(counts == 0)[0])
        edges = np.delete(edges, k)  # drop the lower edge of the empty bin
        assign = np.searchsorted(edges[1:-1], col, side="left")
        counts = np.bincount(assign, minlength=len(edges) - 1)

    n_eff = len(edges) - 1
    deltas = np.zeros(n_eff)
    X = data.features
    for k in range(n_eff):
        members = np.flatnonzero(assign == k)
        lo_pts = X[members].copy()
        hi_pts = X[members].copy()
        lo_pts[:, feature] = edges[k]
        hi_pts[:, feature] = edges[k + 1]
        deltas[k] = float(np.mean(scalar_output(model, hi_pts)
                                  - scalar_output(model, lo_pts)))
    cum = np.concatenate([[0.0], np.cumsum(deltas)])
    center = float((counts * cum[1:]).sum() / counts.sum())
    return Curve(feature, edges, cum - center, "ale")
