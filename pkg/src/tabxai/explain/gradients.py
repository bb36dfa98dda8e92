"""Integrated gradients: midpoint-rule path integral from a baseline."""

from __future__ import annotations

import numpy as np

from . import AttributionVector, ExplainError, scalar_output


def integrated_gradients(model, x, baseline, n_steps: int = 256
                         ) -> tuple[AttributionVector, float]:
    """Attribution_i = (x_i - baseline_i) * mean path gradient_i.

    Path points are midpoints of n_steps equal sub-intervals. Returns the
    attribution plus the completeness gap
    |sum(attr) - (f(x) - f(baseline))|, which shrinks as n_steps grows.
    """
    if not getattr(model, "differentiable", False):
        raise ExplainError(f"{model.family} has no gradients")
    if n_steps < 2:
        raise ExplainError("n_steps must be >= 2")
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    baseline = np.asarray(baseline, dtype=np.float64).reshape(-1)
    if x.shape != baseline.shape:
        raise ExplainError("x and baseline must have equal length")
    diff = x - baseline
    grad_sum = np.zeros_like(x)
    for t in range(n_steps):
        alpha = (t + 0.5) / n_steps
        grad_sum += model.gradient(baseline + alpha * diff)
    attr = diff * grad_sum / n_steps
    f_x = float(scalar_output(model, x.reshape(1, -1))[0])
    f_b = float(scalar_output(model, baseline.reshape(1, -1))[0])
    gap = abs(float(attr.sum()) - (f_x - f_b))
    return AttributionVector(attr, np.zeros_like(attr), method="intgrad"), gap
