"""Model-agnostic and gradient-based feature attribution methods.

Every method is a pure function of (model, data, seed) and safe to run
concurrently. Local methods produce one attribution row per explained
sample; ``aggregate_local`` turns such a matrix into the global
mean-|attribution| view with its standard deviation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import CLASSIFICATION


class ExplainError(ValueError):
    pass


@dataclass(frozen=True)
class AttributionVector:
    """Per-feature scores with a dispersion (std across repeats/samples)."""

    values: np.ndarray
    dispersion: np.ndarray
    method: str = ""
    model: str = ""
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        d = np.asarray(self.dispersion, dtype=np.float64)
        if v.shape != d.shape or v.ndim != 1:
            raise ExplainError("values and dispersion must be 1-D and equal length")
        if (d < 0).any():
            raise ExplainError("dispersion must be non-negative")
        v.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "dispersion", d)

    @property
    def n_features(self) -> int:
        return self.values.shape[0]


def attribution(values, method="", model="", dispersion=None, flags=()):
    values = np.asarray(values, dtype=np.float64)
    if dispersion is None:
        dispersion = np.zeros_like(values)
    return AttributionVector(values, dispersion, method, model, tuple(flags))


@dataclass(frozen=True)
class AttributionMatrix:
    """Rows = explained samples, columns = features."""

    values: np.ndarray
    sample_ids: tuple[int, ...]
    method: str = ""
    model: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != len(self.sample_ids):
            raise ExplainError("attribution matrix shape mismatch")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))


@dataclass(frozen=True)
class ExplanationRule:
    """An interval over one feature supporting one class."""

    feature_index: int
    lower: float
    upper: float
    direction: int  # 1 supports class 1, 0 supports class 0
    weight: float

    def render(self, name: str) -> str:
        if self.lower == -np.inf:
            return f"{name} <= {self.upper:.2f}"
        if self.upper == np.inf:
            return f"{name} > {self.lower:.2f}"
        return f"{self.lower:.2f} < {name} <= {self.upper:.2f}"


@dataclass(frozen=True)
class LocalExplanation:
    sample_id: int
    attribution: np.ndarray
    rules: tuple[ExplanationRule, ...]
    predicted_proba: tuple[float, ...]

    def __post_init__(self):
        a = np.asarray(self.attribution, dtype=np.float64)
        a.setflags(write=False)
        object.__setattr__(self, "attribution", a)
        object.__setattr__(self, "rules", tuple(self.rules))


@dataclass(frozen=True)
class Curve:
    """Feature-response curve: 1-D response (PDP/ALE) or per-sample rows (ICE)."""

    feature_index: int
    grid: np.ndarray
    response: np.ndarray
    kind: str = "pdp"  # pdp | ice | ale
    sample_ids: tuple[int, ...] = ()

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        r = np.asarray(self.response, dtype=np.float64)
        if g.ndim != 1 or len(g) < 1:
            raise ExplainError("grid must be 1-D and non-empty")
        if not np.all(np.diff(g) > 0):
            raise ExplainError("grid must be strictly increasing")
        if r.shape[-1] != g.shape[0]:
            raise ExplainError("response length must equal grid length")
        g.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "response", r)


@dataclass(frozen=True)
class CounterfactualResult:
    points: np.ndarray
    change_freq: AttributionVector
    found: bool

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)


def scalar_output(model, X) -> np.ndarray:
    """The single number the attribution methods explain.

    Binary classification: probability of class 1 (positive attributions
    push toward class 1). Regression: the prediction itself.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if model.task == CLASSIFICATION:
        if model.n_classes != 2:
            raise ExplainError("scalar output is defined for binary classifiers")
        return model.predict_proba(X)[:, 1]
    return model.predict(X)


def aggregate_local(matrix: AttributionMatrix) -> AttributionVector:
    """Global view of local attributions: mean and std of |attribution|."""
    if matrix.values.shape[0] < 1:
        raise ExplainError("need at least one explained sample")
    magnitudes = np.abs(matrix.values)
    return AttributionVector(
        magnitudes.mean(axis=0), magnitudes.std(axis=0),
        matrix.method, matrix.model,
    )


from .permutation import permutation_importance
from .shapley import kernel_shap
from .lime import lime_explain
from .curves import ale, pdp_ice
from .gradients import integrated_gradients
from .counterfactual import counterfactual

__all__ = [
    "AttributionMatrix",
    "AttributionVector",
    "CounterfactualResult",
    "Curve",
    "ExplainError",
    "ExplanationRule",
    "LocalExplanation",
    "aggregate_local",
    "ale",
    "attribution",
    "counterfactual",
    "integrated_gradients",
    "kernel_shap",
    "lime_explain",
    "pdp_ice",
    "permutation_importance",
    "scalar_output",
]
