"""Model roster with a uniform fit/predict interface and grid search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .. import metrics as metrics_mod
from .base import (FORMAT_VERSION, ModelConfig, ModelError, TrainedModel,
                   load_model, save_model)
from .trees import DecisionTreeModel, GradientBoostingModel, RandomForestModel
from .neighbors import KNNModel
from .linear import LogisticRegressionModel
from .mlp import MLPModel

FAMILY_CLASSES: dict[str, type[TrainedModel]] = {
    "DT": DecisionTreeModel,
    "RF": RandomForestModel,
    "GBT": GradientBoostingModel,
    "KNN": KNNModel,
    "LOGREG": LogisticRegressionModel,
    "MLP": MLPModel,
}
FAMILIES = tuple(FAMILY_CLASSES)

KNOWN_HYPERPARAMETERS = {
    "DT": {"max_depth", "min_samples_split", "min_samples_leaf"},
    "RF": {"n_trees", "max_depth", "min_samples_split", "min_samples_leaf",
           "bootstrap", "max_features", "splitter"},
    "GBT": {"n_trees", "learning_rate", "max_depth", "reg_lambda",
            "min_child_weight", "min_samples_leaf"},
    "KNN": {"k"},
    "LOGREG": {"l2", "max_iter", "learning_rate", "epochs"},
    "MLP": {"hidden", "learning_rate", "epochs", "l2"},
}


@dataclass(frozen=True)
class ParamGrid:
    """Hyperparameter axes; grid points are the Cartesian product."""

    family: str
    axes: dict[str, list] = field(default_factory=dict)

    def points(self):
        if not self.axes:
            yield {}
            return
        names = list(self.axes)
        for combo in itertools.product(*(self.axes[n] for n in names)):
            yield dict(zip(names, combo))


DEFAULT_GRIDS = {
    "DT": {"max_depth": [3, 5, 8, None]},
    "RF": {"n_trees": [50, 100], "max_depth": [5, None]},
    "GBT": {"n_trees": [50, 100], "learning_rate": [0.1, 0.3]},
    "KNN": {"k": [3, 5, 11]},
    "LOGREG": {"l2": [1e-4, 1e-2]},
    "MLP": {"hidden": [8, 32], "learning_rate": [0.01, 0.1]},
}


def default_grid(family: str) -> ParamGrid:
    if family not in DEFAULT_GRIDS:
        raise ModelError(f"unknown model family {family!r}")
    return ParamGrid(family, dict(DEFAULT_GRIDS[family]))


def fit(config: ModelConfig, train: Dataset) -> TrainedModel:
    if config.family not in FAMILY_CLASSES:
        raise ModelError(f"unknown model family {config.family!r}")
    unknown = set(config.hyperparameters) - KNOWN_HYPERPARAMETERS[config.family]
    if unknown:
        raise ModelError(
            f"unknown {config.family} hyperparameters: {sorted(unknown)}")
    return FAMILY_CLASSES[config.family](config, train)


def _cv_folds(train: Dataset, k_folds: int, seed: int) -> list[np.ndarray]:
    """Deterministic folds; classification folds are stratified so rare
    classes appear in every validation fold."""
    rng = np.random.default_rng(seed)
    if train.task == CLASSIFICATION:
        folds = [[] for _ in range(k_folds)]
        for c in range(len(train.class_labels)):
            members = rng.permutation(np.flatnonzero(train.target == c))
            for i, idx in enumerate(members):
                folds[i % k_folds].append(idx)
        return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]
    perm = rng.permutation(train.n_samples)
    return [np.sort(part) for part in np.array_split(perm, k_folds)]


def _fold_score(model: TrainedModel, valid: Dataset, metric: str) -> float:
    if valid.task == CLASSIFICATION:
        pred = model.predict(valid.features)
        scores = None
        if len(valid.class_labels) == 2:
            scores = model.predict_proba(valid.features)[:, 1]
        report = metrics_mod.classification_report(valid.target, pred, scores)
    else:
        report = metrics_mod.regression_report(
            valid.target, model.predict(valid.features))
    return metrics_mod.score_value(report, metric)


def grid_search(grid: ParamGrid, train: Dataset, k_folds: int, metric: str,
                seed: int) -> tuple[ModelConfig, TrainedModel]:
    """Evaluate every grid point by k-fold CV; ties keep the first point.

    The returned model is refit on the full training set with the winning
    configuration.
    """
    if k_folds < 2:
        raise ModelError("k_folds must be >= 2")
    if k_folds > train.n_samples:
        raise ModelError("k_folds cannot exceed the number of samples")
    if not metrics_mod.valid_metric(metric, train.task):
        raise ModelError(f"metric {metric!r} invalid for task {train.task}")
    points = list(grid.points())
    if not points:
        raise ModelError("empty grid")

    folds = _cv_folds(train, k_folds, seed)
    all_idx = np.arange(train.n_samples)
    best_score, best_config = -np.inf, None
    for hp in points:
        config = ModelConfig(grid.family, hp, seed)
        fold_scores = []
        for fold in folds:
            if len(fold) == 0:
                continue
            mask = np.ones(train.n_samples, dtype=bool)
            mask[fold] = False
            model = fit(config, train.take(all_idx[mask]))
            fold_scores.append(_fold_score(model, train.take(fold), metric))
        mean_score = float(np.mean(fold_scores))
        if np.isnan(mean_score):
            continue  # e.g. diverged fit; the grid point is unusable
        if mean_score > best_score:
            best_score, best_config = mean_score, config
    if best_config is None:
        raise ModelError(
            f"no {grid.family} grid point produced a finite validation score")
    return best_config, fit(best_config, train)


__all__ = [
    "FAMILIES",
    "FAMILY_CLASSES",
    "FORMAT_VERSION",
    "DecisionTreeModel",
    "GradientBoostingModel",
    "KNNModel",
    "LogisticRegressionModel",
    "MLPModel",
    "ModelConfig",
    "ModelError",
    "ParamGrid",
    "RandomForestModel",
    "TrainedModel",
    "default_grid",
    "fit",
    "grid_search",
    "load_model",
    "save_model",
]
