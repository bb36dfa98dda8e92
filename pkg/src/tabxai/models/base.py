"""Shared model contract: fit state, prediction, gradients, persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..data import CLASSIFICATION, Dataset

FORMAT_VERSION = 1


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    family: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0


class TrainedModel:
    """A fitted model: immutable after construction, safe to share.

    Subclasses implement ``_fit`` plus ``_raw_proba`` (classification,
    rows of class probabilities) and/or ``_raw_regress``. Probability
    rows always sum to 1 within 1e-9. ``predict`` returns class indices
    for classification (argmax, ties to the lower index) and reals for
    regression.
    """

    family = "?"
    differentiable = False

    def __init__(self, config: ModelConfig, train: Dataset):
        if train.n_samples == 0:
            raise ModelError("cannot fit on an empty dataset")
        self.config = config
        self.task = train.task
        self.n_features = train.n_features
        self.class_labels = train.class_labels
        self.feature_names = list(train.feature_names)
        self._fit(train)

    @property
    def hyperparameters(self) -> dict:
        return self.config.hyperparameters

    @property
    def n_classes(self) -> int:
        return len(self.class_labels) if self.task == CLASSIFICATION else 0

    def _check_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ModelError(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        return X

    def predict(self, X) -> np.ndarray:
        X = self._check_matrix(X)
        if X.shape[0] == 0:
            return np.empty(0)
        if self.task == CLASSIFICATION:
            return np.argmax(self._raw_proba(X), axis=1)
        return self._raw_regress(X)

    def predict_proba(self, X) -> np.ndarray:
        if self.task != CLASSIFICATION:
            raise ModelError("predict_proba requires a classification model")
        X = self._check_matrix(X)
        if X.shape[0] == 0:
            return np.empty((0, self.n_classes))
        return self._raw_proba(X)

    def gradient(self, x) -> np.ndarray:
        """Gradient of the model output at a single input.

        Classification models differentiate the class-1 probability for
        binary tasks (the predicted class's probability otherwise);
        regression models differentiate the prediction.
        """
        raise ModelError(f"{self.family} is not differentiable")

    def _fit(self, train: Dataset):
        raise NotImplementedError

    def _state(self) -> dict:
        raise NotImplementedError

    def _restore(self, state: dict):
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "family": self.family,
            "task": self.task,
            "n_features": self.n_features,
            "class_labels": list(self.class_labels),
            "feature_names": self.feature_names,
            "config": {
                "family": self.config.family,
                "hyperparameters": _jsonable(self.config.hyperparameters),
                "seed": self.config.seed,
            },
            "state": self._state(),
        }

    @classmethod
    def _from_dict(cls, doc: dict) -> "TrainedModel":
        self = cls.__new__(cls)
        self.config = ModelConfig(
            doc["config"]["family"],
            doc["config"]["hyperparameters"],
            doc["config"]["seed"],
        )
        self.task = doc["task"]
        self.n_features = doc["n_features"]
        self.class_labels = tuple(doc["class_labels"])
        self.feature_names = list(doc["feature_names"])
        self._restore(doc["state"])
        return self


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


class Standardizer:
    """Per-feature zero-mean unit-variance transform learned from train data."""

    def __init__(self, X: np.ndarray):
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.std = np.where(std < 1e-12, 1.0, std)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d):
        self = cls.__new__(cls)
        self.mean = np.asarray(d["mean"], dtype=np.float64)
        self.std = np.asarray(d["std"], dtype=np.float64)
        return self


def save_model(model: TrainedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, separators=(",", ":"), sort_keys=True)


def load_model(path) -> TrainedModel:
    from . import FAMILY_CLASSES

    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {version!r}")
    family = doc.get("family")
    if family not in FAMILY_CLASSES:
        raise ModelError(f"unknown model family {family!r}")
    return FAMILY_CLASSES[family]._from_dict(doc)
