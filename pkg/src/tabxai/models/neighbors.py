"""K-nearest neighbours on standardized features."""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .base import Standardizer, TrainedModel


class KNNModel(TrainedModel):
    """Euclidean KNN; the fitted state stores the standardized training set.

    Neighbour selection is a deterministic function of the inputs;
    distance ties among the k selected candidates resolve to the lower
    training-row index.
    """

    family = "KNN"

    def _fit(self, train: Dataset):
        self.k = int(self.hyperparameters.get("k", 5))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        self.k = min(self.k, train.n_samples)
        self.scaler = Standardizer(train.features)
        self.train_X = self.scaler(train.features)
        self.train_y = np.asarray(train.target)

    _CHUNK = 2048

    def _neighbors(self, X):
        Z = self.scaler(X)
        train_sq = (self.train_X ** 2).sum(axis=1)
        k = self.k
        out = np.empty((Z.shape[0], k), dtype=np.int64)
        for start in range(0, Z.shape[0], self._CHUNK):
            chunk = Z[start:start + self._CHUNK]
            d2 = ((chunk ** 2).sum(axis=1, keepdims=True) + train_sq
                  - 2.0 * chunk @ self.train_X.T)
            if k < d2.shape[1]:
                cand = np.argpartition(d2, k - 1, axis=1)[:, :k]
            else:
                cand = np.tile(np.arange(d2.shape[1]), (d2.shape[0], 1))
            # order the k candidates by (distance, train index): sorting the
            # indices first makes the stable distance sort break ties that way
            cand = np.sort(cand, axis=1)
            rows = np.arange(cand.shape[0])[:, None]
            order = np.argsort(d2[rows, cand], axis=1, kind="stable")
            out[start:start + cand.shape[0]] = cand[rows, order]
        return out

    def _raw_proba(self, X):
        nn = self._neighbors(X)
        labels = self.train_y[nn]
        counts = np.zeros((X.shape[0], self.n_classes))
        for c in range(self.n_classes):
            counts[:, c] = (labels == c).sum(axis=1)
        return counts / self.k

    def _raw_regress(self, X):
        nn = self._neighbors(X)
        return self.train_y[nn].mean(axis=1)

    def _state(self):
        return {
            "k": self.k,
            "scaler": self.scaler.to_dict(),
            "train_X": self.train_X.tolist(),
            "train_y": self.train_y.tolist(),
        }

    def _restore(self, state):
        self.k = state["k"]
        self.scaler = Standardizer.from_dict(state["scaler"])
        self.train_X = np.asarray(state["train_X"], dtype=np.float64)
        if self.task == CLASSIFICATION:
            self.train_y = np.asarray(state["train_y"], dtype=np.int64)
        else:
            self.train_y = np.asarray(state["train_y"], dtype=np.float64)
