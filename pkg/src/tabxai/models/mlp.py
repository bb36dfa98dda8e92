"""Small feed-forward network: ReLU hidden layers, softmax/identity head.

Trained by full-batch gradient descent for a fixed epoch budget; the
weight initialization is the only randomness and is driven by the config
seed, so refits are identical.
"""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .base import ModelError, Standardizer, TrainedModel
from .linear import _softmax


def _as_hidden(value) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,)
    return tuple(int(v) for v in value)


class MLPModel(TrainedModel):
    family = "MLP"
    differentiable = True

    def _fit(self, train: Dataset):
        hp = self.hyperparameters
        hidden = _as_hidden(hp.get("hidden", 32))
        if not 1 <= len(hidden) <= 2:
            raise ModelError("MLP supports 1 or 2 hidden layers")
        lr = float(hp.get("learning_rate", 0.05))
        epochs = int(hp.get("epochs", 400))
        l2 = float(hp.get("l2", 1e-5))

        self.scaler = Standardizer(train.features)
        Z = self.scaler(train.features)
        n, d = Z.shape
        out_dim = self.n_classes if self.task == CLASSIFICATION else 1
        sizes = (d,) + hidden + (out_dim,)
        rng = np.random.default_rng(self.config.seed)
        self.W = [rng.standard_normal((sizes[i], sizes[i + 1]))
                  * np.sqrt(2.0 / sizes[i]) for i in range(len(sizes) - 1)]
        self.b = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]

        if self.task == CLASSIFICATION:
            self.y_mean, self.y_scale = 0.0, 1.0
            Y = np.zeros((n, out_dim))
            Y[np.arange(n), train.target] = 1.0
        else:
            # standardized regression target keeps full-batch GD stable
            # whatever the output scale; predictions are mapped back
            self.y_mean = float(train.target.mean())
            self.y_scale = float(train.target.std()) or 1.0
            Y = ((train.target - self.y_mean) / self.y_scale).reshape(-1, 1)

        for _ in range(epochs):
            acts = [Z]
            for i in range(len(self.W) - 1):
                acts.append(np.maximum(acts[-1] @ self.W[i] + self.b[i], 0.0))
            logits = acts[-1] @ self.W[-1] + self.b[-1]
            if self.task == CLASSIFICATION:
                delta = (_softmax(logits) - Y) / n
            else:
                delta = (logits - Y) / n
            for i in range(len(self.W) - 1, -1, -1):
                gw = acts[i].T @ delta + l2 * self.W[i]
                gb = delta.sum(axis=0)
                if i > 0:
                    delta = (delta @ self.W[i].T) * (acts[i] > 0.0)
                self.W[i] -= lr * gw
                self.b[i] -= lr * gb

    def _forward(self, X):
        h = self.scaler(X)
        for i in range(len(self.W) - 1):
            h = np.maximum(h @ self.W[i] + self.b[i], 0.0)
        return h @ self.W[-1] + self.b[-1]

    def _raw_proba(self, X):
        return _softmax(self._forward(X))

    def _raw_regress(self, X):
        return self._forward(X)[:, 0] * self.y_scale + self.y_mean

    def gradient(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.n_features:
            raise ModelError("gradient input has wrong length")
        h = self.scaler(x.reshape(1, -1))
        acts = [h]
        for i in range(len(self.W) - 1):
            acts.append(np.maximum(acts[-1] @ self.W[i] + self.b[i], 0.0))
        logits = acts[-1] @ self.W[-1] + self.b[-1]
        if self.task == CLASSIFICATION:
            p = _softmax(logits)[0]
            c = 1 if self.n_classes == 2 else int(np.argmax(p))
            upstream = (p[c] * (np.eye(len(p))[c] - p)).reshape(1, -1)
        else:
            upstream = np.full((1, 1), self.y_scale)
        for i in range(len(self.W) - 1, 0, -1):
            upstream = (upstream @ self.W[i].T) * (acts[i] > 0.0)
        grad_std = (upstream @ self.W[0].T)[0]
        return grad_std / self.scaler.std

    def _state(self):
        return {
            "scaler": self.scaler.to_dict(),
            "W": [w.tolist() for w in self.W],
            "b": [b.tolist() for b in self.b],
            "y_mean": self.y_mean,
            "y_scale": self.y_scale,
        }

    def _restore(self, state):
        self.scaler = Standardizer.from_dict(state["scaler"])
        self.W = [np.asarray(w, dtype=np.float64) for w in state["W"]]
        self.b = [np.asarray(b, dtype=np.float64) for b in state["b"]]
        self.y_mean = state["y_mean"]
        self.y_scale = state["y_scale"]
