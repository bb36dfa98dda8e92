"""Regularized linear models on standardized inputs.

Classification is logistic regression fitted by Newton/IRLS iterations
(deterministic from a zero start, no learning-rate tuning); regression is
closed-form ridge. Both expose analytic input gradients.
"""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .base import ModelError, Standardizer, TrainedModel


def _sigmoid(z):
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


class LogisticRegressionModel(TrainedModel):
    """Binary tasks use a single logit; multiclass uses a softmax head.

    Objective: mean cross-entropy + l2/2 * ||w||^2 (bias unpenalized).
    """

    family = "LOGREG"
    differentiable = True

    def _fit(self, train: Dataset):
        hp = self.hyperparameters
        self.l2 = float(hp.get("l2", 1e-3))
        self.scaler = Standardizer(train.features)
        Z = self.scaler(train.features)
        n, d = Z.shape
        if self.task == CLASSIFICATION:
            max_iter = int(hp.get("max_iter", 50))
            if self.n_classes == 2:
                y = train.target.astype(np.float64)
                w = np.zeros(d)
                b = 0.0
                for _ in range(max_iter):
                    p = _sigmoid(Z @ w + b)
                    grad_w = Z.T @ (p - y) / n + self.l2 * w
                    grad_b = float(np.mean(p - y))
                    if max(np.abs(grad_w).max(initial=0.0), abs(grad_b)) < 1e-10:
                        break
                    r = np.clip(p * (1.0 - p), 1e-10, None)
                    Zb = np.hstack([Z, np.ones((n, 1))])
                    H = (Zb * r[:, None]).T @ Zb / n
                    H[:d, :d] += self.l2 * np.eye(d)
                    step = np.linalg.solve(H, np.append(grad_w, grad_b))
                    w -= step[:d]
                    b -= step[d]
                self.weights = w
                self.bias = b
            else:
                # softmax by full-batch gradient descent
                k = self.n_classes
                W = np.zeros((d, k))
                b = np.zeros(k)
                Y = np.zeros((n, k))
                Y[np.arange(n), train.target] = 1.0
                lr = float(hp.get("learning_rate", 0.5))
                for _ in range(int(hp.get("epochs", 500))):
                    P = _softmax(Z @ W + b)
                    G = Z.T @ (P - Y) / n + self.l2 * W
                    W -= lr * G
                    b -= lr * (P - Y).mean(axis=0)
                self.weights = W
                self.bias = b
        else:
            y = train.target
            A = Z.T @ Z / n + self.l2 * np.eye(d)
            self.weights = np.linalg.solve(A, Z.T @ y / n)
            self.bias = float(y.mean())

    def _raw_proba(self, X):
        Z = self.scaler(X)
        if self.n_classes == 2:
            p1 = _sigmoid(Z @ self.weights + self.bias)
            return np.column_stack([1.0 - p1, p1])
        return _softmax(Z @ self.weights + self.bias)

    def _raw_regress(self, X):
        return self.scaler(X) @ self.weights + self.bias

    def gradient(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.n_features:
            raise ModelError("gradient input has wrong length")
        if self.task == CLASSIFICATION:
            if self.n_classes == 2:
                p = float(self._raw_proba(x)[0, 1])
                return p * (1.0 - p) * self.weights / self.scaler.std
            P = self._raw_proba(x)[0]
            c = int(np.argmax(P))
            jac = P[c] * (np.eye(self.n_classes)[c] - P)
            return (self.weights @ jac) / self.scaler.std
        return self.weights / self.scaler.std

    def _state(self):
        w = self.weights
        return {
            "scaler": self.scaler.to_dict(),
            "weights": w.tolist(),
            "bias": self.bias if np.isscalar(self.bias) else np.asarray(self.bias).tolist(),
            "l2": self.l2,
        }

    def _restore(self, state):
        self.scaler = Standardizer.from_dict(state["scaler"])
        self.weights = np.asarray(state["weights"], dtype=np.float64)
        bias = state["bias"]
        self.bias = np.asarray(bias, dtype=np.float64) if isinstance(bias, list) else float(bias)
        self.l2 = state["l2"]
