import numpy as np
import pytest

from tabxai import data

RULE_17F = "n_features = 17\nF3, 0.7, 0.9\nF6, 0.2, 0.35\n"
RULE_100F = (
    "n_features = 100\n"
    "F4, 0.1, 0.5\n"
    "F10, 0.6, inf\n"
    "F20, -inf, 0.8\n"
    "F31, -inf, 0.25\n"
    "F57, 0.4, 0.7\n"
    "F85, 0.4, inf\n"
)
RULE_100F_SIGNAL = (3, 9, 19, 30, 56, 84)  # 0-based indices of F4..F85


@pytest.fixture(scope="session")
def rule17_spec():
    return data.parse_rulespec(RULE_17F)


@pytest.fixture(scope="session")
def rule100_spec():
    return data.parse_rulespec(RULE_100F)


@pytest.fixture(scope="session")
def rule100_balanced_small(rule100_spec):
    """Balanced 600-sample draw of the 100-feature rule data."""
    return data.generate_synthetic(rule100_spec, 600, seed=5, class_balance=0.5)


def make_regression(n=80, d=4, seed=0, weights=(2.0, -1.0, 0.5, 0.0)):
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    y = X @ np.asarray(weights)
    cols = tuple(data.ColumnMeta(f"F{j + 1}") for j in range(d))
    return data.Dataset(X, y, cols, data.REGRESSION)


def make_classification(n=120, d=4, seed=0):
    """Binary labels from indicator(F1 > 0.5)."""
    rng = np.random.default_rng(seed)
    X = rng.random((n, d))
    y = (X[:, 0] > 0.5).astype(int)
    cols = tuple(data.ColumnMeta(f"F{j + 1}") for j in range(d))
    return data.Dataset(X, y, cols, data.CLASSIFICATION, (0, 1))
