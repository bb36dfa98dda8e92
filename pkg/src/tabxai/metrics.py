"""Evaluation metrics for classification and regression.

AUC is computed as the Mann-Whitney rank statistic (ties count 1/2),
which is exact under tied scores, rather than by integrating an ROC
curve. Ratios that come out 0/0 are reported as 0 and the metric name is
added to the report's ``undefined`` set so CSV output stays numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import CLASSIFICATION, REGRESSION

CLASSIFICATION_METRICS = ("accuracy", "precision", "recall", "specificity", "f1", "auc")
REGRESSION_METRICS = ("pearson", "r2", "mae", "mse", "mape")

# Metrics where smaller is better; grid search negates these for ranking.
LOSS_METRICS = frozenset({"mae", "mse", "mape"})


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = actual class, columns = predicted class."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total


@dataclass
class MetricsReport:
    task: str
    values: dict[str, float]
    confusion: ConfusionMatrix | None = None
    undefined: set[str] = field(default_factory=set)

    @property
    def auc(self) -> float:
        return self.values.get("auc", 0.0)


def _ratio(num: float, den: float, name: str, undefined: set[str]) -> float:
    if den == 0:
        undefined.add(name)
        return 0.0
    return float(num) / float(den)


def auc_score(y_true, scores) -> float:
    """Probability a random positive outscores a random negative, ties 1/2.

    Computed from average ranks of the scores, so it is exact and
    invariant under strictly increasing transforms.
    """
    y = np.asarray(y_true)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise MetricError("y_true and scores must have equal length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC needs at least one positive and one negative")
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum = ranks[y == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def confusion_matrix(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return ConfusionMatrix(counts)


def classification_report(y_true, y_pred, scores=None) -> MetricsReport:
    """Accuracy/precision/recall/specificity/F1 (+AUC when scores given).

    Binary ratio metrics treat class 1 as positive. AUC requires class-1
    probabilities in ``scores``.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise MetricError("y_true and y_pred must have equal length")
    if y_true.size == 0:
        raise MetricError("empty label vectors")
    n_classes = int(max(y_true.max(), y_pred.max())) + 1
    cm = confusion_matrix(y_true, y_pred, n_classes)
    undefined: set[str] = set()
    values = {"accuracy": cm.accuracy()}
    if n_classes == 2:
        tn, fp = cm.counts[0]
        fn, tp = cm.counts[1]
        precision = _ratio(tp, tp + fp, "precision", undefined)
        recall = _ratio(tp, tp + fn, "recall", undefined)
        values["precision"] = precision
        values["recall"] = recall
        values["specificity"] = _ratio(tn, tn + fp, "specificity", undefined)
        values["f1"] = _ratio(2 * precision * recall, precision + recall,
                              "f1", undefined)
        if scores is not None:
            try:
                values["auc"] = auc_score(y_true, scores)
            except MetricError:
                values["auc"] = 0.0
                undefined.add("auc")
    else:
        for name in ("precision", "recall", "specificity", "f1", "auc"):
            values[name] = 0.0
            undefined.add(name)
    return MetricsReport(CLASSIFICATION, values, cm, undefined)


def regression_report(y_true, y_pred) -> MetricsReport:
    """Pearson r, R^2, MAE, MSE and MAPE (over samples with y_true != 0)."""
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise MetricError("y_true and y_pred must have equal length")
    if y_true.size < 2:
        raise MetricError("regression metrics need at least 2 samples")
    undefined: set[str] = set()
    err = y_pred - y_true
    values = {"mae": float(np.mean(np.abs(err))), "mse": float(np.mean(err ** 2))}

    ss_tot = float(np.sum((y_true - y_true.mean()) ** 2))
    if ss_tot == 0.0:
        values["r2"] = 0.0
        values["pearson"] = 0.0
        undefined.update(("r2", "pearson"))
    else:
        values["r2"] = 1.0 - float(np.sum(err ** 2)) / ss_tot
        sd_pred = float(np.std(y_pred))
        if sd_pred == 0.0:
            values["pearson"] = 0.0
            undefined.add("pearson")
        else:
            values["pearson"] = float(np.corrcoef(y_true, y_pred)[0, 1])

    nz = y_true != 0
    if not nz.any():
        values["mape"] = 0.0
        undefined.add("mape")
    else:
        values["mape"] = float(np.mean(np.abs(err[nz] / y_true[nz])))
    return MetricsReport(REGRESSION, values, None, undefined)


def score_value(report: MetricsReport, metric: str) -> float:
    """Higher-is-better value of a named metric (losses are negated)."""
    if metric not in report.values:
        raise MetricError(f"metric {metric!r} not available for task {report.task}")
    v = report.values[metric]
    return -v if metric in LOSS_METRICS else v


def valid_metric(metric: str, task: str) -> bool:
    if task == CLASSIFICATION:
        return metric in CLASSIFICATION_METRICS
    return metric in REGRESSION_METRICS
