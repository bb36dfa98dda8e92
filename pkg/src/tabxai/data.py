"""Tabular dataset handling: CSV ingestion, encoding, splitting, synthesis.

Datasets are immutable value objects: feature matrices are float64 and
marked read-only, so they can be shared freely across worker processes.
Rows with missing cells are rejected at load time rather than imputed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

CLASSIFICATION = "classification"
REGRESSION = "regression"
TASKS = (CLASSIFICATION, REGRESSION)


class DataError(ValueError):
    """Raised for malformed input data or invalid dataset operations."""


@dataclass(frozen=True)
class ColumnMeta:
    """Metadata for one feature column.

    Categorical columns store their category labels in first-appearance
    order; the feature matrix holds the category index as a float.
    """

    name: str
    kind: str = "numeric"  # "numeric" | "categorical"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise DataError(f"unknown column kind {self.kind!r}")
        if self.kind == "categorical" and not self.categories:
            raise DataError(f"categorical column {self.name!r} has no categories")


@dataclass(frozen=True)
class Dataset:
    """A feature matrix with target vector and column metadata.

    Classification targets are integer indices into ``class_labels``.
    """

    features: np.ndarray
    target: np.ndarray
    columns: tuple[ColumnMeta, ...]
    task: str
    class_labels: tuple = ()
    target_name: str = "class"

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r}")
        if self.task == CLASSIFICATION:
            tgt = np.asarray(self.target, dtype=np.int64)
            if len(self.class_labels) == 0:
                raise DataError("classification dataset needs class_labels")
            if tgt.size and (tgt.min() < 0 or tgt.max() >= len(self.class_labels)):
                raise DataError("classification targets out of class_labels range")
        else:
            tgt = np.asarray(self.target, dtype=np.float64)
        if feats.shape[0] != tgt.shape[0]:
            raise DataError("feature rows and target length differ")
        if np.isnan(feats).any():
            raise DataError("features contain missing values")
        if feats.shape[1] != len(self.columns):
            raise DataError("column metadata length does not match feature count")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        feats.setflags(write=False)
        tgt.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "class_labels", tuple(self.class_labels))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def take(self, indices) -> "Dataset":
        """Row subset with identical metadata."""
        idx = np.asarray(indices, dtype=np.int64)
        return replace(self, features=self.features[idx], target=self.target[idx])


@dataclass(frozen=True)
class RulePredicate:
    """Closed-interval condition on one feature: lower <= x <= upper."""

    feature_index: int
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if self.lower > self.upper:
            raise DataError(
                f"predicate on feature {self.feature_index}: lower > upper"
            )


@dataclass(frozen=True)
class RuleSpec:
    """A conjunction of interval predicates labelling uniform [0,1] data.

    A sample is class 1 iff every predicate holds, else class 0.
    """

    predicates: tuple[RulePredicate, ...]
    n_features: int

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(self.predicates))
        for p in self.predicates:
            if not 0 <= p.feature_index < self.n_features:
                raise DataError(
                    f"predicate feature index {p.feature_index} out of range"
                )

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Vector of 0/1 labels for the rows of X."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        hit = np.ones(X.shape[0], dtype=bool)
        for p in self.predicates:
            col = X[:, p.feature_index]
            hit &= (col >= p.lower) & (col <= p.upper)
        return hit.astype(np.int64)


def _parse_cell(text: str):
    """Return a float for numeric-looking cells, else None."""
    try:
        v = float(text)
    except ValueError:
        return None
    return v


def _parse_label(text: str):
    """Class labels keep their natural type: int, then float, then str."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def load_csv(path, target_column: str, task: str) -> Dataset:
    """Load a comma-separated file with a mandatory header row.

    Columns whose every value parses as a number become numeric features;
    anything else becomes categorical with category indices stored in the
    matrix. Blank cells and ragged rows are rejected with their file row
    number (header = row 1).
    """
    if task not in TASKS:
        raise DataError(f"unknown task {task!r}")
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, header row required") from None
        if target_column not in header:
            raise DataError(f"target column {target_column!r} not in header {header}")
        t_idx = header.index(target_column)
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"row {row_no}: expected {len(header)} cells, got {len(row)}"
                )
            for j, cell in enumerate(row):
                if cell.strip() == "":
                    raise DataError(f"row {row_no}: missing value in column {header[j]!r}")
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")

    feat_names = [h for i, h in enumerate(header) if i != t_idx]
    feat_idx = [i for i in range(len(header)) if i != t_idx]
    n, d = len(rows), len(feat_idx)

    columns = []
    features = np.empty((n, d), dtype=np.float64)
    for j, src in enumerate(feat_idx):
        raw = [row[src] for row in rows]
        parsed = [_parse_cell(v) for v in raw]
        if all(p is not None for p in parsed):
            features[:, j] = parsed
            columns.append(ColumnMeta(feat_names[j], "numeric"))
        else:
            cats: list[str] = []
            index = {}
            for v in raw:
                if v not in index:
                    index[v] = len(cats)
                    cats.append(v)
            features[:, j] = [index[v] for v in raw]
            columns.append(ColumnMeta(feat_names[j], "categorical", tuple(cats)))

    raw_target = [row[t_idx] for row in rows]
    if task == CLASSIFICATION:
        labels: list = []
        index = {}
        target = np.empty(n, dtype=np.int64)
        for i, v in enumerate(raw_target):
            lab = _parse_label(v)
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
            target[i] = index[lab]
        return Dataset(features, target, tuple(columns), task, tuple(labels),
                       target_name=target_column)
    target = np.empty(n, dtype=np.float64)
    for i, v in enumerate(raw_target):
        p = _parse_cell(v)
        if p is None:
            raise DataError(f"row {i + 2}: regression target {v!r} is not numeric")
        target[i] = p
    return Dataset(features, target, tuple(columns), task, target_name=target_column)


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset back to CSV.

    Numeric cells use repr() so a written file re-loads value-identical;
    categorical cells are written as their category label.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.feature_names + [dataset.target_name])
        cat = {j: c.categories for j, c in enumerate(dataset.columns)
               if c.kind == "categorical"}
        for i in range(dataset.n_samples):
            row = []
            for j in range(dataset.n_features):
                v = dataset.features[i, j]
                if j in cat:
                    row.append(cat[j][int(v)])
                else:
                    row.append(repr(float(v)))
            if dataset.task == CLASSIFICATION:
                row.append(str(dataset.class_labels[int(dataset.target[i])]))
            else:
                row.append(repr(float(dataset.target[i])))
            writer.writerow(row)


def one_hot_encode(dataset: Dataset, columns: list[str]) -> Dataset:
    """Replace each named categorical column by one binary column per category.

    New columns are named ``<col>=<category>`` and sit where the original
    column was; everything else keeps its order.
    """
    by_name = {c.name: i for i, c in enumerate(dataset.columns)}
    targets = set()
    for name in columns:
        if name not in by_name:
            raise DataError(f"unknown column {name!r}")
        col = dataset.columns[by_name[name]]
        if col.kind != "categorical":
            raise DataError(f"column {name!r} is not categorical")
        targets.add(by_name[name])
    if not targets:
        return dataset

    new_cols: list[ColumnMeta] = []
    blocks: list[np.ndarray] = []
    for j, col in enumerate(dataset.columns):
        if j in targets:
            codes = dataset.features[:, j].astype(np.int64)
            block = np.zeros((dataset.n_samples, len(col.categories)))
            block[np.arange(dataset.n_samples), codes] = 1.0
            blocks.append(block)
            for cat in col.categories:
                new_cols.append(ColumnMeta(f"{col.name}={cat}", "numeric"))
        else:
            blocks.append(dataset.features[:, j:j + 1])
            new_cols.append(col)
    return replace(dataset, features=np.hstack(blocks), columns=tuple(new_cols))


def split(dataset: Dataset, test_fraction: float, seed: int,
          stratify: bool = False) -> tuple[Dataset, Dataset]:
    """Deterministic train/test split; optionally stratified by class.

    The test size is round(n * fraction) overall (per class when
    stratifying), and both partitions must end up non-empty.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    n = dataset.n_samples
    if stratify and dataset.task == CLASSIFICATION:
        test_idx = []
        for c in range(len(dataset.class_labels)):
            members = np.flatnonzero(dataset.target == c)
            perm = rng.permutation(members)
            k = round(len(members) * test_fraction)
            test_idx.extend(perm[:k])
        test_mask = np.zeros(n, dtype=bool)
        test_mask[np.asarray(test_idx, dtype=np.int64)] = True
        test = np.flatnonzero(test_mask)
        train = np.flatnonzero(~test_mask)
    else:
        perm = rng.permutation(n)
        k = round(n * test_fraction)
        test = np.sort(perm[:k])
        train = np.sort(perm[k:])
    if len(test) == 0 or len(train) == 0:
        raise DataError(
            f"test_fraction {test_fraction} leaves an empty partition for n={n}"
        )
    return dataset.take(train), dataset.take(test)


def generate_synthetic(spec: RuleSpec, n_samples: int, seed: int,
                       class_balance: float | None = None) -> Dataset:
    """Uniform [0,1] features labelled by the rule conjunction.

    Columns are named F1..Fn. By default no rebalancing is applied: the
    class ratio is whatever the rule volume yields. ``class_balance``
    requests a positive-class fraction via rejection sampling (each class
    keeps its conditional uniform distribution), for rules whose volume
    is too small to study under natural sampling.
    """
    if n_samples < 1:
        raise DataError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    columns = tuple(ColumnMeta(f"F{j + 1}") for j in range(spec.n_features))
    if class_balance is None:
        X = rng.random((n_samples, spec.n_features))
        y = spec.evaluate(X)
        return Dataset(X, y, columns, CLASSIFICATION, class_labels=(0, 1))

    if not 0.0 < class_balance < 1.0:
        raise DataError("class_balance must be in (0, 1)")
    need = {1: round(n_samples * class_balance)}
    need[0] = n_samples - need[1]
    if need[0] == 0 or need[1] == 0:
        raise DataError("class_balance leaves one class empty")
    kept = {0: [], 1: []}
    got = {0: 0, 1: 0}
    while got[0] < need[0] or got[1] < need[1]:
        batch = rng.random((8192, spec.n_features))
        labels = spec.evaluate(batch)
        for c in (0, 1):
            take = batch[labels == c][: need[c] - got[c]]
            if len(take):
                kept[c].append(take)
                got[c] += len(take)
    X = np.vstack(kept[1] + kept[0])
    y = np.concatenate([np.ones(need[1], dtype=np.int64),
                        np.zeros(need[0], dtype=np.int64)])
    perm = rng.permutation(n_samples)
    return Dataset(X[perm], y[perm], columns, CLASSIFICATION, class_labels=(0, 1))


# Rule file grammar (one statement per line, '#' comments and blanks allowed):
#   n_features = <int>
#   F<k>, <lower>, <upper>      (1-based feature, bounds may be -inf / inf)

def parse_rulespec(text: str) -> RuleSpec:
    n_features = None
    predicates = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line and line.replace(" ", "").startswith("n_features="):
            try:
                n_features = int(line.split("=", 1)[1])
            except ValueError:
                raise DataError(f"rule file line {line_no}: bad n_features") from None
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise DataError(
                f"rule file line {line_no}: expected 'F<k>, lower, upper'"
            )
        name, lo, hi = parts
        if not (name.startswith("F") and name[1:].isdigit()):
            raise DataError(f"rule file line {line_no}: bad feature name {name!r}")
        try:
            lower, upper = float(lo), float(hi)
        except ValueError:
            raise DataError(f"rule file line {line_no}: bad bound") from None
        predicates.append(RulePredicate(int(name[1:]) - 1, lower, upper))
    if n_features is None:
        raise DataError("rule file: missing 'n_features = <int>' line")
    return RuleSpec(tuple(predicates), n_features)


def format_rulespec(spec: RuleSpec) -> str:
    lines = [f"n_features = {spec.n_features}"]
    for p in spec.predicates:
        lines.append(f"F{p.feature_index + 1}, {p.lower!r}, {p.upper!r}")
    return "\n".join(lines) + "\n"


def load_rulespec(path) -> RuleSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_rulespec(fh.read())
