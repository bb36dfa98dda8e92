"""Decision trees, bagged forests and gradient-boosted trees.

Trees are stored as flat parallel arrays so prediction can route whole
matrices at once instead of walking Python objects row by row. Split
search is exact: every midpoint between consecutive distinct values is a
candidate. Ties are broken toward the lowest feature index, then the
lowest threshold, which keeps refits bit-for-bit reproducible.
"""

from __future__ import annotations

import numpy as np

from ..data import CLASSIFICATION, Dataset
from .base import TrainedModel, ModelError

_EPS_GAIN = 1e-12


class Tree:
    """Flat-array binary tree; leaves carry a value row (probs or mean)."""

    __slots__ = ("feature", "threshold", "left", "right", "value")

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=np.float64)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node index for each row. Routing rule: x < threshold goes left."""
        node = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            feat = self.feature[node]
            live = np.flatnonzero(feat >= 0)
            if live.size == 0:
                return node
            cur = node[live]
            goes_left = X[live, feat[live]] < self.threshold[cur]
            node[live[goes_left]] = self.left[cur[goes_left]]
            node[live[~goes_left]] = self.right[cur[~goes_left]]

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def splits(self):
        """All (feature_index, threshold) pairs of internal nodes."""
        internal = self.feature >= 0
        return list(zip(self.feature[internal].tolist(),
                        self.threshold[internal].tolist()))

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(d["feature"], d["threshold"], d["left"], d["right"],
                   np.asarray(d["value"], dtype=np.float64))


def _leaf_value(y, n_classes):
    if n_classes:
        counts = np.bincount(y, minlength=n_classes).astype(np.float64)
        return counts / counts.sum()
    return np.asarray([y.mean()])


def _best_split_column(col, y, n_classes, min_leaf):
    """Best (threshold, split_score) for one feature, or None.

    The split score is the sum over children of (class-count or target
    sums squared over child size); maximizing it minimizes weighted Gini
    impurity / within-child variance.
    """
    order = np.argsort(col, kind="stable")
    v = col[order]
    if v[0] == v[-1]:
        return None
    n = len(v)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    if n_classes:
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y[order]] = 1.0
        cum = np.cumsum(onehot, axis=0)[:-1]
        total = cum[-1] + onehot[-1]
        score = ((cum ** 2).sum(axis=1) / n_left
                 + ((total - cum) ** 2).sum(axis=1) / n_right)
    else:
        cum = np.cumsum(y[order])[:-1]
        total = cum[-1] + y[order][-1]
        score = cum ** 2 / n_left + (total - cum) ** 2 / n_right
    valid = (v[1:] > v[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)
    i = int(np.argmax(score))  # first max -> lowest threshold
    t = 0.5 * (v[i] + v[i + 1])
    if t <= v[i]:  # midpoint rounded down to the left value
        t = v[i + 1]
    return t, float(score[i])


def _random_split_column(col, y, n_classes, min_leaf, rng):
    """Score one uniformly drawn threshold in the column's value range.

    Randomized thresholds trade per-tree optimality for ensembles whose
    averaged decision regions extend smoothly past the training points,
    which matters when a class occupies a box only sparsely sampled.
    """
    lo, hi = col.min(), col.max()
    if lo == hi:
        return None
    t = rng.uniform(lo, hi)
    goes_left = col < t
    n_left = int(goes_left.sum())
    if n_left < min_leaf or len(col) - n_left < min_leaf:
        return None
    if n_classes:
        cl = np.bincount(y[goes_left], minlength=n_classes).astype(np.float64)
        cr = np.bincount(y[~goes_left], minlength=n_classes).astype(np.float64)
        score = (cl ** 2).sum() / n_left + (cr ** 2).sum() / (len(col) - n_left)
    else:
        score = (y[goes_left].sum() ** 2 / n_left
                 + y[~goes_left].sum() ** 2 / (len(col) - n_left))
    return t, float(score)


def grow_tree(X, y, *, n_classes=0, max_depth=None, min_samples_split=2,
              min_samples_leaf=1, max_features=None, splitter="best",
              rng=None) -> Tree:
    """Greedy CART. ``n_classes`` 0 means regression on real targets.

    ``max_features`` limits the candidate features per node (sampled with
    ``rng``); None considers every feature. ``splitter`` "best" scans all
    midpoints exactly; "random" draws one uniform threshold per candidate
    feature and keeps the best of those.
    """
    n, d = X.shape
    if n_classes:
        y = np.asarray(y, dtype=np.int64)
        parent_stat = lambda yy: float(
            (np.bincount(yy, minlength=n_classes).astype(np.float64) ** 2).sum()
        ) / len(yy)
    else:
        y = np.asarray(y, dtype=np.float64)
        parent_stat = lambda yy: float(yy.sum()) ** 2 / len(yy)

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(None)
        return len(feature) - 1

    stack = [(new_node(), np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yy = y[idx]
        value[node] = _leaf_value(yy, n_classes)
        if (max_depth is not None and depth >= max_depth) or len(idx) < min_samples_split:
            continue
        if n_classes and np.all(yy == yy[0]):
            continue
        if not n_classes and np.all(yy == yy[0]):
            continue

        if max_features is not None and max_features < d:
            cand = np.sort(rng.choice(d, size=max_features, replace=False))
        else:
            cand = np.arange(d)

        base = parent_stat(yy)
        best = None  # (score, feature, threshold)
        for j in cand:
            if splitter == "random":
                found = _random_split_column(X[idx, j], yy, n_classes,
                                             min_samples_leaf, rng)
            else:
                found = _best_split_column(X[idx, j], yy, n_classes,
                                           min_samples_leaf)
            if found is None:
                continue
            t, score = found
            if score - base > _EPS_GAIN and (best is None or score > best[0]):
                best = (score, int(j), t)
        if best is None:
            continue
        _, j, t = best
        goes_left = X[idx, j] < t
        feature[node] = j
        threshold[node] = t
        l_id, r_id = new_node(), new_node()
        left[node], right[node] = l_id, r_id
        # push right first so the left child is processed (and numbered) next
        stack.append((r_id, idx[~goes_left], depth + 1))
        stack.append((l_id, idx[goes_left], depth + 1))

    k = n_classes if n_classes else 1
    vals = np.vstack([np.asarray(v, dtype=np.float64).reshape(k) for v in value])
    return Tree(feature, threshold, left, right, vals)


class DecisionTreeModel(TrainedModel):
    family = "DT"

    def _fit(self, train: Dataset):
        hp = self.hyperparameters
        self.tree = grow_tree(
            train.features, train.target,
            n_classes=self.n_classes,
            max_depth=hp.get("max_depth"),
            min_samples_split=hp.get("min_samples_split", 2),
            min_samples_leaf=hp.get("min_samples_leaf", 1),
        )

    def _raw_proba(self, X):
        return self.tree.predict_value(X)

    def _raw_regress(self, X):
        return self.tree.predict_value(X)[:, 0]

    def splits(self):
        return self.tree.splits()

    def _state(self):
        return {"tree": self.tree.to_dict()}

    def _restore(self, state):
        self.tree = Tree.from_dict(state["tree"])


class RandomForestModel(TrainedModel):
    """Bagged trees; per-node feature subsampling defaults to sqrt(d) for
    classification and all features for regression."""

    family = "RF"

    def _fit(self, train: Dataset):
        hp = self.hyperparameters
        n_trees = hp.get("n_trees", 100)
        bootstrap = hp.get("bootstrap", True)
        max_features = hp.get("max_features", "default")
        d = train.n_features
        if max_features == "default":
            max_features = (
                max(1, int(np.sqrt(d))) if self.task == CLASSIFICATION else None
            )
        elif max_features == "sqrt":
            max_features = max(1, int(np.sqrt(d)))
        seeds = np.random.SeedSequence(self.config.seed).spawn(n_trees)
        self.trees = []
        n = train.n_samples
        for s in seeds:
            rng = np.random.default_rng(s)
            idx = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
            self.trees.append(grow_tree(
                train.features[idx], train.target[idx],
                n_classes=self.n_classes,
                max_depth=hp.get("max_depth"),
                min_samples_split=hp.get("min_samples_split", 2),
                min_samples_leaf=hp.get("min_samples_leaf", 1),
                max_features=max_features,
                splitter=hp.get("splitter", "best"),
                rng=rng,
            ))

    def _raw_proba(self, X):
        acc = self.trees[0].predict_value(X)
        for t in self.trees[1:]:
            acc = acc + t.predict_value(X)
        return acc / len(self.trees)

    def _raw_regress(self, X):
        return self._raw_proba(X)[:, 0]

    def splits(self):
        out = []
        for t in self.trees:
            out.extend(t.splits())
        return out

    def _state(self):
        return {"trees": [t.to_dict() for t in self.trees]}

    def _restore(self, state):
        self.trees = [Tree.from_dict(d) for d in state["trees"]]


def _grow_gbt_tree(X, g, h, *, max_depth, reg_lambda, min_child_weight,
                   min_samples_leaf):
    """Second-order boosting tree on gradients g and hessians h.

    Split gain maximizes GL^2/(HL+lambda) + GR^2/(HR+lambda); leaves carry
    the Newton step -G/(H+lambda). ``min_child_weight`` floors each
    child's hessian mass, which keeps leaves from shrink-wrapping a few
    samples when the loss curvature is still small.
    """
    n, d = X.shape
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def node_score(G, H):
        return G * G / (H + reg_lambda)

    stack = [(new_node(), np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        gg, hh = g[idx], h[idx]
        G, H = float(gg.sum()), float(hh.sum())
        value[node] = -G / (H + reg_lambda)
        if depth >= max_depth or len(idx) < 2:
            continue
        base = node_score(G, H)
        best = None
        for j in range(d):
            col = X[idx, j]
            order = np.argsort(col, kind="stable")
            v = col[order]
            if v[0] == v[-1]:
                continue
            cg = np.cumsum(gg[order])[:-1]
            ch = np.cumsum(hh[order])[:-1]
            n_left = np.arange(1, len(v))
            score = (cg ** 2 / (ch + reg_lambda)
                     + (G - cg) ** 2 / (H - ch + reg_lambda))
            valid = ((v[1:] > v[:-1])
                     & (ch >= min_child_weight)
                     & (H - ch >= min_child_weight)
                     & (n_left >= min_samples_leaf)
                     & (len(v) - n_left >= min_samples_leaf))
            if not valid.any():
                continue
            score = np.where(valid, score, -np.inf)
            i = int(np.argmax(score))
            if score[i] - base > _EPS_GAIN and (best is None or score[i] > best[0]):
                t = 0.5 * (v[i] + v[i + 1])
                if t <= v[i]:
                    t = v[i + 1]
                best = (float(score[i]), int(j), t)
        if best is None:
            continue
        _, j, t = best
        goes_left = X[idx, j] < t
        feature[node] = j
        threshold[node] = t
        l_id, r_id = new_node(), new_node()
        left[node], right[node] = l_id, r_id
        stack.append((r_id, idx[~goes_left], depth + 1))
        stack.append((l_id, idx[goes_left], depth + 1))

    vals = np.asarray(value, dtype=np.float64).reshape(-1, 1)
    return Tree(feature, threshold, left, right, vals)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class GradientBoostingModel(TrainedModel):
    """Boosted trees: squared loss for regression, logistic for binary."""

    family = "GBT"

    def _fit(self, train: Dataset):
        hp = self.hyperparameters
        n_trees = hp.get("n_trees", 100)
        lr = hp.get("learning_rate", 0.1)
        max_depth = hp.get("max_depth", 6)
        reg_lambda = hp.get("reg_lambda", 1.0)
        min_child_weight = hp.get("min_child_weight", 1.0)
        min_samples_leaf = hp.get("min_samples_leaf", 1)
        X = train.features
        if self.task == CLASSIFICATION:
            if self.n_classes > 2:
                raise ModelError("GBT classification is binary only")
            y = train.target.astype(np.float64)
            prior = float(np.clip(y.mean(), 1e-12, 1.0 - 1e-12))
            self.base_score = float(np.log(prior / (1.0 - prior)))
        else:
            y = train.target
            self.base_score = float(y.mean())
        self.learning_rate = lr
        self.trees = []
        f = np.full(train.n_samples, self.base_score)
        for _ in range(n_trees):
            if self.task == CLASSIFICATION:
                p = _sigmoid(f)
                g, h = p - y, p * (1.0 - p)
            else:
                g, h = f - y, np.ones_like(y)
            tree = _grow_gbt_tree(
                X, g, h, max_depth=max_depth, reg_lambda=reg_lambda,
                min_child_weight=min_child_weight,
                min_samples_leaf=min_samples_leaf)
            self.trees.append(tree)
            f = f + lr * tree.predict_value(X)[:, 0]

    def _margin(self, X):
        f = np.full(X.shape[0], self.base_score)
        for t in self.trees:
            f = f + self.learning_rate * t.predict_value(X)[:, 0]
        return f

    def _raw_proba(self, X):
        p1 = _sigmoid(self._margin(X))
        return np.column_stack([1.0 - p1, p1])

    def _raw_regress(self, X):
        return self._margin(X)

    def splits(self):
        out = []
        for t in self.trees:
            out.extend(t.splits())
        return out

    def _state(self):
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees],
        }

    def _restore(self, state):
        self.base_score = state["base_score"]
        self.learning_rate = state["learning_rate"]
        self.trees = [Tree.from_dict(d) for d in state["trees"]]
