"""Random forest of Gini decision trees with impurity-based feature importance.

Trees are grown on seeded bootstrap samples, each split chooses the best
threshold among ``mtry`` randomly sampled features, and ties in impurity
decrease resolve to the lowest feature index then the lowest threshold so a
(dataset, config) pair always yields the identical model. Per-tree random
streams are derived as seed XOR tree-index, so the order trees are built in
cannot change the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, DataError

_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    mtry: int | None = None  # default ceil(sqrt(p))
    seed: int = 0

    def validate(self, p: int) -> int:
        if self.n_trees < 1:
            raise ConfigError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 1:
            raise ConfigError("max_depth must be >= 1 or None")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        mtry = self.mtry if self.mtry is not None else math.ceil(math.sqrt(p))
        if not 1 <= mtry <= p:
            raise ConfigError(f"mtry must be in [1, {p}], got {mtry}")
        return mtry


@dataclass
class DecisionTree:
    """Flat preorder node arrays: feature == -1 marks a leaf."""

    feature: np.ndarray  # (nodes,) int, -1 for leaves
    threshold: np.ndarray  # (nodes,) float, nan for leaves
    left: np.ndarray  # (nodes,) int child index, -1 for leaves
    right: np.ndarray
    counts: np.ndarray  # (nodes, k) class counts of the node's sample set
    importance: np.ndarray  # (p,) raw impurity-decrease importance
    bootstrap_indices: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, m: np.ndarray) -> np.ndarray:
        out = np.empty(m.shape[0], dtype=np.int64)
        stack = [(0, np.arange(m.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if len(idx) == 0:
                continue
            if self.feature[node] < 0:
                out[idx] = int(np.argmax(self.counts[node]))
                continue
            mask = m[idx, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], idx[mask]))
            stack.append((self.right[node], idx[~mask]))
        return out


@dataclass
class ForestModel:
    trees: list[DecisionTree]
    normalized_importance: np.ndarray  # (p,) sums to 1 unless degenerate
    class_names: list[str]
    n_features: int
    degenerate: bool  # no split anywhere (e.g. single-class training data)
    config: ForestConfig

    def to_text(self) -> str:
        """Canonical preorder node-list dump, stable across identical trainings."""
        lines = [f"forest trees={len(self.trees)} features={self.n_features} "
                 f"classes={len(self.class_names)} seed={self.config.seed}"]
        for t, tree in enumerate(self.trees):
            lines.append(f"tree {t} nodes={tree.n_nodes}")
            for i in range(tree.n_nodes):
                counts = ",".join(str(int(c)) for c in tree.counts[i])
                if tree.feature[i] < 0:
                    lines.append(f"  node {i} leaf counts={counts}")
                else:
                    lines.append(
                        f"  node {i} split feature={int(tree.feature[i])} "
                        f"threshold={float(tree.threshold[i])!r} "
                        f"left={int(tree.left[i])} right={int(tree.right[i])} counts={counts}")
        return "\n".join(lines)


def _best_split(x: np.ndarray, y_node: np.ndarray, rows: np.ndarray,
                candidates: np.ndarray, gini_parent: float, eye: np.ndarray):
    """Best (gain, feature, threshold, sorted order, split position) over candidates.

    Candidates are scanned in ascending index order with strict improvement,
    and positions within a feature scan ascending thresholds, which yields the
    documented lowest-index / lowest-threshold tie-break.
    """
    n = len(rows)
    total = eye[y_node].sum(axis=0)
    best = None
    best_gain = _MIN_GAIN
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    for f in candidates:
        v = x[rows, f]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        valid = sv[:-1] < sv[1:]
        if not valid.any():
            continue
        cum = np.cumsum(eye[y_node[order]], axis=0)
        c_left = cum[:-1]
        c_right = total - c_left
        gini_left = 1.0 - (c_left * c_left).sum(axis=1) / (n_left * n_left)
        gini_right = 1.0 - (c_right * c_right).sum(axis=1) / (n_right * n_right)
        gain = gini_parent - (n_left * gini_left + n_right * gini_right) / n
        gain[~valid] = -np.inf
        pos = int(np.argmax(gain))
        if gain[pos] > best_gain:
            best_gain = float(gain[pos])
            best = (best_gain, int(f), float((sv[pos] + sv[pos + 1]) / 2.0), order, pos)
    return best


def _grow_tree(x: np.ndarray, y: np.ndarray, k: int, mtry: int,
               cfg: ForestConfig, rng: np.random.Generator,
               bootstrap: np.ndarray) -> DecisionTree:
    n, p = x.shape
    eye = np.eye(k)
    features: list[int] = []
    thresholds: list[float] = []
    lefts: list[int] = []
    rights: list[int] = []
    counts: list[np.ndarray] = []
    importance = np.zeros(p)

    # Explicit stack keeps node order preorder (right pushed first) without
    # recursion-depth limits; child links are patched when a child is emitted.
    stack = [(np.arange(n), 0, -1, False)]  # rows, depth, parent, is_left
    while stack:
        rows, depth, parent, is_left = stack.pop()
        node = len(features)
        if parent >= 0:
            if is_left:
                lefts[parent] = node
            else:
                rights[parent] = node

        y_node = y[rows]
        node_counts = np.bincount(y_node, minlength=k).astype(np.float64)
        counts.append(node_counts)

        n_node = len(rows)
        pure = node_counts.max() == n_node
        depth_capped = cfg.max_depth is not None and depth >= cfg.max_depth
        split = None
        if not pure and not depth_capped and n_node >= cfg.min_samples_split:
            candidates = np.sort(rng.choice(p, size=mtry, replace=False))
            gini_parent = 1.0 - float((node_counts * node_counts).sum()) / (n_node * n_node)
            split = _best_split(x, y_node, rows, candidates, gini_parent, eye)

        if split is None:
            features.append(-1)
            thresholds.append(math.nan)
            lefts.append(-1)
            rights.append(-1)
            continue

        gain, f, threshold, order, pos = split
        features.append(f)
        thresholds.append(threshold)
        lefts.append(-1)
        rights.append(-1)
        importance[f] += (n_node / n) * gain
        left_rows = rows[order[: pos + 1]]
        right_rows = rows[order[pos + 1:]]
        stack.append((right_rows, depth + 1, node, False))
        stack.append((left_rows, depth + 1, node, True))

    return DecisionTree(
        feature=np.asarray(features, dtype=np.int64),
        threshold=np.asarray(thresholds, dtype=np.float64),
        left=np.asarray(lefts, dtype=np.int64),
        right=np.asarray(rights, dtype=np.int64),
        counts=np.asarray(counts, dtype=np.float64),
        importance=importance,
        bootstrap_indices=bootstrap,
    )


def train_forest_xy(x: np.ndarray, y: np.ndarray, n_classes: int, cfg: ForestConfig,
                    class_names: list[str] | None = None) -> ForestModel:
    """Train on a bare (matrix, labels) pair; used directly by the Boruta loop."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[1] == 0:
        raise DataError(f"training matrix must be non-empty 2-D, got shape {x.shape}")
    if len(y) != x.shape[0]:
        raise DataError("labels length does not match matrix rows")
    if x.shape[0] < cfg.min_samples_split:
        raise DataError(f"need at least min_samples_split={cfg.min_samples_split} rows, got {x.shape[0]}")
    mtry = cfg.validate(x.shape[1])

    n = x.shape[0]
    trees = []
    for i in range(cfg.n_trees):
        rng = np.random.default_rng(cfg.seed ^ i)
        bootstrap = rng.integers(0, n, size=n)
        trees.append(_grow_tree(x[bootstrap], y[bootstrap], n_classes, mtry, cfg, rng, bootstrap))

    raw = np.mean([t.importance for t in trees], axis=0)
    total = raw.sum()
    degenerate = total <= 0.0
    normalized = raw / total if not degenerate else raw
    if class_names is None:
        class_names = [str(i) for i in range(n_classes)]
    return ForestModel(trees=trees, normalized_importance=normalized,
                       class_names=list(class_names), n_features=x.shape[1],
                       degenerate=degenerate, config=cfg)


def train_forest(d: Dataset, cfg: ForestConfig) -> ForestModel:
    return train_forest_xy(d.features, d.labels, len(d.class_names), cfg,
                           class_names=d.class_names)


def predict(model: ForestModel, m: np.ndarray) -> np.ndarray:
    """Plurality vote over trees; vote ties resolve to the lowest class index."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != model.n_features:
        raise DataError(f"matrix has {m.shape[1] if m.ndim == 2 else '?'} columns, "
                        f"model expects {model.n_features}")
    votes = np.stack([tree.predict(m) for tree in model.trees])  # (T, n)
    k = len(model.class_names)
    tallies = np.stack([(votes == c).sum(axis=0) for c in range(k)])  # (k, n)
    return np.argmax(tallies, axis=0)


def feature_importance(model: ForestModel) -> np.ndarray:
    return model.normalized_importance.copy()


def per_tree_importances(model: ForestModel, normalize: bool = True) -> np.ndarray:
    """(T, p) matrix of per-tree importances.

    With normalize=True each tree's vector is scaled to sum 1 (all-zero trees
    stay zero), making trees comparable regardless of their total impurity
    decrease; this is the matrix the Boruta Z-scores consume.
    """
    raw = np.stack([t.importance for t in model.trees])
    if not normalize:
        return raw
    sums = raw.sum(axis=1, keepdims=True)
    safe = np.where(sums > 0.0, sums, 1.0)
    return raw / safe
