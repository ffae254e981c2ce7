"""Probabilistic binary classifiers over SOH vectors: a random forest and a
cost-sensitive linear SVM with Platt scaling.

Labels are 1 for Artcode and 0 for non-Artcode throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ._kernels import best_split
from .errors import (CorruptModel, DatasetError, DegenerateTrainingSet, DimensionMismatch,
                     InvalidSpec, VersionMismatch)

MODEL_VERSION = 1
ALGOS = ("rf", "svm")


@dataclass(frozen=True)
class TrainConfig:
    algo: str = "rf"
    n_trees: int = 30
    max_depth: int = 8
    min_leaf: int = 2
    feature_subsample: int | None = None  # None means ceil(sqrt(dim))
    svm_cost_pos: float = 2.0
    svm_cost_neg: float = 1.0
    svm_epochs: int = 200
    svm_lr: float = 0.5
    svm_l2: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise InvalidSpec(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if self.n_trees < 1:
            raise InvalidSpec("n_trees must be at least 1")
        if self.max_depth < 0 or self.min_leaf < 1:
            raise InvalidSpec("max_depth must be >= 0 and min_leaf >= 1")
        if self.feature_subsample is not None and self.feature_subsample < 1:
            raise InvalidSpec("feature_subsample must be positive")
        if self.svm_cost_pos <= 0 or self.svm_cost_neg <= 0:
            raise InvalidSpec("SVM costs must be positive")
        if self.svm_epochs < 1 or self.svm_lr <= 0 or self.svm_l2 < 0:
            raise InvalidSpec("svm_epochs >= 1, svm_lr > 0 and svm_l2 >= 0 are required")

    def subsample_for(self, dim: int) -> int:
        k = self.feature_subsample or math.ceil(math.sqrt(dim))
        return min(k, dim)

    def replace(self, **changes) -> "TrainConfig":
        return TrainConfig(**{**asdict(self), **changes})

    @classmethod
    def from_json(cls, data: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class Prediction:
    label: str
    proba: float

    @classmethod
    def from_proba(cls, proba: float) -> "Prediction":
        # a tie at exactly one half favours recall
        return cls("artcode" if proba >= 0.5 else "non_artcode", float(proba))


# --- decision trees -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tree:
    """Flat binary tree; ``feature == -1`` marks a leaf holding its Artcode fraction."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return self.value[node]
            go_left = X[rows[inner], f[inner]] <= self.threshold[node[inner]]
            node[inner] = np.where(go_left, self.left[node[inner]], self.right[node[inner]])

    def to_json(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": [float(t) for t in self.threshold],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": [float(v) for v in self.value],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Tree":
        tree = cls(
            np.asarray(data["feature"], dtype=np.int64),
            np.asarray(data["threshold"], dtype=np.float64),
            np.asarray(data["left"], dtype=np.int64),
            np.asarray(data["right"], dtype=np.int64),
            np.asarray(data["value"], dtype=np.float64),
        )
        n = len(tree.feature)
        if n == 0 or not all(len(a) == n for a in (tree.threshold, tree.left, tree.right, tree.value)):
            raise CorruptModel("tree arrays have inconsistent lengths")
        inner = tree.feature >= 0
        for child in (tree.left[inner], tree.right[inner]):
            if np.any(child <= np.flatnonzero(inner)) or np.any(child >= n):
                raise CorruptModel("tree child index out of range")
        return tree


def grow_tree(X, y, max_depth, min_leaf, n_features, rng) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        yi = y[idx]
        pos = int(yi.sum())
        if depth >= max_depth or pos == 0 or pos == len(idx) or len(idx) < 2 * min_leaf:
            continue
        best = (np.inf, -1, np.nan)
        for f in np.sort(rng.choice(X.shape[1], size=n_features, replace=False)):
            score, thr = best_split(X[idx, f], yi, min_leaf)
            if score < best[0]:
                best = (score, int(f), thr)
        score, f, thr = best
        # a split must lower impurity (node half-Gini is pos*neg/n^2)
        if f < 0 or score >= pos * (len(idx) - pos) / len(idx) ** 2:
            continue
        mask = X[idx, f] <= thr
        feature[node], threshold[node] = f, thr
        left[node] = new_node(idx[mask])
        right[node] = new_node(idx[~mask])
        stack.append((right[node], idx[~mask], depth + 1))
        stack.append((left[node], idx[mask], depth + 1))
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold, dtype=np.float64),
                np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                np.array(value, dtype=np.float64))


# --- SVM and Platt scaling ------------------------------------------------


def platt_fit(scores, labels, max_iter: int = 100) -> tuple[float, float]:
    """Fit ``P(y=1|f) = 1 / (1 + exp(A f + B))`` by Newton's method with backtracking.

    Targets are smoothed to ``(N+ + 1)/(N+ + 2)`` and ``1/(N- + 2)`` so a
    separable training set does not drive ``A`` to infinity.
    """
    f = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels) == 1
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    t = np.where(y, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    A, B = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))
    sigma = 1e-12

    def objective(a, b):
        z = a * f + b
        # -sum t log p + (1-t) log(1-p), written stably
        return float(np.sum(np.logaddexp(0, z) - (1 - t) * z))

    fval = objective(A, B)
    for _ in range(max_iter):
        z = A * f + B
        p = 1.0 / (1.0 + np.exp(z))  # probability of the positive class
        d1 = t - p
        d2 = p * (1 - p)
        h11 = sigma + float(np.sum(f * f * d2))
        h22 = sigma + float(np.sum(d2))
        h21 = float(np.sum(f * d2))
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if abs(g1) < 1e-10 and abs(g2) < 1e-10:
            break
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= 1e-10:
            nA, nB = A + step * dA, B + step * dB
            nval = objective(nA, nB)
            if nval < fval + 1e-4 * step * gd:
                A, B, fval = nA, nB, nval
                break
            step /= 2
        else:
            break
    return float(A), float(B)


def platt_proba(margin, A: float, B: float):
    z = A * np.asarray(margin, dtype=np.float64) + B
    # 1/(1+exp(z)) without overflow
    return np.exp(-np.logaddexp(0.0, z))


def fit_linear_svm(X, y, cfg: TrainConfig):
    """Full-batch subgradient descent on class-weighted hinge loss plus L2.

    Returns ``(w, b)`` in standardized coordinates, taking the iterate with the
    lowest objective seen.
    """
    s = np.where(y == 1, 1.0, -1.0)
    cost = np.where(y == 1, cfg.svm_cost_pos, cfg.svm_cost_neg)
    n, d = X.shape
    w, b = np.zeros(d), 0.0

    def objective(w, b):
        slack = np.maximum(0.0, 1.0 - s * (X @ w + b))
        return 0.5 * cfg.svm_l2 * float(w @ w) + float(np.sum(cost * slack)) / n

    best = (objective(w, b), w.copy(), b)
    for t in range(cfg.svm_epochs):
        active = s * (X @ w + b) < 1.0
        coef = (cost * s)[active]
        gw = cfg.svm_l2 * w - X[active].T @ coef / n
        gb = -float(coef.sum()) / n
        eta = cfg.svm_lr / math.sqrt(t + 1.0)
        w = w - eta * gw
        b = b - eta * gb
        obj = objective(w, b)
        if obj < best[0]:
            best = (obj, w.copy(), b)
    return best[1], float(best[2])


# --- models ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrainedModel:
    algo: str
    feature_dim: int
    config: TrainConfig
    trees: tuple[Tree, ...] = ()
    # SVM parameters; the margin is w . ((x - mean) / scale) + bias
    weights: np.ndarray | None = None
    bias: float = 0.0
    mean: np.ndarray | None = None
    scale: np.ndarray | None = None
    platt: tuple[float, float] = (0.0, 0.0)

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.feature_dim:
            raise DimensionMismatch(f"model expects {self.feature_dim} features, got shape {X.shape}")
        return X

    def margin(self, X) -> np.ndarray:
        X = self._check(X)
        return ((X - self.mean) / self.scale) @ self.weights + self.bias

    def predict_proba(self, X) -> np.ndarray:
        """Artcode probability for each row of ``X`` (or a single vector)."""
        X = self._check(X)
        if self.algo == "rf":
            return sum(tree.predict(X) for tree in self.trees) / len(self.trees)
        return platt_proba(self.margin(X), *self.platt)

    def predict_labels(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def predict(self, x) -> Prediction:
        return Prediction.from_proba(float(self.predict_proba(x)[0]))

    def to_json(self) -> dict:
        out = {"version": MODEL_VERSION, "algo": self.algo, "feature_dim": self.feature_dim,
               "config": asdict(self.config)}
        if self.algo == "rf":
            out["trees"] = [t.to_json() for t in self.trees]
        else:
            out["weights"] = {
                "w": [float(v) for v in self.weights],
                "bias": float(self.bias),
                "mean": [float(v) for v in self.mean],
                "scale": [float(v) for v in self.scale],
                "platt": [float(v) for v in self.platt],
            }
        return out

    @classmethod
    def from_json(cls, data) -> "TrainedModel":
        if not isinstance(data, dict) or "version" not in data:
            raise CorruptModel("model file has no version field")
        if str(data["version"]) != str(MODEL_VERSION):
            raise VersionMismatch(f"model version {data['version']!r}, expected {MODEL_VERSION}")
        try:
            algo = data["algo"]
            dim = int(data["feature_dim"])
            cfg = TrainConfig.from_json(data["config"])
            if algo == "rf":
                trees = tuple(Tree.from_json(t) for t in data["trees"])
                if not trees:
                    raise CorruptModel("forest has no trees")
                return cls("rf", dim, cfg, trees=trees)
            if algo == "svm":
                p = data["weights"]
                arrays = [np.asarray(p[k], dtype=np.float64) for k in ("w", "mean", "scale")]
                if any(a.shape != (dim,) for a in arrays):
                    raise CorruptModel("SVM weight length does not match feature_dim")
                A, B = (float(v) for v in p["platt"])
                return cls("svm", dim, cfg, weights=arrays[0], bias=float(p["bias"]),
                           mean=arrays[1], scale=arrays[2], platt=(A, B))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptModel(f"malformed model: {exc}") from exc
        raise CorruptModel(f"unknown algo {data.get('algo')!r}")


def _as_labels(y) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype.kind in "USO":
        y = (y == "artcode").astype(np.int64)
    return y.astype(np.int64)


def train(X, y, cfg: TrainConfig = TrainConfig()) -> TrainedModel:
    """Fit a model on rows of ``X`` with labels ``y`` (1/0 or label strings)."""
    X = np.asarray(X, dtype=np.float64)
    y = _as_labels(y)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch(f"features {X.shape} do not match {len(y)} labels")
    if not np.all(np.isfinite(X)):
        raise InvalidSpec("features must be finite")
    n_pos = int(y.sum())
    if n_pos < 2 or len(y) - n_pos < 2:
        raise DegenerateTrainingSet(f"need two samples per class, got {n_pos} artcode / {len(y) - n_pos} other")
    dim = X.shape[1]
    if cfg.algo == "rf":
        k = cfg.subsample_for(dim)
        trees = []
        for i in range(cfg.n_trees):
            rng = np.random.default_rng(cfg.seed + i)
            boot = rng.integers(0, len(y), size=len(y))
            trees.append(grow_tree(X[boot], y[boot], cfg.max_depth, cfg.min_leaf, k, rng))
        return TrainedModel("rf", dim, cfg, trees=tuple(trees))
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale
    w, b = fit_linear_svm(Z, y, cfg)
    A, B = platt_fit(Z @ w + b, y)
    return TrainedModel("svm", dim, cfg, weights=w, bias=b, mean=mean, scale=scale, platt=(A, B))


def predict_proba(model: TrainedModel, x) -> Prediction:
    return model.predict(x)


def save_model(model: TrainedModel, path) -> None:
    try:
        Path(path).write_text(json.dumps(model.to_json(), indent=1) + "\n")
    except OSError as exc:
        raise DatasetError(f"cannot write model {path}: {exc}") from exc


def load_model(path) -> TrainedModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DatasetError(f"cannot read model {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except ValueError as exc:
        raise CorruptModel(f"{path} is not valid JSON") from exc
    return TrainedModel.from_json(data)
