"""Bagged random forest over :mod:`flowsift.classifier.tree`."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..selectors import Ranking, rank_scores
from .tree import ClassifierError, TreeNode, TreeParams, _check_xy, grow, predict_tree

THREADS_ENV = "FLOWSIFT_THREADS"


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    features_per_split: int | None = None  # None -> ceil(sqrt(d))
    bootstrap: bool = True
    seed: int = 0
    max_depth: int | None = None
    min_samples_split: int = 2

    def __post_init__(self):
        if self.n_trees < 1:
            raise ClassifierError("n_trees must be at least 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ClassifierError("features_per_split must be at least 1")

    def tree_params(self) -> TreeParams:
        return TreeParams(max_depth=self.max_depth, min_samples_split=self.min_samples_split)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Forest:
    trees: list[TreeNode]
    params: ForestParams
    feature_ids: tuple[int, ...]

    @property
    def n_features(self) -> int:
        return len(self.feature_ids)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        cap = int(raw)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, cap)


def _fit_one(X, y, params: ForestParams, m: int, seed_seq: np.random.SeedSequence) -> TreeNode:
    rng = np.random.default_rng(seed_seq)
    n, d = X.shape
    if params.bootstrap:
        rows = rng.integers(0, n, size=n)
        X, y = X[rows], y[rows]

    def choose(d_):
        if m >= d_:
            return list(range(d_))
        return sorted(int(f) for f in rng.choice(d_, size=m, replace=False))

    return grow(X, y, params.tree_params(), choose)


def fit_forest(X, y, params: ForestParams | None = None, feature_ids=None) -> Forest:
    """Fit ``n_trees`` trees, each on its own bootstrap resample and per-node feature draw.

    Per-tree generators are spawned from ``params.seed``, so the result does
    not depend on how many worker threads are used.
    """
    params = params or ForestParams()
    X, y = _check_xy(X, y)
    d = X.shape[1]
    if feature_ids is None:
        feature_ids = tuple(range(1, d + 1))
    if len(feature_ids) != d:
        raise ClassifierError(f"{len(feature_ids)} feature ids for {d} columns")
    m = params.features_per_split or math.ceil(math.sqrt(d))
    seeds = np.random.SeedSequence(params.seed).spawn(params.n_trees)
    workers = min(worker_count(), params.n_trees)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(lambda s: _fit_one(X, y, params, m, s), seeds))
    else:
        trees = [_fit_one(X, y, params, m, s) for s in seeds]
    return Forest(trees=trees, params=params, feature_ids=tuple(int(i) for i in feature_ids))


def predict_forest(forest: Forest, X) -> np.ndarray:
    """Majority vote over trees; a split vote goes to class 0."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    votes = np.zeros(X.shape[0], dtype=np.int64)
    for tree in forest.trees:
        votes += predict_tree(tree, X)
    return (2 * votes > len(forest.trees)).astype(np.int64)


def importances(forest: Forest) -> np.ndarray:
    """Sample-weighted Gini decrease per column, summed over trees and normalized to 1."""
    total = np.zeros(forest.n_features)
    for tree in forest.trees:
        for node in tree.walk():
            if node.is_leaf:
                continue
            drop = (node.n_samples * node.gini
                    - node.left.n_samples * node.left.gini
                    - node.right.n_samples * node.right.gini)
            total[node.feature] += max(drop, 0.0)
    s = total.sum()
    return total / s if s > 0 else total


def feature_importance(forest: Forest) -> Ranking:
    imp = importances(forest)
    # rank columns, then report them by their feature ids
    ranked = rank_scores(imp, "TreeImportance", {"forest": forest.params.to_dict()})
    ranked.order = [forest.feature_ids[j - 1] for j in ranked.order]
    return ranked
