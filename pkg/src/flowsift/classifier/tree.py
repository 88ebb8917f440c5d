"""CART decision tree with Gini impurity for binary labels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ClassifierError(ValueError):
    pass


@dataclass(frozen=True)
class TreeParams:
    max_depth: int | None = None
    min_samples_split: int = 2
    impurity: str = "gini"

    def __post_init__(self):
        if self.min_samples_split < 2:
            raise ClassifierError("min_samples_split must be at least 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ClassifierError("max_depth must be non-negative")
        if self.impurity != "gini":
            raise ClassifierError(f"unsupported impurity {self.impurity!r}")


@dataclass(eq=False)
class TreeNode:
    """A node routes a row left iff ``row[feature] <= threshold``; leaves have ``feature is None``."""

    class_counts: tuple[int, int]
    feature: int | None = None
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    _flat: tuple | None = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def predicted_class(self) -> int:
        n0, n1 = self.class_counts
        return 1 if n1 > n0 else 0

    @property
    def n_samples(self) -> int:
        return self.class_counts[0] + self.class_counts[1]

    @property
    def gini(self) -> float:
        return gini(*self.class_counts)

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth(), self.right.depth())

    def flat(self):
        """Array form ``(feature, threshold, left, right, value)``; feature -1 marks a leaf."""
        if self._flat is None:
            nodes = list(self.walk())
            pos = {id(n): i for i, n in enumerate(nodes)}
            feat = np.array([-1 if n.is_leaf else n.feature for n in nodes], dtype=np.int64)
            thr = np.array([n.threshold for n in nodes], dtype=float)
            left = np.array([pos[id(n.left)] if not n.is_leaf else -1 for n in nodes], dtype=np.int64)
            right = np.array([pos[id(n.right)] if not n.is_leaf else -1 for n in nodes], dtype=np.int64)
            value = np.array([n.predicted_class for n in nodes], dtype=np.int64)
            self._flat = (feat, thr, left, right, value)
        return self._flat


def gini(n0: int, n1: int) -> float:
    n = n0 + n1
    if n == 0:
        return 0.0
    p = n1 / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _split_tol(n: int) -> float:
    return 1e-10 * max(1, n)


def best_split(X: np.ndarray, y: np.ndarray, features) -> tuple[int, float, float] | None:
    """Lowest weighted-Gini split over ``features``.

    Returns ``(feature, threshold, weighted_impurity)`` where the impurity is
    ``n_left * gini_left + n_right * gini_right``, or None if every feature is
    constant. Candidate thresholds are midpoints of consecutive distinct values;
    near-ties go to the earlier feature in ``features`` and then the lower threshold.
    """
    n = y.size
    tol = _split_tol(n)
    n1 = int(y.sum())
    nl = np.arange(1, n, dtype=float)
    nr = n - nl
    best = None
    for f in features:
        v = X[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        distinct = vs[:-1] < vs[1:]
        if not distinct.any():
            continue
        c1 = np.cumsum(y[order])[:-1].astype(float)
        c1r = n1 - c1
        c0 = nl - c1
        c0r = nr - c1r
        imp = (nl - (c1 * c1 + c0 * c0) / nl) + (nr - (c1r * c1r + c0r * c0r) / nr)
        imp = np.where(distinct, imp, np.inf)
        low = imp.min()
        if best is not None and not low < best[2] - tol:
            continue
        i = int(np.flatnonzero(imp <= low + tol)[0])
        lo, hi = vs[i], vs[i + 1]
        thr = lo + (hi - lo) / 2.0
        if not lo <= thr < hi:
            # midpoint of adjacent floats can round onto the upper value
            thr = lo
        best = (int(f), float(thr), float(low))
    return best


def grow(X: np.ndarray, y: np.ndarray, params: TreeParams, choose_features=None) -> TreeNode:
    """Grow a tree depth-first; ``choose_features(d)`` returns candidate columns per node."""
    d = X.shape[1]
    all_features = list(range(d))
    root = None
    stack = [(None, "", np.arange(y.size), 0)]
    while stack:
        parent, side, rows, depth = stack.pop()
        yn = y[rows]
        n1 = int(yn.sum())
        node = TreeNode(class_counts=(yn.size - n1, n1))
        if parent is None:
            root = node
        else:
            setattr(parent, side, node)
        if (
            n1 == 0
            or n1 == yn.size
            or yn.size < params.min_samples_split
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        Xn = X[rows]
        if choose_features is None:
            found = best_split(Xn, yn, all_features)
        else:
            drawn = choose_features(d)
            found = best_split(Xn, yn, drawn)
            if found is None:
                # every drawn feature is constant here; keep looking among the rest
                rest = [f for f in all_features if f not in set(drawn)]
                found = best_split(Xn, yn, rest)
        if found is None:
            continue
        f, thr, _ = found
        go_left = Xn[:, f] <= thr
        node.feature = f
        node.threshold = thr
        stack.append((node, "right", rows[~go_left], depth + 1))
        stack.append((node, "left", rows[go_left], depth + 1))
    return root


def _check_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ClassifierError(f"need at least one sample and one feature, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise ClassifierError(f"{y.size} labels for {X.shape[0]} rows")
    if not np.isin(y, (0, 1)).all():
        raise ClassifierError("labels must be 0 or 1")
    return X, y


def fit_tree(X, y, params: TreeParams | None = None) -> TreeNode:
    """Fit a deterministic CART tree on all features."""
    X, y = _check_xy(X, y)
    return grow(X, y, params or TreeParams())


def predict_tree(tree: TreeNode, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    feat, thr, left, right, value = tree.flat()
    if feat.size and feat.max() >= X.shape[1]:
        raise ClassifierError(f"tree uses column {feat.max()} but rows have {X.shape[1]} columns")
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.flatnonzero(feat[node] >= 0)
    while active.size:
        cur = node[active]
        go_left = X[active, feat[cur]] <= thr[cur]
        node[active] = np.where(go_left, left[cur], right[cur])
        active = active[feat[node[active]] >= 0]
    return value[node]


def tree_to_dict(tree: TreeNode, feature_ids=None, names=None) -> dict:
    """Nested JSON-ready export; features are reported by 1-based index and name."""

    def conv(node: TreeNode) -> dict:
        if node.is_leaf:
            return {"leaf": True, "class": node.predicted_class, "counts": list(node.class_counts)}
        fid = feature_ids[node.feature] if feature_ids is not None else node.feature + 1
        out = {"feature": int(fid)}
        if names is not None:
            out["name"] = names[node.feature]
        out["threshold"] = node.threshold
        out["left"] = conv(node.left)
        out["right"] = conv(node.right)
        return out

    return conv(tree)
