"""Statistical kernel: correlation, quantile binning, entropy and mutual information.

All information quantities are in bits. Continuous features are discretized
with equal-frequency (quantile) bins before any entropy is taken.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_BINS = 10
REDUNDANCY_MODES = ("mean", "max")


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class BinCodes:
    codes: np.ndarray
    n_bins: int
    edges: np.ndarray


def _as_vector(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise StatsError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def _is_constant(v: np.ndarray) -> bool:
    # exact check; a centered sum can be non-zero for constant input
    return v.size == 0 or bool(np.all(v == v[0]))


def _unit_scale(v: np.ndarray) -> np.ndarray:
    # correlation is scale-free; this keeps the sums of squares from overflowing
    m = np.max(np.abs(v))
    return v / m if m > 0 else v


def pearson(x, y) -> float:
    """Sample Pearson correlation, 0.0 when either input has zero variance."""
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    if x.size != y.size:
        raise StatsError(f"length mismatch: {x.size} != {y.size}")
    if x.size < 2:
        raise StatsError("pearson needs at least 2 samples")
    if _is_constant(x) or _is_constant(y):
        return 0.0
    x, y = _unit_scale(x), _unit_scale(y)
    dx = x - x.mean()
    dy = y - y.mean()
    denom = np.sqrt(np.dot(dx, dx) * np.dot(dy, dy))
    if denom == 0.0:
        return 0.0
    r = float(np.dot(dx, dy) / denom)
    return min(1.0, max(-1.0, r))


def pearson_many(X, y) -> np.ndarray:
    """Correlation of every column of ``X`` with ``y``, same conventions as :func:`pearson`."""
    X = np.asarray(X, dtype=float)
    y = _as_vector(y, "y")
    if X.ndim != 2 or X.shape[0] != y.size:
        raise StatsError(f"shape mismatch: X {X.shape} vs y ({y.size},)")
    if y.size < 2:
        raise StatsError("pearson needs at least 2 samples")
    out = np.zeros(X.shape[1])
    if _is_constant(y):
        return out
    y = _unit_scale(y)
    dy = y - y.mean()
    syy = np.dot(dy, dy)
    for j in range(X.shape[1]):
        col = X[:, j]
        if _is_constant(col):
            continue
        col = _unit_scale(col)
        dx = col - col.mean()
        denom = np.sqrt(np.dot(dx, dx) * syy)
        if denom > 0.0:
            out[j] = np.dot(dx, dy) / denom
    return np.clip(out, -1.0, 1.0)


def _quantile_edges(sorted_x: np.ndarray, n_bins: int) -> np.ndarray:
    n = sorted_x.size
    edges = np.empty(n_bins - 1)
    for j in range(1, n_bins):
        # position (n-1)*j/B in exact integer arithmetic
        i, rem = divmod((n - 1) * j, n_bins)
        lo = sorted_x[i]
        if rem == 0:
            edges[j - 1] = lo
            continue
        hi = sorted_x[i + 1]
        e = lo + (rem / n_bins) * (hi - lo)
        if e >= hi and hi > lo:
            # interpolation rounded up onto the next order statistic
            e = np.nextafter(hi, -np.inf)
        edges[j - 1] = e
    return edges


def equal_frequency_bins(x, n_bins: int = DEFAULT_BINS) -> BinCodes:
    """Discretize ``x`` at its ``n_bins - 1`` interior quantiles.

    Quantiles use linear interpolation between order statistics. Duplicate
    cut points are merged and cuts at or above the maximum are dropped, so
    heavily tied inputs get fewer effective bins. A value equal to a cut
    point falls in the lower bin.
    """
    if n_bins < 2:
        raise StatsError(f"need at least 2 bins, got {n_bins}")
    x = _as_vector(x)
    if x.size < n_bins:
        raise StatsError(f"need at least {n_bins} samples for {n_bins} bins, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise StatsError("cannot bin non-finite values")
    sx = np.sort(x)
    edges = np.unique(_quantile_edges(sx, n_bins))
    edges = edges[edges < sx[-1]]
    codes = np.searchsorted(edges, x, side="left")
    return BinCodes(codes=codes.astype(np.int64), n_bins=edges.size + 1, edges=edges)


def _counts(codes: np.ndarray) -> np.ndarray:
    # 2-D input counts joint symbols (rows)
    _, counts = np.unique(codes, return_counts=True, axis=0 if codes.ndim > 1 else None)
    return counts


def _entropy_from_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    n = counts.sum()
    p = counts / n
    return float(-np.sum(p * np.log2(p)))


def entropy(codes) -> float:
    """Plug-in Shannon entropy of a discrete vector (or of the rows of a 2-D array), in bits."""
    codes = np.asarray(codes)
    if codes.size == 0:
        raise StatsError("entropy of an empty vector is undefined")
    return max(0.0, _entropy_from_counts(_counts(codes)))


def contingency(cx, cy) -> np.ndarray:
    cx = np.asarray(cx)
    cy = np.asarray(cy)
    if cx.shape != cy.shape:
        raise StatsError(f"length mismatch: {cx.size} != {cy.size}")
    if cx.size == 0:
        raise StatsError("mutual information of empty vectors is undefined")
    _, ix = np.unique(cx, return_inverse=True)
    _, iy = np.unique(cy, return_inverse=True)
    ny = iy.max() + 1
    joint = np.bincount(ix.ravel() * ny + iy.ravel(), minlength=(ix.max() + 1) * ny)
    return joint.reshape(-1, ny)


def mutual_information(cx, cy) -> float:
    """Plug-in mutual information of two discrete vectors, in bits."""
    table = contingency(cx, cy)
    n = table.sum()
    px = table.sum(axis=1) / n
    py = table.sum(axis=0) / n
    nz = table > 0
    pxy = table[nz] / n
    outer = np.outer(px, py)[nz]
    return max(0.0, float(np.sum(pxy * np.log2(pxy / outer))))


def _check_labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise StatsError("labels must be one-dimensional")
    if labels.size == 0 or np.all(labels == labels[0]):
        raise StatsError("relevance is undefined for constant labels")
    return labels


def relevance(x, labels, n_bins: int = DEFAULT_BINS) -> float:
    """Mutual information of the binned feature with the labels, divided by H(labels)."""
    labels = _check_labels(labels)
    x = _as_vector(x)
    if x.size != labels.size:
        raise StatsError(f"length mismatch: {x.size} != {labels.size}")
    codes = equal_frequency_bins(x, n_bins).codes
    value = mutual_information(codes, labels) / entropy(labels)
    return min(1.0, max(0.0, value))


def relevance_many(X, labels, n_bins: int = DEFAULT_BINS) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.array([relevance(X[:, j], labels, n_bins) for j in range(X.shape[1])])


def aggregate_redundancy(abs_corrs, mode: str = "mean") -> float:
    abs_corrs = np.asarray(abs_corrs, dtype=float)
    if mode not in REDUNDANCY_MODES:
        raise StatsError(f"unknown redundancy mode {mode!r}; expected one of {REDUNDANCY_MODES}")
    if abs_corrs.size == 0:
        return 0.0
    return float(abs_corrs.mean() if mode == "mean" else abs_corrs.max())


def redundancy(x, selected, mode: str = "mean") -> float:
    """Mean (or max) absolute correlation between ``x`` and each already-selected vector."""
    x = _as_vector(x)
    corrs = []
    for s in selected:
        s = _as_vector(s, "selected")
        if s.size != x.size:
            raise StatsError(f"length mismatch: {x.size} != {s.size}")
        corrs.append(abs(pearson(x, s)))
    return aggregate_redundancy(corrs, mode)
