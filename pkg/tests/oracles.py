"""Slow, independent reference computations used to check the fast paths.

Nothing here imports flowsift; these are written from the definitions.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

TIE_TOL = 1e-12


def pearson(x, y) -> float:
    """Closed-form sum formula; 0 for a constant input."""
    n = len(x)
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(set(x)) == 1 or len(set(y)) == 1:
        return 0.0
    sx, sy = math.fsum(x), math.fsum(y)
    sxy = math.fsum(a * b for a, b in zip(x, y))
    sxx = math.fsum(a * a for a in x)
    syy = math.fsum(b * b for b in y)
    num = n * sxy - sx * sy
    den = math.sqrt((n * sxx - sx * sx) * (n * syy - sy * sy))
    return max(-1.0, min(1.0, num / den))


def entropy(values) -> float:
    counts = Counter(values)
    n = sum(counts.values())
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def mutual_information(a, b) -> float:
    """Direct sum over the joint histogram."""
    n = len(a)
    joint = Counter(zip(a, b))
    pa = Counter(a)
    pb = Counter(b)
    total = 0.0
    for (u, v), c in joint.items():
        total += (c / n) * math.log2(c * n / (pa[u] * pb[v]))
    return max(0.0, total)


def quantile_edges(x, n_bins: int) -> list[Fraction]:
    """Exact interior quantiles (linear interpolation), merged, cuts at/above the max dropped."""
    s = sorted(Fraction(float(v)) for v in x)
    n = len(s)
    edges = set()
    for j in range(1, n_bins):
        pos = Fraction((n - 1) * j, n_bins)
        i = math.floor(pos)
        frac = pos - i
        e = s[i] if frac == 0 else s[i] + frac * (s[i + 1] - s[i])
        if e < s[-1]:
            edges.add(e)
    return sorted(edges)


def bin_codes(x, n_bins: int) -> list[int]:
    edges = quantile_edges(x, n_bins)
    return [sum(1 for e in edges if e < Fraction(float(v))) for v in x]


def relevance(x, labels, n_bins: int) -> float:
    return mutual_information(bin_codes(x, n_bins), list(labels)) / entropy(list(labels))


def _argmax_lowest(scores: dict) -> int:
    top = max(scores.values())
    return min(j for j, s in scores.items() if s >= top - TIE_TOL)


def greedy(columns, labels, k, beta=1.0, n_bins=10, mode="mean", kind="micorr") -> list[int]:
    """Exhaustive per-step re-scoring of every remaining candidate; returns 1-based indices."""
    d = len(columns)
    if kind == "micorr":
        rel = {j: relevance(columns[j], labels, n_bins) for j in range(d)}
    else:
        rel = {j: abs(pearson(columns[j], [float(v) for v in labels])) for j in range(d)}
    memo = {}

    def corr(i, j):
        key = (min(i, j), max(i, j))
        if key not in memo:
            memo[key] = abs(pearson(columns[i], columns[j]))
        return memo[key]

    chosen: list[int] = []
    while len(chosen) < k:
        scores = {}
        for j in range(d):
            if j in chosen:
                continue
            reds = [corr(j, s) for s in chosen]
            if not reds:
                red = 0.0
            elif mode == "mean":
                red = math.fsum(reds) / len(reds)
            else:
                red = max(reds)
            scores[j] = rel[j] - beta * red
        chosen.append(_argmax_lowest(scores))
    return [j + 1 for j in chosen]


def gini_weighted(labels) -> Fraction:
    """n * gini as an exact fraction."""
    n = len(labels)
    if n == 0:
        return Fraction(0)
    n1 = sum(labels)
    n0 = n - n1
    return Fraction(n) - Fraction(n0 * n0 + n1 * n1, n)


def best_split(rows, labels):
    """Enumerate every (feature, midpoint) split; lowest weighted Gini, then lowest feature, then threshold."""
    best = None
    d = len(rows[0])
    for f in range(d):
        vals = sorted(set(r[f] for r in rows))
        for lo, hi in zip(vals, vals[1:]):
            thr = lo + (hi - lo) / 2
            left = [y for r, y in zip(rows, labels) if r[f] <= thr]
            right = [y for r, y in zip(rows, labels) if r[f] > thr]
            imp = gini_weighted(left) + gini_weighted(right)
            if best is None or imp < best[0]:
                best = (imp, f, thr)
    return None if best is None else (best[1], best[2])


def depth2_perfect_exists(rows, labels) -> bool:
    """Brute force over every depth<=2 axis-aligned tree with midpoint thresholds."""
    d = len(rows[0])
    cands = []
    for f in range(d):
        vals = sorted(set(r[f] for r in rows))
        cands += [(f, (a + b) / 2) for a, b in zip(vals, vals[1:])]

    def pure_or_split_pure(idx):
        ys = {labels[i] for i in idx}
        if len(ys) <= 1:
            return True
        for f, t in cands:
            left = {labels[i] for i in idx if rows[i][f] <= t}
            right = {labels[i] for i in idx if rows[i][f] > t}
            if len(left) <= 1 and len(right) <= 1:
                return True
        return False

    every = list(range(len(rows)))
    if pure_or_split_pure(every):
        return True
    for f, t in cands:
        left = [i for i in every if rows[i][f] <= t]
        right = [i for i in every if rows[i][f] > t]
        if pure_or_split_pure(left) and pure_or_split_pure(right):
            return True
    return False


def confusion(y_true, y_pred):
    tp = sum(1 for a, b in zip(y_true, y_pred) if a == 1 and b == 1)
    fp = sum(1 for a, b in zip(y_true, y_pred) if a == 0 and b == 1)
    tn = sum(1 for a, b in zip(y_true, y_pred) if a == 0 and b == 0)
    fn = sum(1 for a, b in zip(y_true, y_pred) if a == 1 and b == 0)
    return tp, fp, tn, fn


