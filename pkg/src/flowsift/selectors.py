"""Filter feature selectors: MICorr and the three benchmark methods.

Every selector returns a :class:`Ranking` of 1-based feature indices. Argmax
ties (scores within ``TIE_TOL``) always go to the lowest feature index.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .dataset import Dataset
from .stats import (
    DEFAULT_BINS,
    REDUNDANCY_MODES,
    StatsError,
    aggregate_redundancy,
    pearson_many,
    redundancy,
    relevance,
    relevance_many,
)

TIE_TOL = 1e-12

METHODS = ("MICorr", "U-MI", "FS-Corr", "U-Corr", "TreeImportance")


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class SelectorConfig:
    k: int = 10
    beta: float = 1.0
    bins: int = DEFAULT_BINS
    redundancy_mode: str = "mean"

    def __post_init__(self):
        if self.k < 1:
            raise SelectionError(f"k must be at least 1, got {self.k}")
        if not self.beta >= 0:
            raise SelectionError(f"beta must be non-negative, got {self.beta}")
        if self.bins < 2:
            raise SelectionError(f"bins must be at least 2, got {self.bins}")
        if self.redundancy_mode not in REDUNDANCY_MODES:
            raise SelectionError(f"redundancy_mode must be one of {REDUNDANCY_MODES}")

    def check(self, d: int) -> None:
        if self.k > d:
            raise SelectionError(f"k={self.k} exceeds the {d} available features")


@dataclass
class Ranking:
    method: str
    order: list[int]
    scores: list[float]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.order) != len(self.scores):
            raise SelectionError("order and scores must have equal length")
        if len(set(self.order)) != len(self.order) or any(i < 1 for i in self.order):
            raise SelectionError("ranking indices must be unique and 1-based")

    def top(self, k: int) -> list[int]:
        if k > len(self.order):
            raise SelectionError(f"k={k} exceeds ranking length {len(self.order)}")
        return list(self.order[:k])

    def to_dict(self) -> dict:
        return {"method": self.method, "order": list(self.order),
                "scores": list(self.scores), "config": dict(self.config)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Ranking":
        d = json.loads(text)
        return cls(method=d["method"], order=[int(i) for i in d["order"]],
                   scores=[float(s) for s in d["scores"]], config=d.get("config", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "feature_index"])
        for r, i in enumerate(self.order, start=1):
            w.writerow([r, i])
        return buf.getvalue()


def best_candidate(scores, candidates) -> int:
    """Position in ``candidates`` of the best score; near-ties go to the lowest feature index."""
    scores = np.asarray(scores, dtype=float)
    top = scores.max()
    tied = [c for c, s in zip(candidates, scores) if s >= top - TIE_TOL]
    return candidates.index(min(tied))


def rank_scores(values, method: str, config: dict) -> Ranking:
    """Ranking of all features by descending score."""
    values = np.asarray(values, dtype=float)
    out: list[int] = []
    remaining = list(range(values.size))
    while remaining:
        pos = best_candidate(values[remaining], remaining)
        out.append(remaining.pop(pos))
    return Ranking(method, [int(j) + 1 for j in out], [float(values[j]) for j in out], config)


def _labels(ds: Dataset) -> np.ndarray:
    if ds.n_rows == 0 or np.all(ds.y == ds.y[0]):
        raise SelectionError("selection needs both classes present in the labels")
    return ds.y


def rank_univariate_corr(ds: Dataset) -> Ranking:
    """Rank features by |Pearson correlation| with the 0/1 labels."""
    y = _labels(ds).astype(float)
    return rank_scores(np.abs(pearson_many(ds.X, y)), "U-Corr", {})


def rank_univariate_mi(ds: Dataset, bins: int = DEFAULT_BINS) -> Ranking:
    """Rank features by normalized mutual information with the labels."""
    y = _labels(ds)
    return rank_scores(relevance_many(ds.X, y, bins), "U-MI", {"bins": bins})


def micorr_score(x, labels, selected, beta: float = 1.0, bins: int = DEFAULT_BINS,
                 mode: str = "mean") -> float:
    """Relevance of ``x`` minus ``beta`` times its redundancy with ``selected``."""
    try:
        return relevance(x, labels, bins) - beta * redundancy(x, selected, mode)
    except StatsError as exc:
        raise SelectionError(str(exc)) from exc


def _greedy(X: np.ndarray, rel: np.ndarray, cfg: SelectorConfig, method: str) -> Ranking:
    d = X.shape[1]
    cfg.check(d)
    # |corr| of every column with each selected column, filled one row per step
    abs_corr = np.zeros((cfg.k, d))
    remaining = list(range(d))
    order: list[int] = []
    scores: list[float] = []
    for step in range(cfg.k):
        if step == 0:
            cand = rel[remaining]
        else:
            red = [aggregate_redundancy(abs_corr[:step, j], cfg.redundancy_mode) for j in remaining]
            cand = rel[remaining] - cfg.beta * np.asarray(red)
        pos = best_candidate(cand, remaining)
        winner = remaining.pop(pos)
        order.append(winner + 1)
        scores.append(float(cand[pos]))
        if step + 1 < cfg.k:
            abs_corr[step] = np.abs(pearson_many(X, X[:, winner]))
    return Ranking(method, order, scores, asdict(cfg))


def select_micorr(ds: Dataset, cfg: SelectorConfig) -> Ranking:
    """Greedy forward search on relevance minus weighted correlation redundancy.

    Starts from the most relevant feature, then repeatedly adds the remaining
    feature with the highest :func:`micorr_score` until ``cfg.k`` are chosen.
    ``scores[i]`` is the winning score at step ``i``.
    """
    y = _labels(ds)
    cfg.check(ds.n_features)
    return _greedy(ds.X, relevance_many(ds.X, y, cfg.bins), cfg, "MICorr")


def select_forward_corr(ds: Dataset, cfg: SelectorConfig) -> Ranking:
    """Same greedy loop as :func:`select_micorr` with |correlation to labels| as relevance."""
    y = _labels(ds).astype(float)
    cfg.check(ds.n_features)
    rel = np.abs(pearson_many(ds.X, y))
    ranking = _greedy(ds.X, rel, cfg, "FS-Corr")
    ranking.config.pop("bins")
    return ranking
