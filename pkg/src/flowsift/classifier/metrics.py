"""Confusion-matrix metrics with DDoS (label 1) as the positive class."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .tree import ClassifierError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return asdict(self)


def metrics(y_true, y_pred) -> Metrics:
    """Accuracy, precision and recall; an empty denominator yields 1.0 and a log note."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ClassifierError(f"length mismatch: {y_true.size} != {y_pred.size}")
    if y_true.size == 0:
        raise ClassifierError("metrics need at least one prediction")
    tp = int(np.sum((y_true == 1) & (y_pred == 1)))
    fp = int(np.sum((y_true == 0) & (y_pred == 1)))
    tn = int(np.sum((y_true == 0) & (y_pred == 0)))
    fn = int(np.sum((y_true == 1) & (y_pred == 0)))
    if tp + fp == 0:
        log.info("no positive predictions; precision reported as 1.0")
        precision = 1.0
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        log.info("no positive labels; recall reported as 1.0")
        recall = 1.0
    else:
        recall = tp / (tp + fn)
    return Metrics((tp + tn) / y_true.size, precision, recall, tp, fp, tn, fn)
