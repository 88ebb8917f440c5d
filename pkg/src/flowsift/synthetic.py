"""Synthetic datasets with known structure, for tests and demos."""
from __future__ import annotations

import numpy as np

from .dataset import Dataset, FeatureSchema


def planted_redundancy(n: int = 5000, n_noise: int = 7, seed: int = 0) -> Dataset:
    """Columns: f1 strong signal, f2 exact copy of f1, f3 weaker signal independent of f1, then noise.

    Labels are ``1[f1 + 0.5 * f3 + noise > 0]`` so f1 and f3 are both
    informative while being uncorrelated with each other.
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = rng.standard_normal(n)
    y = (a + 0.5 * b + 0.3 * rng.standard_normal(n) > 0).astype(np.int64)
    cols = [a, a.copy(), b] + [rng.standard_normal(n) for _ in range(n_noise)]
    names = ["f1", "f2", "f3"] + [f"noise{i + 1}" for i in range(n_noise)]
    return Dataset(np.column_stack(cols), y, tuple(names))


def separable_blobs(n: int = 2000, d: int = 2, gap: float = 4.0, seed: int = 0) -> Dataset:
    """Two Gaussian blobs with a guaranteed empty margin along the first axis."""
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], [n // 2, n - n // 2])
    X = rng.standard_normal((n, d))
    X[:, 0] = np.abs(X[:, 0]) + gap / 2
    X[y == 0, 0] *= -1
    return Dataset(X, y, tuple(f"x{i + 1}" for i in range(d)))


def flow_like(n_per_class: int = 5000, seed: int = 0, inf_rate: float = 0.001) -> Dataset:
    """A 63-column dataset shaped like CIC flow exports.

    Byte and packet-size columns separate the classes strongly, timing
    columns weakly, a few flag columns are constant, and the rate columns
    contain occasional infinities. The values are not meant to resemble
    real traffic beyond that.
    """
    schema = FeatureSchema.cic_ids2018()
    rng = np.random.default_rng(seed)
    n = 2 * n_per_class
    y = np.repeat([0, 1], n_per_class)
    X = np.empty((n, 63))
    # per-class log-scale location of each column
    shift = rng.normal(0.0, 0.15, size=63)
    strong = [4, 5, 6, 8, 35, 44, 45, 49, 51, 18, 21, 52]
    for i in strong:
        shift[i - 1] = rng.choice([-1, 1]) * rng.uniform(0.8, 2.0)
    for j in range(63):
        base = rng.uniform(1.0, 8.0)
        loc = np.where(y == 1, base + shift[j], base)
        X[:, j] = np.round(np.exp(rng.normal(loc, 0.6)), 3)
    for i in (28, 42, 57):
        X[:, i - 1] = 0.0
    # packet length mean/std/variance relationships
    X[:, 36] = X[:, 35] ** 2
    X[:, 48] = X[:, 3] * (1 + 0.01 * rng.standard_normal(n))
    for i in (31, 32):
        hit = rng.random(n) < inf_rate
        X[hit, i - 1] = np.inf
    return Dataset(X, y, tuple(schema.names))
