import csv

import numpy as np

from flowsift.dataset import FeatureSchema

SCHEMA = FeatureSchema.cic_ids2018()


def write_raw_csv(path, X, labels, names=None, label_col="Label", shuffle_cols=None):
    """Write a raw flow CSV; cells in ``X`` may be strings."""
    names = list(names or SCHEMA.names)
    order = list(range(len(names)))
    if shuffle_cols is not None:
        order = list(shuffle_cols)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([names[j] for j in order] + [label_col])
        for row, lab in zip(X, labels):
            w.writerow([row[j] for j in order] + [lab])


def random_flow_rows(n, seed=0):
    rng = np.random.default_rng(seed)
    return np.round(rng.lognormal(2.0, 1.0, size=(n, 63)), 4)
