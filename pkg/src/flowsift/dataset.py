"""Loading, sanitizing, sampling and splitting CICFlowMeter flow CSVs."""
from __future__ import annotations

import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_LABEL_COLUMN = "Label"
CLASS_NAMES = ("benign", "DDoS")

# (index, canonical name, alternative headers seen in CIC-IDS2017 / CSE-CIC-IDS2018 exports)
_FEATURES = [
    (1, "Flow Duration", ()),
    (2, "Total Fwd Packets", ("Tot Fwd Pkts",)),
    (3, "Total Bwd Packets", ("Total Backward Packets", "Tot Bwd Pkts")),
    (4, "Total Len Fwd Packets", ("Total Length of Fwd Packets", "TotLen Fwd Pkts")),
    (5, "Total Len of Bwd Packets", ("Total Length of Bwd Packets", "TotLen Bwd Pkts")),
    (6, "Fwd Packet Len Max", ("Fwd Packet Length Max", "Fwd Pkt Len Max")),
    (7, "Fwd Packet Len Min", ("Fwd Packet Length Min", "Fwd Pkt Len Min")),
    (8, "Fwd Packet Len Mean", ("Fwd Packet Length Mean", "Fwd Pkt Len Mean")),
    (9, "Fwd Packet Len Std", ("Fwd Packet Length Std", "Fwd Pkt Len Std")),
    (10, "Bwd Packet Len Max", ("Bwd Packet Length Max", "Bwd Pkt Len Max")),
    (11, "Bwd Packet Len Min", ("Bwd Packet Length Min", "Bwd Pkt Len Min")),
    (12, "Bwd Packet Len Mean", ("Bwd Packet Length Mean", "Bwd Pkt Len Mean")),
    (13, "Bwd Packet Len Std", ("Bwd Packet Length Std", "Bwd Pkt Len Std")),
    (14, "Flow IAT Mean", ()),
    (15, "Flow IAT Std", ()),
    (16, "Flow IAT Max", ()),
    (17, "Flow IAT Min", ()),
    (18, "Fwd IAT Total", ("Fwd IAT Tot",)),
    (19, "Fwd IAT Mean", ()),
    (20, "Fwd IAT Std", ()),
    (21, "Fwd IAT Max", ()),
    (22, "Fwd IAT Min", ()),
    (23, "Bwd IAT Total", ("Bwd IAT Tot",)),
    (24, "Bwd IAT Mean", ()),
    (25, "Bwd IAT Std", ()),
    (26, "Bwd IAT Max", ()),
    (27, "Bwd IAT Min", ()),
    (28, "Fwd PSH Flags", ()),
    (29, "Fwd Header Len", ("Fwd Header Length",)),
    (30, "Bwd Header Len", ("Bwd Header Length",)),
    (31, "Fwd Packets/s", ("Fwd Pkts/s",)),
    (32, "Bwd Packets/s", ("Bwd Pkts/s",)),
    (33, "Min Packet Len", ("Min Packet Length", "Pkt Len Min")),
    (34, "Max Packet Len", ("Max Packet Length", "Pkt Len Max")),
    (35, "Packet Len Mean", ("Packet Length Mean", "Pkt Len Mean")),
    (36, "Packet Len Std", ("Packet Length Std", "Pkt Len Std")),
    (37, "Packet Len Variance", ("Packet Length Variance", "Pkt Len Var")),
    (38, "FIN Flag Count", ("FIN Flag Cnt",)),
    (39, "SYN Flag Count", ("SYN Flag Cnt",)),
    (40, "PSH Flag Count", ("PSH Flag Cnt",)),
    (41, "ACK Flag Count", ("ACK Flag Cnt",)),
    (42, "URG Flag Count", ("URG Flag Cnt",)),
    (43, "Down/Up Ratio", ()),
    (44, "Average Packet Size", ("Pkt Size Avg",)),
    (45, "Avg Fwd Seg Size", ("Avg Fwd Segment Size", "Fwd Seg Size Avg")),
    (46, "Avg Bwd Seg Size", ("Avg Bwd Segment Size", "Bwd Seg Size Avg")),
    # the 2017 export repeats this header; the 2018 export has it once
    (47, "Fwd Header Length", ("Fwd Header Length.1", "Fwd Header Len")),
    (48, "Subflow Fwd Packets", ("Subflow Fwd Pkts",)),
    (49, "Subflow Fwd Bytes", ("Subflow Fwd Byts",)),
    (50, "Subflow Bwd Packets", ("Subflow Bwd Pkts",)),
    (51, "Subflow Bwd Bytes", ("Subflow Bwd Byts",)),
    (52, "Init_Win_bytes_fwdd", ("Init_Win_bytes_forward", "Init Fwd Win Byts")),
    (53, "Init_Win_bytes_bwd", ("Init_Win_bytes_backward", "Init Bwd Win Byts")),
    (54, "act_data_pkt_fwd", ("Fwd Act Data Pkts",)),
    (55, "min_seg_size_fwd", ("min_seg_size_forward", "Fwd Seg Size Min")),
    (56, "Active Mean", ()),
    (57, "Active Std", ()),
    (58, "Active Max", ()),
    (59, "Active Min", ()),
    (60, "Idle Mean", ()),
    (61, "Idle Std", ()),
    (62, "Idle Max", ()),
    (63, "Idle Min", ()),
]


class DatasetError(ValueError):
    pass


class SchemaError(DatasetError):
    pass


def _norm(name: str) -> str:
    return re.sub(r"\s+", " ", name.strip()).lower()


@dataclass(frozen=True)
class FeatureSchema:
    entries: tuple[tuple[int, str], ...]
    label_column: str = DEFAULT_LABEL_COLUMN
    aliases: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        idx = [i for i, _ in self.entries]
        if idx != list(range(1, len(idx) + 1)):
            raise SchemaError("feature indices must be unique and contiguous from 1")
        names = [n for _, n in self.entries]
        if len(set(names)) != len(names):
            raise SchemaError("feature names must be unique")

    @classmethod
    def cic_ids2018(cls, label_column: str = DEFAULT_LABEL_COLUMN) -> "FeatureSchema":
        entries = tuple((i, name) for i, name, _ in _FEATURES)
        aliases = {i: alt for i, _, alt in _FEATURES}
        return cls(entries=entries, label_column=label_column, aliases=aliases)

    @classmethod
    def from_names(cls, names, label_column: str = DEFAULT_LABEL_COLUMN) -> "FeatureSchema":
        return cls(entries=tuple((i + 1, n) for i, n in enumerate(names)), label_column=label_column)

    @property
    def names(self) -> list[str]:
        return [n for _, n in self.entries]

    def __len__(self):
        return len(self.entries)

    def name(self, index: int) -> str:
        return self.entries[index - 1][1]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Flow feature matrix (rows x features, column-major) with binary labels.

    Labels are 0 for benign and 1 for DDoS. ``names[j]`` is the name of
    column ``j``, which has 1-based feature index ``j + 1``.
    """

    X: np.ndarray
    y: np.ndarray
    names: tuple[str, ...]
    unparsed: int = 0

    def __post_init__(self):
        X = np.array(self.X, dtype=float, order="F")
        y = np.array(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise DatasetError(f"feature matrix must be 2-D, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise DatasetError(f"label length {y.size} does not match {X.shape[0]} rows")
        if len(self.names) != X.shape[1]:
            raise DatasetError(f"{len(self.names)} names for {X.shape[1]} columns")
        if y.size and not np.isin(y, (0, 1)).all():
            raise DatasetError("labels must be 0 (benign) or 1 (DDoS)")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n1 = int(self.y.sum())
        return self.n_rows - n1, n1

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.X[rows], self.y[rows], self.names)

    def columns(self, indices) -> np.ndarray:
        """Columns for 1-based feature indices."""
        return self.X[:, [i - 1 for i in indices]]

    def with_columns(self, indices) -> "Dataset":
        cols = [i - 1 for i in indices]
        return Dataset(self.X[:, cols], self.y, tuple(self.names[c] for c in cols))

    def equals(self, other: "Dataset") -> bool:
        """Bit-level equality of values, labels and names."""
        return (
            self.names == other.names
            and self.X.shape == other.X.shape
            and np.array_equal(self.X.view(np.uint64), other.X.view(np.uint64))
            and np.array_equal(self.y, other.y)
        )


def encode_label(raw: str) -> int:
    s = raw.strip()
    if s in ("0", "1"):
        return int(s)
    return 0 if s.lower() == "benign" else 1


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _resolve_columns(header: list[str], schema: FeatureSchema) -> tuple[list[int], int]:
    lookup: dict[str, int] = {}
    seen: dict[str, int] = {}
    for pos, raw in enumerate(header):
        key = _norm(raw)
        if key in seen:
            # mimic the ".1" suffix given to repeated headers by common CSV readers
            seen[key] += 1
            key = f"{key}.{seen[key] - 1}"
        else:
            seen[key] = 1
        lookup.setdefault(key, pos)
    # exact names first, then aliases (preferring columns nobody claimed yet)
    resolved = {i: lookup[_norm(n)] for i, n in schema.entries if _norm(n) in lookup}
    claimed = set(resolved.values())
    for index, name in schema.entries:
        if index in resolved:
            continue
        hits = [lookup[_norm(a)] for a in schema.aliases.get(index, ()) if _norm(a) in lookup]
        if not hits:
            raise SchemaError(f"missing column {name!r}")
        pos = next((h for h in hits if h not in claimed), hits[0])
        resolved[index] = pos
        claimed.add(pos)
    positions = [resolved[i] for i, _ in schema.entries]
    label_pos = lookup.get(_norm(schema.label_column))
    if label_pos is None:
        raise SchemaError(f"missing label column {schema.label_column!r}")
    return positions, label_pos


def load_flow_csv(path, schema: FeatureSchema | None = None) -> Dataset:
    """Read a flow CSV into a :class:`Dataset`, columns ordered by schema index.

    Cells that do not parse as numbers become NaN and are counted in
    ``Dataset.unparsed``; run :func:`sanitize` before using the data.
    Repeated header rows inside the file are skipped.
    """
    schema = schema or FeatureSchema.cic_ids2018()
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DatasetError(f"{path}: empty file")
        positions, label_pos = _resolve_columns(header, schema)
        label_key = _norm(header[label_pos])
        rows: list[list[float]] = []
        labels: list[int] = []
        unparsed = 0
        nan = math.nan
        for line_no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) <= max(label_pos, max(positions)):
                raise DatasetError(f"{path}:{line_no}: expected {len(header)} fields, got {len(rec)}")
            if _norm(rec[label_pos]) == label_key:
                continue
            vals = []
            for p in positions:
                v = _parse_float(rec[p])
                if v is None:
                    unparsed += 1
                    v = nan
                vals.append(v)
            rows.append(vals)
            labels.append(encode_label(rec[label_pos]))
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    if unparsed:
        log.warning("%s: %d non-numeric cells recorded as missing", path, unparsed)
    X = np.array(rows, dtype=float).reshape(len(rows), len(positions))
    return Dataset(X, np.array(labels), tuple(schema.names), unparsed=unparsed)


def write_flow_csv(ds: Dataset, path, label_column: str = DEFAULT_LABEL_COLUMN) -> None:
    """Write ``ds`` so that :func:`load_flow_csv` reproduces it bit for bit."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*ds.names, label_column])
        for row, label in zip(ds.X.tolist(), ds.y.tolist()):
            w.writerow([repr(v) for v in row] + [label])


@dataclass(frozen=True)
class SanitizePolicy:
    infinite_handling: str = "replace-with-missing"
    missing_handling: str = "impute-column-median"
    constant_column_handling: str = "keep-and-flag"

    def __post_init__(self):
        if self.infinite_handling != "replace-with-missing":
            raise DatasetError(f"unknown infinite_handling {self.infinite_handling!r}")
        if self.missing_handling not in ("impute-column-median", "drop-row"):
            raise DatasetError(f"unknown missing_handling {self.missing_handling!r}")
        if self.constant_column_handling != "keep-and-flag":
            raise DatasetError(f"unknown constant_column_handling {self.constant_column_handling!r}")


class SanitizeLog(dict):
    """``{column_name: {"imputed": n, "dropped": n, "constant": bool}}``"""

    def to_json(self) -> str:
        return json.dumps(self, indent=2)

    @property
    def total_imputed(self) -> int:
        return sum(v["imputed"] for v in self.values())

    @property
    def total_dropped(self) -> int:
        return sum(v["dropped"] for v in self.values())


def _median(v: np.ndarray) -> float:
    # halves before adding, so two values near the float maximum cannot overflow
    s = np.sort(v)
    m = s.size // 2
    if s.size % 2:
        return float(s[m])
    return float(s[m - 1] / 2 + s[m] / 2)


def sanitize(ds: Dataset, policy: SanitizePolicy | None = None) -> tuple[Dataset, SanitizeLog]:
    """Remove every non-finite value according to ``policy``.

    Infinities are first treated as missing. Missing cells are then either
    replaced by the median of the column's finite values or cause their row
    to be dropped. Zero-variance columns are kept and flagged.
    """
    policy = policy or SanitizePolicy()
    X = np.array(ds.X, dtype=float, order="F")
    bad = ~np.isfinite(X)
    per_col = bad.sum(axis=0)
    y = ds.y
    imputed = np.zeros(ds.n_features, dtype=int)
    dropped = np.zeros(ds.n_features, dtype=int)
    if policy.missing_handling == "drop-row":
        keep = ~bad.any(axis=1)
        if bad.any() and not keep.any():
            raise DatasetError("drop-row policy removed every row")
        X = X[keep]
        y = y[keep]
        dropped = per_col
    else:
        for j in np.flatnonzero(per_col):
            col = X[:, j]
            finite = col[np.isfinite(col)]
            # an all-missing column has no median; it becomes a constant 0 column
            fill = _median(finite) if finite.size else 0.0
            col[~np.isfinite(col)] = fill
            imputed[j] = per_col[j]
    constant = [bool(X.shape[0] == 0 or np.all(X[:, j] == X[0, j])) for j in range(X.shape[1])]
    report = SanitizeLog(
        (name, {"imputed": int(imputed[j]), "dropped": int(dropped[j]), "constant": constant[j]})
        for j, name in enumerate(ds.names)
    )
    return Dataset(X, y, ds.names), report


def stratified_sample(ds: Dataset, n_per_class: int, seed: int) -> Dataset:
    """Draw exactly ``n_per_class`` rows of each class without replacement, keeping file order."""
    if n_per_class < 1:
        raise DatasetError("n_per_class must be positive")
    rng = np.random.default_rng(seed)
    picked = []
    for cls in (0, 1):
        rows = np.flatnonzero(ds.y == cls)
        if rows.size < n_per_class:
            raise DatasetError(
                f"class {CLASS_NAMES[cls]!r} has {rows.size} rows, {n_per_class} requested"
            )
        picked.append(rng.choice(rows, size=n_per_class, replace=False))
    return ds.take(np.sort(np.concatenate(picked)))


def _n_test(n: int, test_fraction: float) -> int:
    return int(math.floor(n * test_fraction + 0.5))


def split_indices(y, test_fraction: float, seed: int, stratified: bool = True):
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    groups = [np.flatnonzero(y == c) for c in (0, 1)] if stratified else [np.arange(y.size)]
    test = []
    for rows in groups:
        if rows.size == 0:
            continue
        test.append(rng.permutation(rows)[: _n_test(rows.size, test_fraction)])
    test_idx = np.sort(np.concatenate(test)) if test else np.array([], dtype=np.int64)
    mask = np.zeros(y.size, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    if test_idx.size == 0 or train_idx.size == 0:
        raise DatasetError(
            f"test_fraction={test_fraction} on {y.size} rows leaves an empty partition"
        )
    return train_idx, test_idx


def split(ds: Dataset, test_fraction: float = 0.2, seed: int = 0, stratified: bool = True):
    """Partition ``ds`` into disjoint (train, test) datasets."""
    train_idx, test_idx = split_indices(ds.y, test_fraction, seed, stratified)
    return ds.take(train_idx), ds.take(test_idx)
