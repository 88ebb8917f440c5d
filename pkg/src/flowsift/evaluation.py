"""Selector-vs-performance sweeps, SVG performance curves and single-tree reports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from xml.sax.saxutils import escape

from .classifier import (
    ForestParams,
    TreeParams,
    feature_importance,
    fit_forest,
    fit_tree,
    metrics,
    predict_forest,
    predict_tree,
    tree_to_dict,
)
from .dataset import Dataset, split
from .selectors import (
    Ranking,
    SelectionError,
    SelectorConfig,
    rank_univariate_corr,
    rank_univariate_mi,
    select_forward_corr,
    select_micorr,
)

# command-line identifier -> ranking label
METHOD_LABELS = {
    "micorr": "MICorr",
    "umi": "U-MI",
    "fscorr": "FS-Corr",
    "ucorr": "U-Corr",
    "treeimp": "TreeImportance",
}
TEST_FRACTION = 0.2


def method_key(method: str) -> str:
    key = method.lower().replace("-", "").replace("_", "")
    if key == "treeimportance":
        key = "treeimp"
    if key not in METHOD_LABELS:
        raise SelectionError(f"unknown method {method!r}; valid: {', '.join(METHOD_LABELS)}")
    return key


def rank_features(ds: Dataset, method: str, cfg: SelectorConfig,
                  forest: ForestParams | None = None) -> Ranking:
    """Top ``cfg.k`` features of ``ds`` by the named method."""
    key = method_key(method)
    cfg.check(ds.n_features)
    if key == "micorr":
        return select_micorr(ds, cfg)
    if key == "fscorr":
        return select_forward_corr(ds, cfg)
    if key == "umi":
        full = rank_univariate_mi(ds, cfg.bins)
    elif key == "ucorr":
        full = rank_univariate_corr(ds)
    else:
        f = fit_forest(ds.X, ds.y, forest or ForestParams())
        full = feature_importance(f)
    return Ranking(full.method, full.order[: cfg.k], full.scores[: cfg.k], full.config)


@dataclass
class SweepReport:
    method: str
    rows: list[dict]
    split_seed: int
    selector_config: dict
    forest_params: dict
    ranking: Ranking | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "split_seed": self.split_seed,
            "selector_config": self.selector_config,
            "forest_params": self.forest_params,
            "rows": self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        return cls(d["method"], d["rows"], d["split_seed"], d["selector_config"], d["forest_params"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "k", "features", "accuracy", "precision", "recall"])
        for r in self.rows:
            w.writerow([self.method, r["k"], " ".join(map(str, r["features"])),
                        repr(r["accuracy"]), repr(r["precision"]), repr(r["recall"])])
        return buf.getvalue()

    def best(self) -> dict:
        """Row with the highest accuracy, smallest k on ties."""
        return max(self.rows, key=lambda r: (r["accuracy"], -r["k"]))


def run_sweep(ds: Dataset, method: str, max_k: int, cfg: SelectorConfig | None = None,
              fp: ForestParams | None = None, split_seed: int = 0,
              test_fraction: float = TEST_FRACTION) -> SweepReport:
    """Train and test a forest on the top-k features for every k in ``1..max_k``.

    Selection sees only the training partition. Each k uses the same forest
    seed, so cells are independent of one another and of evaluation order.
    """
    cfg = replace(cfg or SelectorConfig(), k=max_k)
    fp = fp or ForestParams()
    train, test = split(ds, test_fraction, split_seed, stratified=True)
    ranking = rank_features(train, method, cfg, fp)
    rows = []
    for k in range(1, max_k + 1):
        feats = ranking.top(k)
        forest = fit_forest(train.columns(feats), train.y, fp, feature_ids=feats)
        m = metrics(test.y, predict_forest(forest, test.columns(feats)))
        rows.append({"k": k, "features": feats, "accuracy": m.accuracy,
                     "precision": m.precision, "recall": m.recall})
    return SweepReport(ranking.method, rows, split_seed, asdict(cfg), fp.to_dict(), ranking)


def export_tree_report(ds: Dataset, ranking: Ranking, k: int, params: TreeParams | None = None,
                       split_seed: int = 0, test_fraction: float = TEST_FRACTION):
    """Fit one decision tree on the ranking's top-k features; return (tree dict, test metrics)."""
    feats = ranking.top(k)
    train, test = split(ds, test_fraction, split_seed, stratified=True)
    tree = fit_tree(train.columns(feats), train.y, params or TreeParams())
    names = [ds.names[i - 1] for i in feats]
    m = metrics(test.y, predict_tree(tree, test.columns(feats)))
    return tree_to_dict(tree, feats, names), m


def top_split_features(tree: dict, levels: int = 2) -> list[int]:
    """Feature ids used by the first ``levels`` levels of an exported tree, root first."""
    out, frontier = [], [tree]
    for _ in range(levels):
        nxt = []
        for node in frontier:
            if node.get("leaf"):
                continue
            out.append(node["feature"])
            nxt += [node["left"], node["right"]]
        frontier = nxt
    return out


# --- SVG -------------------------------------------------------------------

_W, _H = 640, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 150, 50, 60
_SERIES = (("accuracy", "#1f77b4"), ("precision", "#ff7f0e"), ("recall", "#2ca02c"))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _y_range(rows) -> tuple[float, float]:
    lo = min(r[m] for r in rows for m, _ in _SERIES)
    lo = min(0.9, int(lo * 10) / 10)
    return lo, 1.0


def render_curves(report: SweepReport) -> str:
    """SVG plot of accuracy, precision and recall against k."""
    rows = report.rows
    if not rows:
        raise ValueError("cannot plot an empty report")
    ks = [r["k"] for r in rows]
    k_lo, k_hi = min(ks), max(ks)
    y_lo, y_hi = _y_range(rows)
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(k):
        if k_hi == k_lo:
            return _LEFT + pw / 2
        return _LEFT + (k - k_lo) / (k_hi - k_lo) * pw

    def py(v):
        return _TOP + (y_hi - v) / (y_hi - y_lo) * ph

    title = escape(f"{report.method}: test performance vs number of selected features")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text class="title" x="{_W / 2:.0f}" y="25" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>',
    ]
    # axes ticks
    for k in ks:
        x = _fmt(px(k))
        out.append(f'<text class="xtick" x="{x}" y="{_TOP + ph + 18}" text-anchor="middle">{k}</text>')
    n_ticks = 5
    for i in range(n_ticks + 1):
        v = y_lo + (y_hi - y_lo) * i / n_ticks
        y = _fmt(py(v))
        out.append(f'<line x1="{_LEFT - 4}" y1="{y}" x2="{_LEFT}" y2="{y}" stroke="#333"/>')
        out.append(f'<text class="ytick" x="{_LEFT - 8}" y="{y}" text-anchor="end" '
                   f'dominant-baseline="middle">{v:.2f}</text>')
    out.append(f'<text class="xlabel" x="{_LEFT + pw / 2:.0f}" y="{_H - 15}" text-anchor="middle">'
               f'number of selected features (k)</text>')
    out.append(f'<text class="ylabel" transform="translate(20 {_TOP + ph / 2:.0f}) rotate(-90)" '
               f'text-anchor="middle">score</text>')
    for i, (name, color) in enumerate(_SERIES):
        pts = " ".join(f"{_fmt(px(r['k']))},{_fmt(py(r[name]))}" for r in rows)
        out.append(f'<polyline class="series {name}" points="{pts}" fill="none" '
                   f'stroke="{color}" stroke-width="2"/>')
        for r in rows:
            out.append(f'<circle class="point {name}" cx="{_fmt(px(r["k"]))}" '
                       f'cy="{_fmt(py(r[name]))}" r="3" fill="{color}"/>')
        ly = _TOP + 10 + 20 * i
        lx = _LEFT + pw + 15
        out.append(f'<line class="legend" x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{lx + 26}" y="{ly}" dominant-baseline="middle">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
