"""Command-line pipeline: ingest -> select -> sweep -> tree.

Exit codes: 0 success, 2 usage or validation error, 1 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .classifier import ClassifierError, ForestParams, TreeParams
from .dataset import (
    DEFAULT_LABEL_COLUMN,
    DatasetError,
    FeatureSchema,
    SanitizePolicy,
    load_flow_csv,
    sanitize,
    split,
    stratified_sample,
    write_flow_csv,
)
from .evaluation import (
    METHOD_LABELS,
    TEST_FRACTION,
    export_tree_report,
    rank_features,
    render_curves,
    run_sweep,
)
from .selectors import Ranking, SelectionError, SelectorConfig
from .stats import DEFAULT_BINS, StatsError

log = logging.getLogger("flowsift")

DEFAULT_PER_CLASS = 5000
TABLE_ORDER = ("micorr", "umi", "fscorr", "ucorr", "treeimp")


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {v}")
    return v


def _non_negative_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def _methods(arg: str) -> list[str]:
    return list(TABLE_ORDER) if arg == "all" else [arg]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="flow CSV (raw for ingest, canonical otherwise)")
    p.add_argument("--label-col", default=DEFAULT_LABEL_COLUMN, help="label column name (default: Label)")
    p.add_argument("--out-dir", default="flowsift-out", help="output directory (default: flowsift-out)")
    p.add_argument("--split-seed", type=int, default=0, help="seed of the 80/20 stratified split")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_selector(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=_non_negative_float, default=1.0, help="redundancy weight (default 1)")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS, help="quantile bins for MI (default 10)")
    p.add_argument("--redundancy", choices=("mean", "max"), default="mean")


def _add_forest(p: argparse.ArgumentParser) -> None:
    p.add_argument("--forest-seed", type=int, default=0)
    p.add_argument("--trees", type=_positive, default=100, help="trees per forest (default 100)")
    p.add_argument("--max-depth", type=_positive, default=None, help="depth limit (default unlimited)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowsift", description="Feature selection and evaluation for flow-based DDoS detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, sanitize and sample a raw flow CSV")
    _add_common(p)
    p.add_argument("--per-class", type=int, default=None,
                   help=f"rows per class to sample; default {DEFAULT_PER_CLASS}, capped at the "
                        "smaller class when not given explicitly; 0 keeps every row")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--missing", choices=("median", "drop"), default="median",
                   help="missing/infinite values: impute column median or drop the row")

    method_choices = [*METHOD_LABELS, "all"]
    p = sub.add_parser("select", help="rank features with one or all selectors")
    _add_common(p)
    _add_selector(p)
    _add_forest(p)
    p.add_argument("--method", choices=method_choices, default="all")
    p.add_argument("--k", type=int, default=10, help="features to select (default 10)")

    p = sub.add_parser("sweep", help="forest performance for k = 1..max-k selected features")
    _add_common(p)
    _add_selector(p)
    _add_forest(p)
    p.add_argument("--method", choices=method_choices, default="micorr")
    p.add_argument("--max-k", type=int, default=10)

    p = sub.add_parser("tree", help="single decision tree on the top-k ranked features")
    _add_common(p)
    p.add_argument("--ranking", required=True, help="ranking JSON written by 'select'")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--max-depth", type=_positive, default=None)
    return parser


def _schema(args) -> FeatureSchema:
    return FeatureSchema.cic_ids2018(label_column=args.label_col)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _forest_params(args) -> ForestParams:
    return ForestParams(n_trees=args.trees, seed=args.forest_seed, max_depth=args.max_depth)


def _selector_config(args, k: int) -> SelectorConfig:
    if k < 1:
        raise UsageError(f"k must be at least 1, got {k}")
    return SelectorConfig(k=k, beta=args.beta, bins=args.bins, redundancy_mode=args.redundancy)


def cmd_ingest(args) -> int:
    ds = load_flow_csv(args.input, _schema(args))
    unparsed = ds.unparsed
    policy = SanitizePolicy(
        missing_handling="impute-column-median" if args.missing == "median" else "drop-row")
    ds, report = sanitize(ds, policy)
    n0, n1 = ds.class_counts()
    per_class = args.per_class
    if per_class is None:
        per_class = min(DEFAULT_PER_CLASS, n0, n1)
        if per_class < DEFAULT_PER_CLASS:
            log.warning("only %d benign / %d DDoS rows; sampling %d per class", n0, n1, per_class)
    if per_class < 0:
        raise UsageError("--per-class must be non-negative")
    if per_class > 0:
        ds = stratified_sample(ds, per_class, args.sample_seed)
    out = _out_dir(args)
    write_flow_csv(ds, out / "dataset.csv", args.label_col)
    _write(out / "sanitize_log.json", report.to_json() + "\n")
    meta = {"input": str(args.input), "per_class": per_class, "sample_seed": args.sample_seed,
            "missing": args.missing, "unparsed_cells": unparsed,
            "imputed": report.total_imputed, "dropped": report.total_dropped}
    _write(out / "ingest.json", json.dumps(meta, indent=2) + "\n")
    n0, n1 = ds.class_counts()
    print(f"rows={ds.n_rows} benign={n0} ddos={n1} imputed={report.total_imputed} "
          f"dropped={report.total_dropped}")
    constant = [name for name, v in report.items() if v["constant"]]
    if constant:
        print(f"constant columns: {', '.join(constant)}")
    return 0


def _table(rankings: dict[str, Ranking], k: int) -> str:
    keys = [m for m in TABLE_ORDER if m in rankings]
    heads = ["Rank"] + [METHOD_LABELS[m] for m in keys]
    widths = [max(4, len(h)) for h in heads]
    lines = ["  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    for r in range(k):
        cells = [str(r + 1)] + [str(rankings[m].order[r]) for m in keys]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


def cmd_select(args) -> int:
    cfg = _selector_config(args, args.k)
    ds = load_flow_csv(args.input, _schema(args))
    train, _ = split(ds, TEST_FRACTION, args.split_seed)
    fp = _forest_params(args)
    out = _out_dir(args)
    rankings = {}
    for m in _methods(args.method):
        r = rank_features(train, m, cfg, fp)
        r.config = {**r.config, "split_seed": args.split_seed, "test_fraction": TEST_FRACTION}
        rankings[m] = r
        _write(out / f"ranking_{m}.json", r.to_json() + "\n")
        _write(out / f"ranking_{m}.csv", r.to_csv())
    print(_table(rankings, cfg.k))
    return 0


def cmd_sweep(args) -> int:
    if args.max_k < 1:
        raise UsageError(f"--max-k must be at least 1, got {args.max_k}")
    cfg = _selector_config(args, args.max_k)
    ds = load_flow_csv(args.input, _schema(args))
    fp = _forest_params(args)
    out = _out_dir(args)
    for m in _methods(args.method):
        report = run_sweep(ds, m, args.max_k, cfg, fp, args.split_seed)
        _write(out / f"sweep_{m}.json", report.to_json() + "\n")
        _write(out / f"sweep_{m}.csv", report.to_csv())
        _write(out / f"sweep_{m}.svg", render_curves(report))
        best = report.best()
        hit = next((r["k"] for r in report.rows if r["accuracy"] >= 0.99), None)
        reach = f"accuracy >= 0.99 from k={hit}" if hit else "accuracy < 0.99 for all k"
        print(f"{report.method}: best accuracy {best['accuracy']:.4f} at k={best['k']} "
              f"(precision {best['precision']:.4f}, recall {best['recall']:.4f}); {reach}")
    return 0


def cmd_tree(args) -> int:
    ranking = Ranking.from_json(Path(args.ranking).read_text(encoding="utf-8"))
    if args.k < 1 or args.k > len(ranking.order):
        raise UsageError(f"--k={args.k} must lie in 1..{len(ranking.order)} (ranking length)")
    ds = load_flow_csv(args.input, _schema(args))
    params = TreeParams(max_depth=args.max_depth)
    tree, m = export_tree_report(ds, ranking, args.k, params, args.split_seed)
    out = _out_dir(args)
    _write(out / "tree.json", json.dumps(tree, indent=2) + "\n")
    meta = {"method": ranking.method, "k": args.k, "features": ranking.top(args.k),
            "split_seed": args.split_seed, "max_depth": args.max_depth, **m.to_dict()}
    _write(out / "tree_metrics.json", json.dumps(meta, indent=2) + "\n")
    print(f"{ranking.method} top-{args.k} tree: accuracy {m.accuracy:.4f} "
          f"precision {m.precision:.4f} recall {m.recall:.4f}")
    return 0


COMMANDS = {"ingest": cmd_ingest, "select": cmd_select, "sweep": cmd_sweep, "tree": cmd_tree}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, DatasetError, SelectionError, StatsError, ClassifierError) as exc:
        print(f"flowsift {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - stable exit code for scripts
        log.debug("failure", exc_info=True)
        print(f"flowsift {args.command}: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
