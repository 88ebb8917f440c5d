"""Module invariants under generated inputs, 1,000 examples per property."""
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import oracles
from flowsift.classifier import (
    Forest,
    ForestParams,
    fit_forest,
    fit_tree,
    importances,
    metrics,
    predict_forest,
    predict_tree,
)
from flowsift.dataset import (
    Dataset,
    DatasetError,
    FeatureSchema,
    load_flow_csv,
    sanitize,
    split_indices,
    stratified_sample,
    write_flow_csv,
)
from flowsift.evaluation import run_sweep
from flowsift.selectors import (
    TIE_TOL,
    SelectorConfig,
    micorr_score,
    rank_univariate_corr,
    rank_univariate_mi,
    select_forward_corr,
    select_micorr,
)
from flowsift.stats import entropy, mutual_information, pearson, redundancy, relevance

EXAMPLES = 1000
prop = settings(
    max_examples=EXAMPLES,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
)

seeds = st.integers(0, 2**32 - 1)
small_ints = st.integers(-1000, 1000)


def int_vectors(min_size=2, max_size=40):
    return st.lists(small_ints, min_size=min_size, max_size=max_size)


def random_dataset(seed, n, d, informative=True, discrete=False) -> Dataset:
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    y[0], y[1] = 0, 1
    X = rng.normal(size=(n, d))
    if discrete:
        X = np.round(X * 2)
    if informative:
        X[:, rng.integers(0, d)] += 1.5 * y
    return Dataset(X, y, tuple(f"f{i + 1}" for i in range(d)))


# --- dataset -----------------------------------------------------------------

finite = st.floats(allow_nan=False, allow_infinity=False)


@prop
@given(
    X=st.integers(1, 4).flatmap(lambda d: hnp.arrays(np.float64, st.tuples(st.integers(1, 5), st.just(d)),
                                                   elements=finite)),
    data=st.data(),
)
def test_csv_round_trip_bit_identical(X, data):
    y = np.array(data.draw(st.lists(st.integers(0, 1), min_size=X.shape[0], max_size=X.shape[0])))
    names = tuple(f"col {j}" for j in range(X.shape[1]))
    ds = Dataset(X, y, names)
    clean, _ = sanitize(ds)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "d.csv"
        write_flow_csv(clean, path)
        back = load_flow_csv(path, FeatureSchema.from_names(names))
    assert back.equals(clean)


@prop
@given(seed=seeds, n=st.integers(2, 200), frac=st.floats(0.05, 0.95), stratified=st.booleans())
def test_split_is_a_partition(seed, n, frac, stratified):
    y = np.random.default_rng(seed).integers(0, 2, n)
    try:
        train, test = split_indices(y, frac, seed, stratified)
    except DatasetError:
        assume(False)
    assert np.intersect1d(train, test).size == 0
    assert np.array_equal(np.sort(np.concatenate([train, test])), np.arange(n))
    if stratified:
        for c in (0, 1):
            n_c = int(np.sum(y == c))
            assert abs(np.sum(y[test] == c) - n_c * frac) <= 1


cells = st.one_of(finite, st.sampled_from([np.inf, -np.inf, np.nan]))


@prop
@given(X=hnp.arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 4)), elements=cells),
       drop=st.booleans())
def test_sanitize_idempotent(X, drop):
    from flowsift.dataset import SanitizePolicy

    ds = Dataset(X, np.zeros(X.shape[0], dtype=int), tuple(f"c{j}" for j in range(X.shape[1])))
    policy = SanitizePolicy(missing_handling="drop-row" if drop else "impute-column-median")
    try:
        once, _ = sanitize(ds, policy)
    except DatasetError:
        assume(False)
    assert np.isfinite(once.X).all()
    twice, log = sanitize(once, policy)
    assert twice.equals(once)
    assert all(v["imputed"] == 0 and v["dropped"] == 0 for v in log.values())


@prop
@given(seed=seeds, n0=st.integers(1, 60), n1=st.integers(1, 60), data=st.data())
def test_stratified_sample_exact_counts(seed, n0, n1, data):
    k = data.draw(st.integers(1, min(n0, n1)))
    y = np.random.default_rng(seed).permutation(np.array([0] * n0 + [1] * n1))
    ds = Dataset(np.zeros((n0 + n1, 1)), y, ("c",))
    assert stratified_sample(ds, k, seed).class_counts() == (k, k)


# --- stats -------------------------------------------------------------------

@prop
@given(xy=st.integers(2, 40).flatmap(lambda n: st.tuples(int_vectors(n, n), int_vectors(n, n))),
       a=st.floats(0.1, 10.0), b=st.floats(-100.0, 100.0))
def test_pearson_symmetry_affine_sign(xy, a, b):
    x, y = (np.array(v, dtype=float) for v in xy)
    r = pearson(x, y)
    assert r == pytest.approx(pearson(y, x), abs=1e-12)
    assert pearson(a * x + b, y) == pytest.approx(r, abs=1e-9)
    assert pearson(x, a * y + b) == pytest.approx(r, abs=1e-9)
    assert pearson(-x, y) == pytest.approx(-r, abs=1e-12)


@prop
@given(x=hnp.arrays(np.float64, st.integers(2, 50), elements=st.floats(-1e100, 1e100)),
       seed=seeds)
def test_pearson_bounded(x, seed):
    y = np.random.default_rng(seed).permutation(x)
    r = pearson(x, y)
    assert abs(r) <= 1.0 + 1e-12
    if np.unique(x).size > 1:
        assert pearson(x, x) == pytest.approx(1.0, abs=1e-12)


codes = st.lists(st.integers(0, 5), min_size=1, max_size=60)


@prop
@given(pair=st.integers(1, 60).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 3), min_size=n, max_size=n))))
def test_mi_symmetric_nonnegative_bounded(pair):
    cx, cy = pair
    mi = mutual_information(cx, cy)
    assert mi >= 0.0
    assert mi == pytest.approx(mutual_information(cy, cx), abs=1e-12)
    assert mi <= min(entropy(cx), entropy(cy)) + 1e-12


@prop
@given(pair=st.integers(1, 60).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 3), min_size=n, max_size=n))),
    perm=st.permutations(list(range(6))))
def test_mi_relabel_invariant(pair, perm):
    cx, cy = pair
    relabeled = [f"s{perm[c]}" for c in cx]
    assert mutual_information(relabeled, cy) == pytest.approx(mutual_information(cx, cy), abs=1e-12)


@prop
@given(x=st.lists(small_ints, min_size=10, max_size=60, unique=True), seed=seeds,
       bins=st.integers(2, 10))
def test_relevance_monotone_invariant(x, seed, bins):
    x = np.array(x, dtype=float)
    assume(x.size >= bins)
    y = np.random.default_rng(seed).integers(0, 2, x.size)
    assume(0 < y.sum() < y.size)
    fx = x ** 3 + 2 * x + 7  # strictly increasing, exact on these integers
    assert relevance(fx, y, bins) == relevance(x, y, bins)


@prop
@given(B=st.integers(1, 40), m=st.integers(1, 30))
def test_entropy_uniform(B, m):
    vals = [c for c in range(B) for _ in range(m)]
    assert entropy(vals) == pytest.approx(math.log2(B), abs=1e-12)


# --- selectors -----------------------------------------------------------------

def rescore(ds, j, chosen, cfg, kind):
    x = ds.X[:, j]
    sel = [ds.X[:, s - 1] for s in chosen]
    if kind == "micorr":
        return micorr_score(x, ds.y, sel, cfg.beta, cfg.bins, cfg.redundancy_mode)
    rel = abs(pearson(x, ds.y.astype(float)))
    return rel - cfg.beta * redundancy(x, sel, cfg.redundancy_mode)


def same_up_to_ties(ds, a, b, cfg, kind):
    """Orders agree, or first diverge at a step where both winners tie on score."""
    for i, (p, q) in enumerate(zip(a, b)):
        if p != q:
            prefix = a[:i]
            return abs(rescore(ds, p - 1, prefix, cfg, kind) - rescore(ds, q - 1, prefix, cfg, kind)) <= 1e-9
    return True


configs = st.builds(
    SelectorConfig,
    k=st.just(1),
    beta=st.floats(0.0, 3.0),
    bins=st.integers(2, 10),
    redundancy_mode=st.sampled_from(["mean", "max"]),
)
kinds = st.sampled_from(["micorr", "corr"])
SELECT = {"micorr": select_micorr, "corr": select_forward_corr}


def full_cfg(cfg, d):
    return SelectorConfig(k=d, beta=cfg.beta, bins=cfg.bins, redundancy_mode=cfg.redundancy_mode)


@prop
@given(seed=seeds, n=st.integers(20, 80), d=st.integers(1, 10), cfg=configs, kind=kinds,
       discrete=st.booleans())
def test_greedy_step_optimality(seed, n, d, cfg, kind, discrete):
    ds = random_dataset(seed, n, d, discrete=discrete)
    cfg = full_cfg(cfg, d)
    r = SELECT[kind](ds, cfg)
    for i, w in enumerate(r.order):
        prefix = r.order[:i]
        rest = [j for j in range(1, d + 1) if j not in prefix]
        scores = {j: rescore(ds, j - 1, prefix, cfg, kind) for j in rest}
        top = max(scores.values())
        assert scores[w] >= top - 1e-9
        assert r.scores[i] == pytest.approx(scores[w], abs=1e-9)


@prop
@given(seed=seeds, n=st.integers(20, 80), d=st.integers(2, 10), cfg=configs, kind=kinds, data=st.data())
def test_prefix_stability(seed, n, d, cfg, kind, data):
    ds = random_dataset(seed, n, d)
    m = data.draw(st.integers(1, d - 1))
    long = SELECT[kind](ds, full_cfg(cfg, d))
    short = SELECT[kind](ds, SelectorConfig(m, cfg.beta, cfg.bins, cfg.redundancy_mode))
    assert short.order == long.order[:m]


@prop
@given(seed=seeds, n=st.integers(20, 80), d=st.integers(2, 8), cfg=configs, kind=kinds, data=st.data())
def test_permutation_equivariance(seed, n, d, cfg, kind, data):
    ds = random_dataset(seed, n, d)
    perm = data.draw(st.permutations(list(range(d))))
    permuted = Dataset(ds.X[:, perm], ds.y, tuple(ds.names[p] for p in perm))
    cfg = full_cfg(cfg, d)
    base = SELECT[kind](ds, cfg).order
    mapped = [perm[j - 1] + 1 for j in SELECT[kind](permuted, cfg).order]
    assert same_up_to_ties(ds, base, mapped, cfg, kind)


@prop
@given(seed=seeds, n=st.integers(20, 80), d=st.integers(2, 8), cfg=configs, data=st.data())
def test_positive_scaling_invariance(seed, n, d, cfg, data):
    ds = random_dataset(seed, n, d)
    col = data.draw(st.integers(0, d - 1))
    c = data.draw(st.floats(0.01, 100.0))
    X = ds.X.copy()
    X[:, col] *= c
    assume(np.unique(X[:, col]).size == n and np.unique(ds.X[:, col]).size == n)
    scaled = Dataset(X, ds.y, ds.names)
    cfg = full_cfg(cfg, d)
    for kind in ("micorr", "corr"):
        assert same_up_to_ties(ds, SELECT[kind](ds, cfg).order, SELECT[kind](scaled, cfg).order, cfg, kind)
    u_mi = rank_univariate_mi(ds, cfg.bins), rank_univariate_mi(scaled, cfg.bins)
    assert u_mi[0].order == u_mi[1].order
    u_corr = rank_univariate_corr(ds).scores, rank_univariate_corr(scaled).scores
    assert u_corr[0] == pytest.approx(u_corr[1], abs=1e-12)


@prop
@given(seed=seeds, n=st.integers(20, 80), d=st.integers(2, 8), bins=st.integers(2, 10),
       extra=st.floats(0.0, 2.0), kind=kinds, data=st.data())
def test_exact_duplicate_deferral(seed, n, d, bins, extra, kind, data):
    ds = random_dataset(seed, n, d)
    probe = SELECT[kind](ds, SelectorConfig(k=1, bins=bins))
    w = probe.order[0]
    at = data.draw(st.integers(0, d))
    X = np.insert(ds.X, at, ds.X[:, w - 1], axis=1)
    dup = Dataset(X, ds.y, tuple(f"f{i}" for i in range(d + 1)))
    beta = probe.scores[0] + extra
    cfg = SelectorConfig(k=2, beta=beta, bins=bins)
    r = SELECT[kind](dup, cfg)
    winner = r.order[0]
    copy_idx = at + 1 if winner != at + 1 else (w if w <= at else w + 1)
    copy_score = rescore(dup, copy_idx - 1, [winner], cfg, kind)
    assert copy_score <= 1e-12
    others = [rescore(dup, j - 1, [winner], cfg, kind)
              for j in range(1, d + 2) if j not in (winner, copy_idx)]
    if others and max(others) > copy_score + TIE_TOL:
        assert r.order[1] != copy_idx


# --- classifier ----------------------------------------------------------------

@prop
@given(rows=st.integers(2, 12).flatmap(lambda n: st.tuples(
    st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))), d=st.integers(1, 3))
def test_root_split_matches_enumeration(rows, d):
    X = [[float(v) for v in r[:d]] for r in rows[0]]
    y = rows[1]
    assume(0 < sum(y) < len(y))
    expected = oracles.best_split(X, y)
    tree = fit_tree(np.array(X), np.array(y))
    if expected is None:
        assert tree.is_leaf
    else:
        assert (tree.feature, tree.threshold) == expected


@prop
@given(seed=seeds, n=st.integers(1, 120), d=st.integers(1, 4))
def test_unrestricted_tree_fits_consistent_data(seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(n, d)).astype(float)
    # a label function of the row keeps the data consistent
    table = {}
    y = np.array([table.setdefault(tuple(r), int(rng.integers(0, 2))) for r in X.tolist()])
    assert np.array_equal(predict_tree(fit_tree(X, y), X), y)


@prop
@given(seed=seeds, n_trees=st.integers(1, 6), data=st.data())
def test_forest_vote_order_invariant(seed, n_trees, data):
    ds = random_dataset(seed, 40, 3)
    f = fit_forest(ds.X, ds.y, ForestParams(n_trees=n_trees, seed=seed % 1000, max_depth=3))
    perm = data.draw(st.permutations(list(range(n_trees))))
    shuffled = Forest([f.trees[i] for i in perm], f.params, f.feature_ids)
    Z = np.random.default_rng(seed + 1).normal(size=(30, 3))
    assert np.array_equal(predict_forest(f, Z), predict_forest(shuffled, Z))


@prop
@given(seed=seeds, n_trees=st.integers(1, 4), d=st.integers(1, 5))
def test_importance_normalized(seed, n_trees, d):
    ds = random_dataset(seed, 30, d)
    f = fit_forest(ds.X, ds.y, ForestParams(n_trees=n_trees, seed=seed % 997, max_depth=4))
    imp = importances(f)
    assert (imp >= 0).all()
    assert imp.sum() == pytest.approx(1.0, abs=1e-9)


@prop
@given(pair=st.integers(1, 50).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n))))
def test_metrics_identity(pair):
    yt, yp = pair
    m = metrics(yt, yp)
    assert (m.tp, m.fp, m.tn, m.fn) == oracles.confusion(yt, yp)
    assert m.accuracy == (m.tp + m.tn) / (m.tp + m.tn + m.fp + m.fn)
    assert 0 <= m.precision <= 1 and 0 <= m.recall <= 1


# --- evaluation ----------------------------------------------------------------

TINY = ForestParams(n_trees=2, max_depth=2)
methods = st.sampled_from(["micorr", "umi", "fscorr", "ucorr", "treeimp"])


@prop
@given(seed=seeds, method=methods, d=st.integers(2, 5))
def test_no_test_leakage(seed, method, d):
    ds = random_dataset(seed, 40, d)
    _, test_idx = split_indices(ds.y, 0.2, seed % 100, True)
    X = ds.X.copy()
    X[test_idx] = np.random.default_rng(seed + 7).normal(size=(test_idx.size, d)) * 100
    altered = Dataset(X, ds.y, ds.names)
    a = run_sweep(ds, method, 2, fp=TINY, split_seed=seed % 100)
    b = run_sweep(altered, method, 2, fp=TINY, split_seed=seed % 100)
    assert a.ranking.order == b.ranking.order
    assert [r["features"] for r in a.rows] == [r["features"] for r in b.rows]


@prop
@given(seed=seeds, method=methods, d=st.integers(2, 5))
def test_sweep_deterministic_and_prefix_consistent(seed, method, d):
    ds = random_dataset(seed, 40, d)
    a = run_sweep(ds, method, d, fp=TINY, split_seed=seed % 50)
    b = run_sweep(ds, method, d, fp=TINY, split_seed=seed % 50)
    assert a.to_json() == b.to_json()
    feats = [r["features"] for r in a.rows]
    assert [len(f) for f in feats] == list(range(1, d + 1))
    for p, q in zip(feats, feats[1:]):
        assert q[: len(p)] == p
