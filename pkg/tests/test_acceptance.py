"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
(run with -s to see them on success).

The two layout/view-consistency criteria for the browser frontend live in
frontend/test (vitest); everything here runs without the frontend built.
"""

import functools
import hashlib
import json
import time
from itertools import combinations

import numpy as np
import pytest

import rulespace as rs
from rulespace import bitset, kernels
from rulespace.analysis import FilterSpec, compare_hsr_sdt, filter_rules, overlap
from rulespace.cover import CoverUniverse, MinimalRuleSet, greedy_minimal_set
from rulespace.extraction import Condition, Rule, RuleMetrics, RulePool
from rulespace.hierarchy import build_hsr
from rulespace.labeler import demo_labels

from conftest import DIABETES_EXPR, FIXTURES, LABELER_SEED


def criterion(name):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                out = fn(*args, **kwargs)
            except BaseException:
                print(f"\n[ACCEPTANCE] {name}: FAIL")
                raise
            print(f"\n[ACCEPTANCE] {name}: PASS")
            return out
        return run
    return wrap


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _synth_problem(r: np.random.Generator):
    """Random demo-labeler fixture: n <= 2000, d <= 10, k in {2, 3}."""
    n = int(r.integers(80, 2001))
    d = int(r.integers(2, 11))
    k = int(r.choice([2, 3]))
    rows = np.round(r.normal(0, 10, size=(n, d)), 2)
    features = [rs.FeatureMeta(f"f{j}", "numeric", j) for j in range(d)]
    z = np.zeros(n, dtype=np.int64)
    ds = rs.Dataset(features, rows, z, z.copy(), [str(c) for c in range(k)])
    t1 = float(np.quantile(rows[:, 0], 0.6))
    expr1 = f"f0 >= {t1!r}"
    noise = float(r.uniform(0.0, 0.2))
    labels = demo_labels(ds, expr1, noise=noise, seed=int(r.integers(0, 2**31)))
    if k == 3:
        t2 = float(np.quantile(rows[:, 1], 0.5))
        labels = labels + demo_labels(ds, f"f1 >= {t2!r}", noise=noise,
                                      seed=int(r.integers(0, 2**31)))
    ds.predictions = labels.astype(np.int64)
    ds.true_labels = (rows[:, 0] > 0).astype(np.int64) if k == 2 else labels.copy()
    return ds


def _row_cover(data, conditions):
    match = np.ones(data.n, dtype=bool)
    for c in conditions:
        col = data.codes[:, c.feature]
        match &= (col >= c.bin_lo) & (col <= c.bin_hi)
    return match


def _make_pool(covers, n, fidelities=None, lengths=None):
    rules = []
    for i, rows in enumerate(covers):
        mask = np.zeros(n, dtype=bool)
        mask[list(rows)] = True
        rule = Rule((Condition(0, 0, 0, 0),) * (lengths[i] if lengths else 1),
                    consequent=0, source=(0, i))
        rules.append((rule, RuleMetrics(
            fidelities[i] if fidelities else 1.0, len(rows), len(rows) / n,
            rule.length, bitset.pack_bool(mask), 0)))
    return RulePool(rules, rs.Constraints(), n_instances=n)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

@criterion("constraint satisfaction: 200 randomized pipeline runs, zero violations")
def test_constraint_satisfaction_suite():
    start = time.perf_counter()
    r = np.random.default_rng(2024)
    violations = 0
    total_rules = 0
    for run in range(200):
        ds = _synth_problem(r)
        constraints = rs.Constraints(
            min_fidelity=float(r.uniform(0.70, 0.95)),
            min_coverage=int(r.integers(2, 40)),
            max_num_condition=int(r.integers(1, 6)),
            num_bin=int(r.integers(2, 6)),
        )
        disc = rs.discretize(ds, rs.compute_binning(ds, constraints.num_bin))
        forest = rs.train_forest(disc, rs.ForestConfig(n_trees=8, rng_seed=run))
        pool = rs.extract_rules(forest, disc, constraints)
        total_rules += len(pool)
        for rule, m in pool.rules:
            if not (m.fidelity >= constraints.min_fidelity
                    and m.coverage_count >= constraints.min_coverage
                    and 1 <= m.length <= constraints.max_num_condition):
                violations += 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert total_rules > 1000          # the suite actually exercised rules
    assert elapsed < 300, f"suite took {elapsed:.1f}s (budget 300s)"


@criterion("greedy cover: valid + within harmonic bound of brute-force optimum")
def test_greedy_cover_oracle():
    start = time.perf_counter()

    def brute_minimum(covers, universe):
        for size in range(1, len(covers) + 1):
            for combo in combinations(range(len(covers)), size):
                if set().union(*(covers[i] for i in combo)) >= universe:
                    return size
        return len(covers)

    r = np.random.default_rng(99)
    for _ in range(100):
        n = int(r.integers(5, 26))
        m = int(r.integers(1, 16))
        covers = [set(map(int, r.choice(n, size=int(r.integers(1, n + 1)), replace=False)))
                  for _ in range(m)]
        pool = _make_pool(covers, n)
        mset = greedy_minimal_set(pool, stop_fraction=None)
        universe = set().union(*covers)
        got = set(bitset.to_indices(mset.covered, n).tolist())
        assert got == universe, "greedy result is not a valid cover of D_R"
        opt = brute_minimum(covers, universe)
        h_bound = sum(1.0 / i for i in range(1, max(len(c) for c in covers) + 1))
        assert len(mset) <= h_bound * opt + 1e-9

    # worked example: s1={1,2,3}, s2={3,4}, s3={4,5} selects s1 then s3
    pool = _make_pool([{1, 2, 3}, {3, 4}, {4, 5}], 6)
    mset = greedy_minimal_set(pool, stop_fraction=None)
    assert mset.pool_indices == [0, 2]
    assert time.perf_counter() - start < 10


@criterion("stopping criterion: best gain 4 with |D_R| = 1000 terminates")
def test_stopping_criterion():
    pool = _make_pool([set(range(996)), {996, 997, 998, 999}], 1000)
    mset = greedy_minimal_set(pool)
    assert mset.pool_indices == [0]
    uni = CoverUniverse.of(pool)
    covered = set(bitset.to_indices(mset.covered, 1000).tolist())
    for i, (_, m) in enumerate(pool.rules):
        if i in mset.pool_indices:
            continue
        residual = len(set(bitset.to_indices(m.cover, 1000).tolist()) - covered)
        assert residual < 0.005 * uni.n_universe


@criterion("hierarchy round-trip: termini reproduce 100 random minimal sets; layering holds")
def test_hsr_round_trip():
    r = np.random.default_rng(314)
    for _ in range(100):
        rules, seen = [], set()
        for _ in range(int(r.integers(1, 15))):
            n_conds = int(r.integers(1, 5))
            feats = r.choice(8, size=n_conds, replace=False)
            conds = []
            for pos, f in enumerate(feats):
                lo = int(r.integers(0, 4))
                hi = int(r.integers(lo, 4))
                conds.append(Condition(int(f), lo, hi, pos))
            key = tuple((c.feature, c.bin_lo, c.bin_hi) for c in conds)
            if key in seen:
                continue
            seen.add(key)
            rules.append((Rule(tuple(conds), consequent=int(r.integers(0, 3))),
                          RuleMetrics(1.0, 1, 1.0, n_conds, bitset.ones(4), 0)))
        mset = MinimalRuleSet(rules, bitset.ones(4), 1.0,
                              [(i, 1) for i in range(len(rules))])
        tree = build_hsr(mset)
        flattened = {
            tuple((c.feature, c.bin_lo, c.bin_hi) for c in tree.path_conditions(t.node_id))
            for t in tree.termini()
        }
        assert flattened == seen
        assert len(tree.termini()) == len(rules)
        for node in tree.nodes:
            if node.parent is None:
                assert node.depth == 0
            else:
                assert node.depth == tree.nodes[node.parent].depth + 1
                assert len(tree.path_conditions(node.node_id)) == node.depth


@criterion("path monotonicity on every tree of a 100-tree forest")
def test_path_monotonicity(diabetes_disc):
    forest = rs.train_forest(diabetes_disc, rs.ForestConfig(n_trees=100, rng_seed=0))
    packed = diabetes_disc.packed()
    checked = 0
    for tree in forest.trees:
        covers, counts, _ = kernels.node_covers_and_counts(
            tree.feature, tree.threshold_bin, tree.left, tree.right,
            packed.lt_masks, packed.all_rows, packed.pred_masks)
        # walk every root-to-leaf path, tracking merged interval length
        stack = [(0, {})]
        while stack:
            node, intervals = stack.pop()
            if tree.is_leaf(node):
                checked += 1
                continue
            f = int(tree.feature[node])
            b = int(tree.threshold_bin[node])
            nb = diabetes_disc.scheme.effective_bins(f)
            lo, hi = intervals.get(f, (0, nb - 1))
            for child, iv in ((int(tree.left[node]), (lo, min(hi, b - 1))),
                              (int(tree.right[node]), (max(lo, b), hi))):
                # cover of the child is a subset of the parent's
                assert kernels.andnot_popcount(covers[child], covers[node]) == 0
                assert counts[child] <= counts[node]
                nxt = dict(intervals)
                nxt[f] = iv
                assert len(nxt) >= len(intervals)   # merged length never shrinks
                stack.append((child, nxt))
    assert checked > 100


@criterion("diabetes end-to-end: coverage >= 0.90 with <= 40 rules in < 20 s")
def test_diabetes_end_to_end(diabetes):
    start = time.perf_counter()
    result = rs.generate(diabetes, rs.Constraints(0.85, 5, 3, 3),
                         rs.ForestConfig(n_trees=100, rng_seed=0))
    elapsed = time.perf_counter() - start
    assert result.set_coverage >= 0.90, f"set_coverage {result.set_coverage:.3f}"
    assert result.number_of_rules <= 40, f"{result.number_of_rules} rules"
    assert elapsed < 20.0, f"took {elapsed:.1f}s"


@criterion("directional: forest rules dominate single-tree coverage; shorter at L=10")
def test_hsr_vs_sdt_directional(diabetes, credit):
    start = time.perf_counter()
    for ds in (diabetes, credit):
        report = compare_hsr_sdt(ds, max_length=10,
                                 forest_config=rs.ForestConfig(n_trees=100, rng_seed=0))
        hsr_cov = report.series("HSR", "set_coverage")
        sdt_cov = report.series("SDT", "set_coverage")
        assert len(hsr_cov) == len(sdt_cov) == 10
        for length, (h, s) in enumerate(zip(hsr_cov, sdt_cov), start=1):
            assert h >= s, f"coverage violated at max length {length}: {h:.3f} < {s:.3f}"
        hsr_len = report.series("HSR", "avg_num_conditions")[-1]
        sdt_len = report.series("SDT", "avg_num_conditions")[-1]
        assert sdt_len >= hsr_len
    assert time.perf_counter() - start < 120


@criterion("determinism: same seed gives byte-identical CLI and service artifacts")
def test_determinism(tmp_path, diabetes):
    from fastapi.testclient import TestClient

    from rulespace.cli import main
    from rulespace.service import ServiceSettings, create_app

    preds = tmp_path / "preds.txt"
    assert main(["demo-labeler", "--data", str(FIXTURES / "diabetes_surrogate.csv"),
                 "--label-col", "Outcome", "--rule", DIABETES_EXPR,
                 "--noise", "0.15", "--seed", str(LABELER_SEED),
                 "--out", str(preds)]) == 0

    digests = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(["generate", "--data", str(FIXTURES / "diabetes_surrogate.csv"),
                     "--preds", str(preds), "--label-col", "Outcome",
                     "--n-trees", "25", "--seed", "6", "--out", str(out)]) == 0
        digests.append(tuple(
            hashlib.sha256((out / f).read_bytes()).hexdigest()
            for f in ("document.json", "rules.txt")))
    assert digests[0] == digests[1]

    app = create_app(ServiceSettings(data_dir=FIXTURES.resolve()))
    with TestClient(app) as client:
        sid = client.post("/sessions", json={
            "data_path": "diabetes_surrogate.csv",
            "predictions_content": preds.read_text(),
            "label_column": "Outcome",
        }).json()["session_id"]
        req = {"constraints": {"min_fidelity": 0.85, "min_coverage": 5,
                               "max_num_condition": 3, "num_bin": 3},
               "forest": {"n_trees": 25}, "seed": 6}
        first = client.post(f"/sessions/{sid}/generate", json=req)
        second = client.post(f"/sessions/{sid}/generate", json=req)
        assert first.status_code == second.status_code == 200
        assert first.content == second.content


@criterion("metric oracles: 1000 randomized row-scan equivalence cases")
def test_metric_oracle_equivalence():
    r = np.random.default_rng(777)
    cases = 0

    for trial in range(10):
        ds = _synth_problem(np.random.default_rng(5000 + trial))
        num_bin = int(r.integers(2, 5))
        disc = rs.discretize(ds, rs.compute_binning(ds, num_bin))
        k = ds.k

        # evaluate_rule: 40 random rules per dataset
        for _ in range(40):
            conds = []
            feats = r.choice(ds.d, size=int(r.integers(1, min(4, ds.d) + 1)), replace=False)
            for pos, f in enumerate(feats):
                nb = disc.scheme.effective_bins(int(f))
                lo = int(r.integers(0, nb))
                hi = int(r.integers(lo, nb))
                conds.append(Condition(int(f), lo, hi, pos))
            rule = Rule(tuple(conds), consequent=0)
            m = rs.evaluate_rule(rule, disc)
            match = _row_cover(disc, conds)
            assert m.coverage_count == int(match.sum())
            if m.coverage_count:
                preds = ds.predictions[match]
                counts = np.bincount(preds, minlength=k)
                cons = int(np.argmax(counts))
                assert m.consequent == cons
                assert m.fidelity == pytest.approx(counts[cons] / match.sum())
            cases += 1

        forest = rs.train_forest(disc, rs.ForestConfig(n_trees=6, rng_seed=trial))
        pool = rs.extract_rules(forest, disc, rs.Constraints(0.7, 3, 3, num_bin))
        mset = greedy_minimal_set(pool)

        # set_coverage: 20 random sub-selections per dataset
        for _ in range(20):
            if not mset.rules:
                cases += 1
                continue
            take = sorted(map(int, r.choice(len(mset.rules),
                                            size=int(r.integers(1, len(mset.rules) + 1)),
                                            replace=False)))
            sub = MinimalRuleSet([mset.rules[i] for i in take], mset.covered, 0.0, [])
            hit = np.zeros(disc.n, dtype=bool)
            for i in take:
                hit |= _row_cover(disc, mset.rules[i][0].conditions)
            assert rs.set_coverage(sub, disc) == pytest.approx(hit.mean())
            cases += 1

        # filter_rules: 20 random specs per dataset
        for _ in range(20):
            spec = FilterSpec.make(
                required_features=list(map(int, r.choice(ds.d, size=int(r.integers(0, 3)),
                                                         replace=False))),
                feature_values={int(r.integers(0, ds.d)):
                                list(map(int, r.integers(0, num_bin, size=2)))},
                predictions=list(map(int, r.choice(k, size=int(r.integers(0, k)),
                                                   replace=False))),
            )
            got = filter_rules(mset, spec)
            expect = []
            for rid, (rule, _) in enumerate(mset.rules):
                by_f = {c.feature: c for c in rule.conditions}
                if any(f not in by_f for f in spec.required_features):
                    continue
                bad = False
                for f, allowed in spec.feature_values:
                    if f in by_f and not any(by_f[f].bin_lo <= b <= by_f[f].bin_hi
                                             for b in allowed):
                        bad = True
                if bad:
                    continue
                if spec.predictions and rule.consequent not in spec.predictions:
                    continue
                expect.append(rid)
            assert got == expect
            cases += 1

        # overlap: 20 random anchor/other pairs per dataset
        for _ in range(20):
            if len(mset.rules) < 1:
                cases += 1
                continue
            anchor = int(r.integers(0, len(mset.rules)))
            others = list(map(int, r.choice(len(mset.rules),
                                            size=min(3, len(mset.rules)), replace=False)))
            rep = overlap(mset, anchor, others, disc)
            rows_a = _row_cover(disc, mset.rules[anchor][0].conditions)
            for other in others:
                rows_b = _row_cover(disc, mset.rules[other][0].conditions)
                inter = rows_a & rows_b
                expect = np.bincount(ds.predictions[inter], minlength=k).tolist()
                assert rep.counts[other] == expect
            cases += 1

    assert cases >= 1000, f"only {cases} oracle cases ran"
