"""Benchmark: compiled kernel extension vs the numpy fallback.

Times the three hot paths (forest induction, per-node rule statistics, greedy
cover gains) on a synthetic desk-scale dataset, verifies both backends return
identical results, and prints a speedup table.

    python3 benchmarks/bench_kernels.py [--rows 2000] [--features 8] [--trees 50]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

import rulespace as rs
from rulespace import bitset, rng
from rulespace.kernels import backends


def make_dataset(n: int, d: int, seed: int = 0) -> rs.DiscretizedDataset:
    r = np.random.default_rng(seed)
    rows = np.round(r.normal(0, 10, size=(n, d)), 3)
    features = [rs.FeatureMeta(f"f{j}", "numeric", j) for j in range(d)]
    z = np.zeros(n, dtype=np.int64)
    ds = rs.Dataset(features, rows, z, z.copy(), ["0", "1"])
    disc = rs.discretize(ds, rs.compute_binning(ds, 3))
    preds = ((disc.codes[:, 0] >= 2) | ((disc.codes[:, 1] == 0) & (disc.codes[:, 2] >= 1)))
    noise = rng.uniforms(rng.stream_seed(seed, 0xBE), n) < 0.1
    ds.predictions = preds.astype(np.int64) ^ noise.astype(np.int64)
    return rs.discretize(ds, rs.compute_binning(ds, 3))


def timeit(fn, repeats: int = 3) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_grow(impl, disc, n_trees: int):
    nb = disc.effective_bins()
    k = disc.base.k
    labels = disc.base.predictions

    def run():
        trees = []
        for t in range(n_trees):
            samples = rng.bootstrap_indices(disc.n, rng.stream_seed(0, t, 0xB007))
            trees.append(impl.grow_tree(disc.codes, labels, samples, nb, k, -1, 1, 3,
                                        rng.stream_seed(0, t)))
        return trees
    return timeit(run)


def bench_covers(impl, disc, trees):
    packed = disc.packed()

    def run():
        out = []
        for feature, thr, left, right, depth, counts in trees:
            out.append(impl.node_covers_and_counts(
                feature, thr, left, right, packed.lt_masks, packed.all_rows,
                packed.pred_masks))
        return out
    return timeit(run)


def bench_gains(impl, disc, m: int = 400, iters: int = 200):
    r = np.random.default_rng(1)
    covers = np.stack([bitset.pack_bool(r.random(disc.n) < 0.25) for _ in range(m)])
    covered = bitset.pack_bool(r.random(disc.n) < 0.4)

    def run():
        acc = 0
        for _ in range(iters):
            acc += int(impl.gains(covers, covered).sum())
        return acc
    return timeit(run)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--features", type=int, default=8)
    parser.add_argument("--trees", type=int, default=50)
    args = parser.parse_args()

    impls = backends()
    if "compiled" not in impls:
        print("compiled extension not built; nothing to compare")
        return

    disc = make_dataset(args.rows, args.features)
    print(f"dataset: {args.rows} rows x {args.features} features, "
          f"{args.trees} trees\n")
    results: dict[str, dict[str, float]] = {}
    outputs: dict[str, list] = {}
    for name, impl in impls.items():
        t_grow, trees = bench_grow(impl, disc, args.trees)
        t_cov, covers = bench_covers(impl, disc, trees)
        t_gain, checksum = bench_gains(impl, disc)
        results[name] = {"grow_tree": t_grow, "node_covers": t_cov, "gains": t_gain}
        outputs[name] = (trees, checksum)

    # both backends must agree exactly
    for (fa, *_), (fb, *_) in zip(outputs["python"][0], outputs["compiled"][0]):
        assert np.array_equal(fa, fb), "backends disagree on tree structure"
    assert outputs["python"][1] == outputs["compiled"][1], "backends disagree on gains"
    print("outputs identical across backends\n")

    header = f"{'kernel':<14}{'python (s)':>12}{'compiled (s)':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key in ("grow_tree", "node_covers", "gains"):
        p, c = results["python"][key], results["compiled"][key]
        print(f"{key:<14}{p:>12.4f}{c:>14.4f}{p / c:>9.1f}x")


if __name__ == "__main__":
    main()
