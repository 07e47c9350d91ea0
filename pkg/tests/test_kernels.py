import numpy as np
import pytest

from rulespace import bitset, rng
from rulespace.kernels import backends

BACKENDS = backends()
HAS_COMPILED = "compiled" in BACKENDS

pytestmark = pytest.mark.skipif(not HAS_COMPILED,
                                reason="compiled kernel extension not built")


def _random_problem(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(5, 500))
    d = int(r.integers(1, 12))
    k = int(r.integers(2, 5))
    nb = r.integers(1, 6, size=d).astype(np.int64)
    codes = (r.integers(0, 256, size=(n, d)) % nb[None, :]).astype(np.uint8)
    labels = r.integers(0, k, size=n).astype(np.int64)
    return n, d, k, nb, codes, labels


@pytest.mark.parametrize("seed", range(12))
def test_grow_tree_bit_identical(seed):
    py, cc = BACKENDS["python"], BACKENDS["compiled"]
    n, d, k, nb, codes, labels = _random_problem(seed)
    samples = rng.bootstrap_indices(n, rng.stream_seed(seed, 0, 0xB007))
    r = np.random.default_rng(seed)
    for cand in {1, max(1, d // 2), d}:
        max_depth = int(r.integers(1, 25)) if seed % 3 else -1
        min_leaf = int(r.integers(1, 4))
        node_seed = rng.stream_seed(seed, 99)
        out_py = py.grow_tree(codes, labels, samples, nb, k, max_depth, min_leaf, cand, node_seed)
        out_cc = cc.grow_tree(codes, labels, samples, nb, k, max_depth, min_leaf, cand, node_seed)
        for a, b in zip(out_py, out_cc):
            assert np.array_equal(a, b)


def test_node_covers_bit_identical():
    import rulespace as rs
    from conftest import synth_dataset
    py, cc = BACKENDS["python"], BACKENDS["compiled"]
    ds = synth_dataset(3, n=220, d=5)
    disc = rs.discretize(ds, rs.compute_binning(ds, 4))
    tree = rs.train_single_tree(disc, rs.ForestConfig(rng_seed=0))
    packed = disc.packed()
    args = (tree.feature, tree.threshold_bin, tree.left, tree.right,
            packed.lt_masks, packed.all_rows, packed.pred_masks)
    for a, b in zip(py.node_covers_and_counts(*args), cc.node_covers_and_counts(*args)):
        assert np.array_equal(a, b)


def test_bitset_ops_match_python_set_oracle():
    r = np.random.default_rng(5)
    n = 333
    for impl in BACKENDS.values():
        for _ in range(20):
            a_rows = set(map(int, r.choice(n, size=60, replace=False)))
            b_rows = set(map(int, r.choice(n, size=80, replace=False)))
            a = bitset.pack_bool(np.isin(np.arange(n), list(a_rows)))
            b = bitset.pack_bool(np.isin(np.arange(n), list(b_rows)))
            assert impl.popcount(a) == len(a_rows)
            assert impl.and_popcount(a, b) == len(a_rows & b_rows)
            assert impl.andnot_popcount(a, b) == len(a_rows - b_rows)


def test_gains_matches_set_oracle():
    r = np.random.default_rng(6)
    n = 200
    rows = [set(map(int, r.choice(n, size=r.integers(1, 50), replace=False)))
            for _ in range(15)]
    covered_rows = set(map(int, r.choice(n, size=70, replace=False)))
    covers = np.stack([bitset.pack_bool(np.isin(np.arange(n), list(s))) for s in rows])
    covered = bitset.pack_bool(np.isin(np.arange(n), list(covered_rows)))
    for impl in BACKENDS.values():
        gains = impl.gains(covers, covered)
        assert [int(g) for g in gains] == [len(s - covered_rows) for s in rows]


def test_full_pipeline_identical_across_backends(diabetes):
    import rulespace as rs
    from rulespace import serialize
    from rulespace.pipeline import generate

    docs = {}
    for name, impl in BACKENDS.items():
        import rulespace.kernels as kernels_mod
        saved = {fn: getattr(kernels_mod, fn) for fn in
                 ("grow_tree", "node_covers_and_counts", "gains", "popcount",
                  "and_popcount", "andnot_popcount", "class_popcounts")}
        try:
            for fn in saved:
                setattr(kernels_mod, fn, getattr(impl, fn))
            result = generate(diabetes, rs.Constraints(),
                              rs.ForestConfig(n_trees=15, rng_seed=2))
            docs[name] = serialize.dumps(serialize.generate_document(result))
        finally:
            for fn, val in saved.items():
                setattr(kernels_mod, fn, val)
    assert docs["python"] == docs["compiled"]
