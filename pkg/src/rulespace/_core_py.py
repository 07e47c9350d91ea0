"""Numpy backend for the hot kernels.

Mirrors the compiled extension `rulespace._core` exactly. Both backends must
return bit-identical results: tree induction decides splits with integer-exact
comparisons plus IEEE-double scoring applied in the same order, and feature
subsampling runs on the shared splitmix64 stream from `rulespace.rng`.
"""

from __future__ import annotations

import numpy as np

from .rng import GOLDEN, MASK64, mix64, stream_seed

IMPL = "python"

_FEATURE_TAG = 0xFEA7

# Exact split-acceptance arithmetic needs 2*m**4 to fit in int64 on the
# compiled side; m is the node sample count.
MAX_SAMPLES = 46_000


def _feature_candidates(d: int, k: int, seed_base: int, node_id: int) -> list[int]:
    """k distinct feature indices for one node, ascending; all of them if k >= d."""
    if k >= d:
        return list(range(d))
    state = stream_seed(seed_base, node_id, _FEATURE_TAG)
    pool = list(range(d))
    for i in range(k):
        state = (state + GOLDEN) & MASK64
        j = i + mix64(state) % (d - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])


def _best_split(codes, labels, seg, cand, n_bins, n_classes, total_cnt, min_leaf):
    """Best (feature, boundary) by Gini, or None.

    Ranking score sum_l/n_l + sum_r/n_r (sums of squared class counts) is a
    monotone transform of negated weighted child impurity. Acceptance (gain
    strictly positive) is decided in exact integer arithmetic so zero-gain
    splits are rejected identically in both backends.
    """
    m = seg.shape[0]
    sum_t = 0
    for c in range(n_classes):
        v = int(total_cnt[c])
        sum_t += v * v
    best_score = -1.0
    best = None
    for f in cand:
        nb = int(n_bins[f])
        if nb < 2:
            continue
        col = codes[seg, f].astype(np.int64)
        hist = np.bincount(col * n_classes + labels[seg], minlength=nb * n_classes)
        hist = hist.reshape(nb, n_classes)
        cum_l = [0] * n_classes
        n_l = 0
        for b in range(1, nb):
            row = hist[b - 1]
            for c in range(n_classes):
                cum_l[c] += int(row[c])
                n_l += int(row[c])
            n_r = m - n_l
            if n_l < min_leaf or n_r < min_leaf:
                continue
            sum_l = 0
            sum_r = 0
            for c in range(n_classes):
                v = cum_l[c]
                sum_l += v * v
                w = int(total_cnt[c]) - v
                sum_r += w * w
            if sum_l * m * n_r + sum_r * m * n_l <= sum_t * n_l * n_r:
                continue
            score = sum_l / n_l + sum_r / n_r
            if score > best_score:
                best_score = score
                best = (f, b)
    return best


def grow_tree(codes, labels, samples, n_bins, n_classes, max_depth,
              min_samples_leaf, n_candidates, node_seed):
    """Grow one CART tree on ordinal codes; preorder node ids, root = 0.

    codes: uint8 (n, d) C-contiguous; labels: int64 (n,); samples: int64 (m,)
    row indices (repeats allowed); n_bins: int64 (d,) effective bins per
    feature; max_depth: -1 for unlimited. Returns
    (feature, threshold_bin, left, right, depth, class_counts) where leaves
    carry feature = -1.
    """
    n, d = codes.shape
    m = int(samples.shape[0])
    if m == 0:
        raise ValueError("cannot grow a tree from zero samples")
    if m > MAX_SAMPLES:
        raise ValueError(f"sample count {m} exceeds supported maximum {MAX_SAMPLES}")
    cap = 2 * m + 1
    feature = np.full(cap, -1, np.int64)
    thr = np.zeros(cap, np.int64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    depth = np.zeros(cap, np.int64)
    counts = np.zeros((cap, n_classes), np.int64)
    work = np.ascontiguousarray(samples, dtype=np.int64).copy()

    # (start, end, depth, parent, side); right pushed first => preorder ids
    stack = [(0, m, 0, -1, 0)]
    n_nodes = 0
    while stack:
        start, end, dep, parent, side = stack.pop()
        nid = n_nodes
        n_nodes += 1
        if parent >= 0:
            if side == 0:
                left[parent] = nid
            else:
                right[parent] = nid
        depth[nid] = dep
        seg = work[start:end]
        cnt = np.bincount(labels[seg], minlength=n_classes).astype(np.int64)
        counts[nid] = cnt
        size = end - start
        if int(np.count_nonzero(cnt)) <= 1:
            continue
        if 0 <= max_depth <= dep:
            continue
        if size < 2 * min_samples_leaf or size < 2:
            continue
        cand = _feature_candidates(d, n_candidates, node_seed, nid)
        found = _best_split(codes, labels, seg, cand, n_bins, n_classes, cnt, min_samples_leaf)
        if found is None:
            continue
        f, b = found
        feature[nid] = f
        thr[nid] = b
        go_left = codes[seg, f] < b
        lseg = seg[go_left]
        rseg = seg[~go_left]
        n_l = lseg.shape[0]
        work[start:start + n_l] = lseg
        work[start + n_l:end] = rseg
        stack.append((start + n_l, end, dep + 1, nid, 1))
        stack.append((start, start + n_l, dep + 1, nid, 0))

    return (feature[:n_nodes].copy(), thr[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), depth[:n_nodes].copy(), counts[:n_nodes].copy())


def node_covers_and_counts(feature, thr, left, right, lt_masks, root_cover, class_masks):
    """Per-node cover bitsets plus total and per-class popcounts.

    lt_masks[f, b] is the bitset of rows with codes[:, f] < b (b = 0 gives
    zeros, b = n_bins gives all rows). Preorder ids guarantee parents precede
    children, so one forward pass fills every cover.
    """
    n_nodes = feature.shape[0]
    w = root_cover.shape[0]
    covers = np.zeros((n_nodes, w), np.uint64)
    covers[0] = root_cover
    for i in range(n_nodes):
        f = int(feature[i])
        if f >= 0:
            lt = lt_masks[f, int(thr[i])]
            covers[int(left[i])] = covers[i] & lt
            covers[int(right[i])] = covers[i] & ~lt
    cover_counts = np.bitwise_count(covers).sum(axis=1).astype(np.int64)
    k = class_masks.shape[0]
    class_counts = np.empty((n_nodes, k), np.int64)
    block = max(1, (1 << 20) // max(1, k * w))
    for lo in range(0, n_nodes, block):
        hi = min(lo + block, n_nodes)
        inter = covers[lo:hi, None, :] & class_masks[None, :, :]
        class_counts[lo:hi] = np.bitwise_count(inter).sum(axis=2)
    return covers, cover_counts, class_counts


def gains(covers, covered):
    """uncover(i) = |cover_i \\ covered| for every row of the cover matrix."""
    return np.bitwise_count(covers & ~covered[None, :]).sum(axis=1).astype(np.int64)


def popcount(words) -> int:
    return int(np.bitwise_count(words).sum())


def and_popcount(a, b) -> int:
    return int(np.bitwise_count(a & b).sum())


def andnot_popcount(a, b) -> int:
    return int(np.bitwise_count(a & ~b).sum())


def class_popcounts(cover, masks):
    return np.bitwise_count(masks & cover[None, :]).sum(axis=1).astype(np.int64)
