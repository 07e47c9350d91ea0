# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled backend for the hot kernels.

Byte-for-byte equivalent to rulespace._core_py: split acceptance uses exact
int64 arithmetic, candidate ranking uses the same double-precision expression
in the same order, and feature subsampling runs the shared splitmix64 stream.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.string cimport memcpy

cnp.import_array()

IMPL = "compiled"

# matches rulespace._core_py.MAX_SAMPLES; the exact split test needs m**4/4
# (plus slack) inside int64
MAX_SAMPLES = 46_000

cdef extern from *:
    """
    #if defined(_MSC_VER)
    #include <intrin.h>
    static inline unsigned long long rs_popcnt64(unsigned long long x) { return __popcnt64(x); }
    #else
    static inline unsigned long long rs_popcnt64(unsigned long long x) { return __builtin_popcountll(x); }
    #endif
    """
    uint64_t rs_popcnt64(uint64_t x) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef uint64_t SALT = 0xA5A5A5A5A5A5A5A5ULL
cdef uint64_t FEATURE_TAG = 0xFEA7ULL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t stream3(uint64_t a, uint64_t b, uint64_t c) nogil:
    cdef uint64_t s = mix64(a ^ SALT)
    s = mix64(s ^ b)
    return mix64(s ^ c)


def grow_tree(codes, labels, samples, n_bins, int n_classes, int max_depth,
              int min_samples_leaf, int n_candidates, node_seed):
    """See rulespace._core_py.grow_tree; identical contract and output."""
    cdef const uint8_t[:, ::1] codes_v = np.ascontiguousarray(codes, dtype=np.uint8)
    cdef const int64_t[::1] labels_v = np.ascontiguousarray(labels, dtype=np.int64)
    cdef const int64_t[::1] n_bins_v = np.ascontiguousarray(n_bins, dtype=np.int64)
    samples_arr = np.ascontiguousarray(samples, dtype=np.int64)

    cdef int64_t n = codes_v.shape[0]
    cdef int64_t d = codes_v.shape[1]
    cdef int64_t m = samples_arr.shape[0]
    if m == 0:
        raise ValueError("cannot grow a tree from zero samples")
    if m > MAX_SAMPLES:
        raise ValueError(f"sample count {m} exceeds supported maximum {MAX_SAMPLES}")
    cdef uint64_t seed_base = <uint64_t>(int(node_seed) & 0xFFFFFFFFFFFFFFFF)

    cdef int64_t cap = 2 * m + 1
    feature_arr = np.full(cap, -1, np.int64)
    thr_arr = np.zeros(cap, np.int64)
    left_arr = np.full(cap, -1, np.int64)
    right_arr = np.full(cap, -1, np.int64)
    depth_arr = np.zeros(cap, np.int64)
    counts_arr = np.zeros((cap, n_classes), np.int64)
    cdef int64_t[::1] feature = feature_arr
    cdef int64_t[::1] thr = thr_arr
    cdef int64_t[::1] left = left_arr
    cdef int64_t[::1] right = right_arr
    cdef int64_t[::1] depth = depth_arr
    cdef int64_t[:, ::1] counts = counts_arr

    work_arr = samples_arr.copy()
    scratch_arr = np.empty(m, np.int64)
    cdef int64_t[::1] work = work_arr
    cdef int64_t[::1] scratch = scratch_arr

    cdef int64_t max_nb = 0
    cdef int64_t j
    for j in range(d):
        if n_bins_v[j] > max_nb:
            max_nb = n_bins_v[j]
    hist_arr = np.zeros(max(max_nb, 1) * n_classes, np.int64)
    cnt_arr = np.zeros(n_classes, np.int64)
    cum_arr = np.zeros(n_classes, np.int64)
    pool_arr = np.empty(d, np.int64)
    cdef int64_t[::1] hist = hist_arr
    cdef int64_t[::1] cnt = cnt_arr
    cdef int64_t[::1] cum = cum_arr
    cdef int64_t[::1] pool = pool_arr

    # explicit stack: (start, end, depth, parent, side)
    stack_arr = np.empty((cap, 5), np.int64)
    cdef int64_t[:, ::1] stack = stack_arr
    cdef int64_t sp = 0
    stack[0, 0] = 0; stack[0, 1] = m; stack[0, 2] = 0; stack[0, 3] = -1; stack[0, 4] = 0
    sp = 1

    cdef int64_t n_nodes = 0
    cdef int64_t start, end, dep, parent, side, nid, size, i, row
    cdef int64_t nonzero, k_cand, f, nb, b, n_l, n_r, v, wv, best_f, best_b
    cdef int64_t sum_l, sum_r, sum_t, c
    cdef double score, best_score
    cdef uint64_t state
    cdef int64_t tmp, pos, key

    while sp > 0:
        sp -= 1
        start = stack[sp, 0]; end = stack[sp, 1]; dep = stack[sp, 2]
        parent = stack[sp, 3]; side = stack[sp, 4]
        nid = n_nodes
        n_nodes += 1
        if parent >= 0:
            if side == 0:
                left[parent] = nid
            else:
                right[parent] = nid
        depth[nid] = dep

        for c in range(n_classes):
            cnt[c] = 0
        for i in range(start, end):
            cnt[labels_v[work[i]]] += 1
        nonzero = 0
        for c in range(n_classes):
            counts[nid, c] = cnt[c]
            if cnt[c] > 0:
                nonzero += 1
        size = end - start
        if nonzero <= 1:
            continue
        if max_depth >= 0 and dep >= max_depth:
            continue
        if size < 2 * min_samples_leaf or size < 2:
            continue

        # candidate features (ascending), via the shared splitmix64 stream
        if n_candidates >= d:
            k_cand = d
            for i in range(d):
                pool[i] = i
        else:
            k_cand = n_candidates
            for i in range(d):
                pool[i] = i
            state = stream3(seed_base, <uint64_t>nid, FEATURE_TAG)
            for i in range(k_cand):
                state = state + GOLDEN
                j = i + <int64_t>(mix64(state) % <uint64_t>(d - i))
                tmp = pool[i]; pool[i] = pool[j]; pool[j] = tmp
            # insertion sort of pool[:k_cand]
            for i in range(1, k_cand):
                key = pool[i]
                pos = i - 1
                while pos >= 0 and pool[pos] > key:
                    pool[pos + 1] = pool[pos]
                    pos -= 1
                pool[pos + 1] = key

        sum_t = 0
        for c in range(n_classes):
            sum_t += cnt[c] * cnt[c]
        best_score = -1.0
        best_f = -1
        best_b = -1
        for i in range(k_cand):
            f = pool[i]
            nb = n_bins_v[f]
            if nb < 2:
                continue
            for j in range(nb * n_classes):
                hist[j] = 0
            for j in range(start, end):
                row = work[j]
                hist[<int64_t>codes_v[row, f] * n_classes + labels_v[row]] += 1
            for c in range(n_classes):
                cum[c] = 0
            n_l = 0
            for b in range(1, nb):
                for c in range(n_classes):
                    cum[c] += hist[(b - 1) * n_classes + c]
                    n_l += hist[(b - 1) * n_classes + c]
                n_r = size - n_l
                if n_l < min_samples_leaf or n_r < min_samples_leaf:
                    continue
                sum_l = 0
                sum_r = 0
                for c in range(n_classes):
                    v = cum[c]
                    sum_l += v * v
                    wv = cnt[c] - v
                    sum_r += wv * wv
                if sum_l * size * n_r + sum_r * size * n_l <= sum_t * n_l * n_r:
                    continue
                score = (<double>sum_l) / n_l + (<double>sum_r) / n_r
                if score > best_score:
                    best_score = score
                    best_f = f
                    best_b = b
        if best_f < 0:
            continue

        feature[nid] = best_f
        thr[nid] = best_b
        n_l = 0
        for i in range(start, end):
            if codes_v[work[i], best_f] < best_b:
                scratch[n_l] = work[i]
                n_l += 1
        n_r = n_l
        for i in range(start, end):
            if codes_v[work[i], best_f] >= best_b:
                scratch[n_r] = work[i]
                n_r += 1
        memcpy(&work[start], &scratch[0], (end - start) * sizeof(int64_t))

        stack[sp, 0] = start + n_l; stack[sp, 1] = end; stack[sp, 2] = dep + 1
        stack[sp, 3] = nid; stack[sp, 4] = 1
        sp += 1
        stack[sp, 0] = start; stack[sp, 1] = start + n_l; stack[sp, 2] = dep + 1
        stack[sp, 3] = nid; stack[sp, 4] = 0
        sp += 1

    return (feature_arr[:n_nodes].copy(), thr_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            depth_arr[:n_nodes].copy(), counts_arr[:n_nodes].copy())


def node_covers_and_counts(feature, thr, left, right, lt_masks, root_cover, class_masks):
    """See rulespace._core_py.node_covers_and_counts."""
    cdef const int64_t[::1] feature_v = np.ascontiguousarray(feature, dtype=np.int64)
    cdef const int64_t[::1] thr_v = np.ascontiguousarray(thr, dtype=np.int64)
    cdef const int64_t[::1] left_v = np.ascontiguousarray(left, dtype=np.int64)
    cdef const int64_t[::1] right_v = np.ascontiguousarray(right, dtype=np.int64)
    cdef const uint64_t[:, :, ::1] lt = np.ascontiguousarray(lt_masks, dtype=np.uint64)
    cdef const uint64_t[::1] root = np.ascontiguousarray(root_cover, dtype=np.uint64)
    cdef const uint64_t[:, ::1] cls = np.ascontiguousarray(class_masks, dtype=np.uint64)

    cdef int64_t n_nodes = feature_v.shape[0]
    cdef int64_t w = root.shape[0]
    cdef int64_t k = cls.shape[0]
    covers_arr = np.zeros((n_nodes, w), np.uint64)
    cover_counts_arr = np.zeros(n_nodes, np.int64)
    class_counts_arr = np.zeros((n_nodes, k), np.int64)
    cdef uint64_t[:, ::1] covers = covers_arr
    cdef int64_t[::1] cover_counts = cover_counts_arr
    cdef int64_t[:, ::1] class_counts = class_counts_arr

    cdef int64_t i, j, f, b, li, ri, c
    cdef uint64_t word
    cdef int64_t acc
    with nogil:
        for j in range(w):
            covers[0, j] = root[j]
        for i in range(n_nodes):
            f = feature_v[i]
            if f >= 0:
                b = thr_v[i]
                li = left_v[i]
                ri = right_v[i]
                for j in range(w):
                    word = covers[i, j]
                    covers[li, j] = word & lt[f, b, j]
                    covers[ri, j] = word & (~lt[f, b, j])
            acc = 0
            for j in range(w):
                acc += <int64_t>rs_popcnt64(covers[i, j])
            cover_counts[i] = acc
            for c in range(k):
                acc = 0
                for j in range(w):
                    acc += <int64_t>rs_popcnt64(covers[i, j] & cls[c, j])
                class_counts[i, c] = acc
    return covers_arr, cover_counts_arr, class_counts_arr


def gains(covers, covered):
    cdef const uint64_t[:, ::1] cov = np.ascontiguousarray(covers, dtype=np.uint64)
    cdef const uint64_t[::1] done = np.ascontiguousarray(covered, dtype=np.uint64)
    cdef int64_t m = cov.shape[0]
    cdef int64_t w = cov.shape[1]
    out_arr = np.zeros(m, np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t i, j, acc
    with nogil:
        for i in range(m):
            acc = 0
            for j in range(w):
                acc += <int64_t>rs_popcnt64(cov[i, j] & (~done[j]))
            out[i] = acc
    return out_arr


def popcount(words):
    cdef const uint64_t[::1] v = np.ascontiguousarray(words, dtype=np.uint64)
    cdef int64_t j, acc = 0
    with nogil:
        for j in range(v.shape[0]):
            acc += <int64_t>rs_popcnt64(v[j])
    return int(acc)


def and_popcount(a, b):
    cdef const uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef const uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef int64_t j, acc = 0
    with nogil:
        for j in range(av.shape[0]):
            acc += <int64_t>rs_popcnt64(av[j] & bv[j])
    return int(acc)


def andnot_popcount(a, b):
    cdef const uint64_t[::1] av = np.ascontiguousarray(a, dtype=np.uint64)
    cdef const uint64_t[::1] bv = np.ascontiguousarray(b, dtype=np.uint64)
    cdef int64_t j, acc = 0
    with nogil:
        for j in range(av.shape[0]):
            acc += <int64_t>rs_popcnt64(av[j] & (~bv[j]))
    return int(acc)


def class_popcounts(cover, masks):
    cdef const uint64_t[::1] cov = np.ascontiguousarray(cover, dtype=np.uint64)
    cdef const uint64_t[:, ::1] cls = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef int64_t k = cls.shape[0]
    cdef int64_t w = cls.shape[1]
    out_arr = np.zeros(k, np.int64)
    cdef int64_t[::1] out = out_arr
    cdef int64_t c, j, acc
    with nogil:
        for c in range(k):
            acc = 0
            for j in range(w):
                acc += <int64_t>rs_popcnt64(cov[j] & cls[c, j])
            out[c] = acc
    return out_arr
