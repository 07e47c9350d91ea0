"""Surrogate model induction.

Trains a random forest (and a single-tree baseline) on the black-box model's
predictions over discretized codes. Split candidates are the bin boundaries,
so every path condition maps directly onto an ordinal descriptor. The heavy
lifting lives in the kernel backends; this module owns configuration,
bootstrap bookkeeping, and the array-backed tree structure.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels, rng
from .tabular import DiscretizedDataset

_BOOTSTRAP_TAG = 0xB007


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    features_per_split: str | int = "sqrt"   # "sqrt" | "all" | fixed count
    rng_seed: int = 0

    def validate(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if isinstance(self.features_per_split, int) and self.features_per_split < 1:
            raise ValueError("features_per_split count must be >= 1")
        if isinstance(self.features_per_split, str) and self.features_per_split not in ("sqrt", "all"):
            raise ValueError("features_per_split must be 'sqrt', 'all', or an int")

    def n_candidates(self, d: int) -> int:
        if self.features_per_split == "sqrt":
            return min(d, max(1, math.ceil(math.sqrt(d))))
        if self.features_per_split == "all":
            return d
        return min(d, int(self.features_per_split))


@dataclass(frozen=True)
class SplitNode:
    """View of one tree node; internal nodes split on codes[feature] < threshold_bin."""
    node_id: int
    feature: int | None
    threshold_bin: int | None
    left_child: int | None
    right_child: int | None
    class_counts: tuple[int, ...]
    depth: int

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


class SurrogateTree:
    """Array-backed decision tree; node 0 is the root, ids are preorder."""

    def __init__(self, feature, threshold_bin, left, right, depth, class_counts):
        self.feature = feature              # int64 (N,), -1 for leaves
        self.threshold_bin = threshold_bin  # int64 (N,)
        self.left = left
        self.right = right
        self.depth = depth
        self.class_counts = class_counts    # int64 (N, k)

    def __len__(self) -> int:
        return self.feature.shape[0]

    @property
    def n_classes(self) -> int:
        return self.class_counts.shape[1]

    def is_leaf(self, node_id: int) -> bool:
        return self.feature[node_id] < 0

    def node(self, node_id: int) -> SplitNode:
        leaf = self.is_leaf(node_id)
        return SplitNode(
            node_id=node_id,
            feature=None if leaf else int(self.feature[node_id]),
            threshold_bin=None if leaf else int(self.threshold_bin[node_id]),
            left_child=None if leaf else int(self.left[node_id]),
            right_child=None if leaf else int(self.right[node_id]),
            class_counts=tuple(int(c) for c in self.class_counts[node_id]),
            depth=int(self.depth[node_id]),
        )

    @property
    def nodes(self) -> list[SplitNode]:
        return [self.node(i) for i in range(len(self))]

    def predict_one(self, codes_vec: np.ndarray) -> int:
        i = 0
        while not self.is_leaf(i):
            if codes_vec[self.feature[i]] < self.threshold_bin[i]:
                i = int(self.left[i])
            else:
                i = int(self.right[i])
        return int(np.argmax(self.class_counts[i]))  # ties -> lowest class id


@dataclass
class SurrogateForest:
    trees: list[SurrogateTree]
    config: ForestConfig
    bootstrap: list[np.ndarray] = field(default_factory=list)   # row indices per tree

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def _grow(data: DiscretizedDataset, samples: np.ndarray, config: ForestConfig,
          n_candidates: int, node_seed: int) -> SurrogateTree:
    labels = data.base.predictions
    max_depth = -1 if config.max_depth is None else config.max_depth
    arrays = kernels.grow_tree(
        np.ascontiguousarray(data.codes),
        np.ascontiguousarray(labels, dtype=np.int64),
        np.ascontiguousarray(samples, dtype=np.int64),
        data.effective_bins(),
        data.base.k,
        max_depth,
        config.min_samples_leaf,
        n_candidates,
        node_seed,
    )
    return SurrogateTree(*arrays)


def _check(data: DiscretizedDataset) -> None:
    if data.n == 0:
        raise ValueError("cannot train on an empty dataset")
    if data.n > kernels.MAX_SAMPLES:
        raise ValueError(f"dataset has {data.n} rows; supported maximum is {kernels.MAX_SAMPLES}")
    if len(np.unique(data.base.predictions)) < 2:
        warnings.warn("black-box predictions are single-class; every tree degenerates to its root")


def train_forest(data: DiscretizedDataset, config: ForestConfig | None = None,
                 deadline: float | None = None) -> SurrogateForest:
    """Grow `n_trees` CART trees on bootstrap samples of the surrogate labels.

    Per-tree randomness is derived from (rng_seed, tree_index), so the forest
    is reproducible and independent of scheduling. `deadline` (perf_counter
    timestamp) aborts between trees with TimeoutError.
    """
    config = config or ForestConfig()
    config.validate()
    _check(data)
    n_candidates = config.n_candidates(data.d)
    trees: list[SurrogateTree] = []
    bootstrap: list[np.ndarray] = []
    for t in range(config.n_trees):
        if deadline is not None and time.perf_counter() > deadline:
            raise TimeoutError(f"forest training exceeded its time budget at tree {t}/{config.n_trees}")
        samples = rng.bootstrap_indices(data.n, rng.stream_seed(config.rng_seed, t, _BOOTSTRAP_TAG))
        node_seed = rng.stream_seed(config.rng_seed, t)
        trees.append(_grow(data, samples, config, n_candidates, node_seed))
        bootstrap.append(samples)
    return SurrogateForest(trees, config, bootstrap)


def train_single_tree(data: DiscretizedDataset, config: ForestConfig | None = None) -> SurrogateTree:
    """Single-tree baseline: no bootstrap, every feature considered at every node."""
    config = config or ForestConfig()
    config.validate()
    _check(data)
    samples = np.arange(data.n, dtype=np.int64)
    return _grow(data, samples, config, data.d, rng.stream_seed(config.rng_seed, 0))


def tree_predict(tree: SurrogateTree, codes_vec: np.ndarray) -> int:
    """Class of maximal class_counts at the reached leaf; ties to lowest id."""
    if codes_vec.shape[0] != 0 and tree.feature.max(initial=-1) >= codes_vec.shape[0]:
        raise ValueError("instance vector shorter than the tree's feature space")
    return tree.predict_one(codes_vec)
