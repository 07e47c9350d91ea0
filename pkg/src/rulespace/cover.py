"""Greedy minimization of the rule pool into a small covering rule set.

Classic greedy set cover over instance bitsets: each step picks the rule that
covers the most still-uncovered instances. Selection stops once everything
the pool can describe is covered, or when the best remaining gain drops below
a fraction (default 0.5%) of that describable universe, which keeps long
tails of near-useless rules out of the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bitset, kernels
from .extraction import Rule, RuleMetrics, RulePool
from .tabular import DiscretizedDataset

STOP_FRACTION = 0.005


@dataclass
class CoverUniverse:
    """Union of all pool rule covers: the describable part of the dataset."""
    universe: np.ndarray        # uint64 bitset
    n_universe: int

    @classmethod
    def of(cls, pool: RulePool) -> "CoverUniverse":
        if not pool.rules:
            return cls(np.zeros(0, dtype=np.uint64), 0)
        acc = np.zeros_like(pool.rules[0][1].cover)
        for _, metrics in pool.rules:
            acc |= metrics.cover
        return cls(acc, kernels.popcount(acc))


@dataclass
class MinimalRuleSet:
    rules: list[tuple[Rule, RuleMetrics]]        # selection order
    covered: np.ndarray                          # uint64 bitset
    set_coverage: float                          # |covered| / n over the full dataset
    selection_log: list[tuple[int, int]]         # (pool index, uncover gain) per step
    pool_indices: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rules)


def greedy_minimal_set(pool: RulePool, stop_fraction: float | None = STOP_FRACTION) -> MinimalRuleSet:
    """Greedy cover of the pool's universe.

    Ties on gain prefer higher fidelity, then shorter length, then lower pool
    index. `stop_fraction=None` (or 0) disables the early-stop criterion; the
    comparison against stop_fraction * |D_R| is strict and real-valued.
    """
    uni = CoverUniverse.of(pool)
    if not pool.rules:
        return MinimalRuleSet([], uni.universe, 0.0, [])
    n = pool.n_instances or uni.n_universe
    threshold = (stop_fraction or 0.0) * uni.n_universe
    covers = np.stack([m.cover for _, m in pool.rules])
    covered = np.zeros_like(uni.universe)
    remaining = list(range(len(pool.rules)))
    chosen: list[int] = []
    log: list[tuple[int, int]] = []
    n_covered = 0

    while remaining and n_covered < uni.n_universe:
        gains = kernels.gains(covers[remaining], covered)
        best_gain = int(gains.max())
        if best_gain <= 0:
            break
        if stop_fraction and best_gain < threshold:
            break
        best = None
        for pos, g in enumerate(gains):
            if int(g) != best_gain:
                continue
            idx = remaining[pos]
            _, m = pool.rules[idx]
            key = (-m.fidelity, m.length, idx)
            if best is None or key < best[0]:
                best = (key, pos, idx)
        _, pos, idx = best
        covered |= covers[idx]
        n_covered += best_gain
        chosen.append(idx)
        log.append((idx, best_gain))
        remaining.pop(pos)

    return MinimalRuleSet(
        rules=[pool.rules[i] for i in chosen],
        covered=covered,
        set_coverage=(n_covered / n) if n else 0.0,
        selection_log=log,
        pool_indices=chosen,
    )


def set_coverage(rs: MinimalRuleSet, data: DiscretizedDataset) -> float:
    """Fraction of the whole dataset covered by the selected rules."""
    if not rs.rules:
        return 0.0
    acc = np.zeros_like(rs.rules[0][1].cover)
    for _, m in rs.rules:
        acc |= m.cover
    return kernels.popcount(acc) / data.n
