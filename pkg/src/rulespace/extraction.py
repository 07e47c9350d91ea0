"""Rule extraction from pruned surrogate trees.

Walks every tree depth-first; the conditions accumulated on the way into a
node form a candidate rule. The first node on a path whose rule meets the
fidelity, coverage, and length constraints is emitted and its subtree is
skipped, which privileges shorter rules with larger coverage. Repeated splits
on one feature merge into a single bin interval before the length check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .forest import SurrogateForest, SurrogateTree
from .tabular import DiscretizedDataset


@dataclass(frozen=True)
class Condition:
    """Inclusive bin interval on one feature; `order` is the position at
    which the feature first appeared along the decision path."""
    feature: int
    bin_lo: int
    bin_hi: int
    order: int

    def matches(self, code: int) -> bool:
        return self.bin_lo <= code <= self.bin_hi


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]   # one per distinct feature, by `order`
    consequent: int
    source: tuple[int, int] = (-1, -1)  # (tree index, node id)

    @property
    def length(self) -> int:
        return len(self.conditions)

    @property
    def is_trivial(self) -> bool:
        return not self.conditions

    def normalized(self) -> tuple:
        """Dedup key: interval set (sorted by feature) plus consequent."""
        return (tuple(sorted((c.feature, c.bin_lo, c.bin_hi) for c in self.conditions)),
                self.consequent)


@dataclass
class RuleMetrics:
    fidelity: float
    coverage_count: int
    coverage_frac: float
    length: int
    cover: np.ndarray               # uint64 bitset over training instances
    consequent: int                 # majority surrogate label over the cover
    valid: bool = True


@dataclass(frozen=True)
class Constraints:
    min_fidelity: float = 0.85
    min_coverage: int = 5
    max_num_condition: int = 3
    num_bin: int = 3

    def validate(self) -> None:
        if not 0.0 < self.min_fidelity <= 1.0:
            raise ValueError("min_fidelity must be in (0, 1]")
        if self.min_coverage < 1:
            raise ValueError("min_coverage must be >= 1")
        if self.max_num_condition < 1:
            raise ValueError("max_num_condition must be >= 1")
        if self.num_bin < 2:
            raise ValueError("num_bin must be >= 2")


@dataclass
class RulePool:
    rules: list[tuple[Rule, RuleMetrics]]
    constraints: Constraints
    n_instances: int = 0
    fingerprint: str = ""

    def __len__(self) -> int:
        return len(self.rules)


def evaluate_rule(rule: Rule, data: DiscretizedDataset) -> RuleMetrics:
    """Metrics over the full training set; the consequent is recomputed as
    the majority surrogate label (ties to lowest class id). An empty cover
    yields an invalid metrics record."""
    packed = data.packed()
    cover = packed.all_rows.copy()
    for c in rule.conditions:
        if not 0 <= c.feature < data.d:
            raise ValueError(f"condition on unknown feature {c.feature}")
        cover &= packed.range_mask(c.feature, c.bin_lo, c.bin_hi)
    counts = kernels.class_popcounts(cover, packed.pred_masks)
    total = int(counts.sum())
    if total == 0:
        return RuleMetrics(0.0, 0, 0.0, rule.length, cover, rule.consequent, valid=False)
    consequent = int(np.argmax(counts))
    return RuleMetrics(
        fidelity=int(counts[consequent]) / total,
        coverage_count=total,
        coverage_frac=total / data.n,
        length=rule.length,
        cover=cover,
        consequent=consequent,
    )


def _trees_of(forest: SurrogateForest | Sequence[SurrogateTree] | SurrogateTree) -> list[SurrogateTree]:
    if isinstance(forest, SurrogateForest):
        return forest.trees
    if isinstance(forest, SurrogateTree):
        return [forest]
    return list(forest)


def extract_rules(forest: SurrogateForest | Sequence[SurrogateTree] | SurrogateTree,
                  data: DiscretizedDataset, constraints: Constraints | None = None) -> RulePool:
    """Depth-first constraint-pruned extraction over every tree.

    Emits the first node per path whose accumulated rule satisfies all three
    constraints, then skips its subtree. Exact duplicates across trees
    (same interval set and consequent) keep only their first occurrence.
    """
    constraints = constraints or Constraints()
    constraints.validate()
    packed = data.packed()
    n = data.n
    pool: list[tuple[Rule, RuleMetrics]] = []
    seen: set[tuple] = set()

    for t_idx, tree in enumerate(_trees_of(forest)):
        covers, cover_counts, class_counts = kernels.node_covers_and_counts(
            tree.feature, tree.threshold_bin, tree.left, tree.right,
            packed.lt_masks, packed.all_rows, packed.pred_masks,
        )

        # intervals: feature -> (lo, hi, order); insertion order = first appearance.
        # Explicit stack, right child pushed first, so emission order matches
        # the recursive depth-first walk.
        stack: list[tuple[int, dict[int, tuple[int, int, int]]]] = [(0, {})]
        while stack:
            node_id, intervals = stack.pop()
            count = int(cover_counts[node_id])
            length = len(intervals)
            if count < constraints.min_coverage or length > constraints.max_num_condition:
                continue  # cover shrinks and merged length grows monotonically
            if length >= 1:
                counts = class_counts[node_id]
                consequent = int(np.argmax(counts))
                if int(counts[consequent]) / count >= constraints.min_fidelity:
                    rule = Rule(
                        conditions=tuple(
                            Condition(f, lo, hi, order)
                            for f, (lo, hi, order) in sorted(intervals.items(), key=lambda kv: kv[1][2])
                        ),
                        consequent=consequent,
                        source=(t_idx, node_id),
                    )
                    key = rule.normalized()
                    if key not in seen:
                        seen.add(key)
                        metrics = RuleMetrics(
                            fidelity=int(counts[consequent]) / count,
                            coverage_count=count,
                            coverage_frac=count / n,
                            length=length,
                            cover=covers[node_id].copy(),
                            consequent=consequent,
                        )
                        pool.append((rule, metrics))
                    continue  # first hit wins; subtree skipped either way
            if tree.is_leaf(node_id):
                continue
            f = int(tree.feature[node_id])
            b = int(tree.threshold_bin[node_id])
            lo, hi, order = intervals.get(f, (0, data.scheme.effective_bins(f) - 1, len(intervals)))
            right_iv = dict(intervals)
            right_iv[f] = (max(lo, b), hi, order)
            stack.append((int(tree.right[node_id]), right_iv))
            left_iv = dict(intervals)
            left_iv[f] = (lo, min(hi, b - 1), order)
            stack.append((int(tree.left[node_id]), left_iv))

    return RulePool(pool, constraints, n_instances=n)


def rule_text(rule: Rule, data: DiscretizedDataset, metrics: RuleMetrics | None = None) -> str:
    """Readable `IF ... THEN ...` line with ordinal descriptors and raw ranges."""
    base = data.base
    scheme = data.scheme
    if rule.is_trivial:
        antecedent = "TRUE"
    else:
        parts = []
        for c in rule.conditions:
            name = base.features[c.feature].name
            if c.bin_lo == c.bin_hi:
                label = scheme.bin_label(c.feature, c.bin_lo)
            else:
                label = f"{scheme.bin_label(c.feature, c.bin_lo)}..{scheme.bin_label(c.feature, c.bin_hi)}"
            parts.append(f"{name} is {label} {scheme.raw_range_text(c.feature, c.bin_lo, c.bin_hi)}")
        antecedent = " AND ".join(parts)
    text = f"IF {antecedent} THEN {base.class_names[rule.consequent]}"
    if metrics is not None:
        text += f"  [fid={metrics.fidelity:.3f} cov={metrics.coverage_count} len={metrics.length}]"
    return text
