"""Hierarchical organization of the minimal rule set.

Rules are stitched into one n-ary prefix tree: walking a rule's ordered
conditions from the root, the longest already-present prefix is reused and
the remaining conditions branch off. Layer i therefore holds exactly the
conditions appearing at position i across rules, and each rule ends at one
terminus node. Node statistics back the explorer's glyphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .cover import MinimalRuleSet
from .extraction import Condition, Rule
from .tabular import DiscretizedDataset


@dataclass
class NodeStats:
    cover_count: int
    per_class_count: list[int]         # covered instances by black-box prediction
    per_class_error_count: list[int]   # of those, prediction != true label
    per_true_class_count: list[int]    # covered instances by true label


@dataclass
class HierNode:
    node_id: int
    parent: int | None
    condition: Condition | None        # None only at the root
    depth: int
    children: list[int] = field(default_factory=list)
    rule_id: int | None = None
    stats: NodeStats | None = None


@dataclass
class HsrTree:
    nodes: list[HierNode]
    root: int = 0

    @property
    def max_depth(self) -> int:
        return max(n.depth for n in self.nodes)

    def path_conditions(self, node_id: int) -> list[Condition]:
        out: list[Condition] = []
        node = self.nodes[node_id]
        while node.parent is not None:
            out.append(node.condition)
            node = self.nodes[node.parent]
        out.reverse()
        return out

    def termini(self) -> list[HierNode]:
        return [n for n in self.nodes if n.rule_id is not None]


def _same_interval(a: Condition, b: Condition) -> bool:
    return a.feature == b.feature and a.bin_lo == b.bin_lo and a.bin_hi == b.bin_hi


def build_hsr(rs: MinimalRuleSet) -> HsrTree:
    """Insert rules in selection order, branching at the first condition that
    has no exact match (feature and bin interval) among existing children."""
    nodes = [HierNode(0, None, None, 0)]
    for rule_id, (rule, _) in enumerate(rs.rules):
        cur = 0
        for cond in rule.conditions:
            found = None
            for child_id in nodes[cur].children:
                child = nodes[child_id]
                if _same_interval(child.condition, cond):
                    found = child_id
                    break
            if found is None:
                found = len(nodes)
                nodes.append(HierNode(found, cur, cond, nodes[cur].depth + 1))
                nodes[cur].children.append(found)
            cur = found
        if nodes[cur].rule_id is not None:
            raise ValueError(
                f"duplicate rule: rule {rule_id} repeats the condition path of rule {nodes[cur].rule_id}"
            )
        nodes[cur].rule_id = rule_id
    # siblings ordered by feature column, then low-to-high interval
    for node in nodes:
        node.children.sort(key=lambda i: (nodes[i].condition.feature,
                                          nodes[i].condition.bin_lo,
                                          nodes[i].condition.bin_hi))
    return HsrTree(nodes)


def annotate_stats(tree: HsrTree, data: DiscretizedDataset) -> HsrTree:
    """Fill every node's stats from the instances matching its prefix
    conjunction. Class segments are keyed by black-box prediction; the error
    split counts predictions that disagree with the true label."""
    packed = data.packed()
    covers: dict[int, np.ndarray] = {tree.root: packed.all_rows.copy()}
    order = [tree.root]
    for node_id in order:
        node = tree.nodes[node_id]
        cover = covers[node_id]
        per_pred = kernels.class_popcounts(cover, packed.pred_masks)
        per_err = kernels.class_popcounts(cover, packed.error_masks)
        per_true = kernels.class_popcounts(cover, packed.true_masks)
        node.stats = NodeStats(
            cover_count=int(per_pred.sum()),
            per_class_count=[int(x) for x in per_pred],
            per_class_error_count=[int(x) for x in per_err],
            per_true_class_count=[int(x) for x in per_true],
        )
        for child_id in node.children:
            cond = tree.nodes[child_id].condition
            covers[child_id] = cover & packed.range_mask(cond.feature, cond.bin_lo, cond.bin_hi)
            order.append(child_id)
        del covers[node_id]
    return tree


def node_rule(tree: HsrTree, node_id: int) -> Rule:
    """The prefix conjunction at a node as a rule; its consequent is the
    majority black-box prediction over the node's cover (requires stats)."""
    if not 0 <= node_id < len(tree.nodes):
        raise KeyError(f"no hierarchy node {node_id}")
    node = tree.nodes[node_id]
    if node.stats is None:
        raise ValueError("hierarchy not annotated; call annotate_stats first")
    counts = node.stats.per_class_count
    consequent = int(np.argmax(np.asarray(counts))) if counts else 0
    conditions = tuple(
        Condition(c.feature, c.bin_lo, c.bin_hi, i)
        for i, c in enumerate(tree.path_conditions(node_id))
    )
    return Rule(conditions=conditions, consequent=consequent)
