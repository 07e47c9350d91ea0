"""Versioned JSON documents for every artifact, plus dataset fingerprints.

All writers go through `dumps`, which emits canonical text (sorted keys,
fixed separators), so identical artifacts serialize to identical bytes —
the determinism contract for CLI outputs and service bodies.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .cover import MinimalRuleSet
from .extraction import Condition, Constraints, Rule, RuleMetrics, rule_text
from .forest import ForestConfig, SurrogateForest, SurrogateTree
from .hierarchy import HsrTree
from .tabular import BinningScheme, Dataset, DiscretizedDataset, FeatureMeta

FORMAT = "rulespace-document"
VERSION = 1


def document(kind: str, payload: dict, fingerprint: str | None = None) -> dict:
    doc: dict[str, Any] = {"format": FORMAT, "version": VERSION, "kind": kind, "payload": payload}
    if fingerprint is not None:
        doc["fingerprint"] = fingerprint
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def check_document(doc: dict, kind: str | None = None) -> dict:
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT}: format={doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported document version {doc.get('version')!r}")
    if kind is not None and doc.get("kind") != kind:
        raise ValueError(f"expected kind {kind!r}, got {doc.get('kind')!r}")
    return doc["payload"]


def dataset_fingerprint(dataset: Dataset) -> str:
    h = hashlib.sha256()
    for f in dataset.features:
        h.update(f.name.encode())
        h.update(f.kind.encode())
        for c in f.categories or ():
            h.update(c.encode())
        h.update(b"\x00")
    h.update(np.ascontiguousarray(dataset.rows).tobytes())
    h.update(np.ascontiguousarray(dataset.true_labels).tobytes())
    h.update(np.ascontiguousarray(dataset.predictions).tobytes())
    h.update("\x00".join(dataset.class_names).encode())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Dataset / scheme
# ---------------------------------------------------------------------------

def _features_payload(dataset: Dataset, scheme: BinningScheme | None) -> list[dict]:
    out = []
    for f in dataset.features:
        entry: dict[str, Any] = {"name": f.name, "kind": f.kind, "column_index": f.column_index}
        if f.categories is not None:
            entry["categories"] = list(f.categories)
        if scheme is not None:
            j = f.column_index
            entry["bins"] = {
                "count": scheme.effective_bins(j),
                "labels": [scheme.bin_label(j, b) for b in range(scheme.effective_bins(j))],
            }
            if scheme.thresholds[j] is not None:
                entry["bins"]["thresholds"] = list(scheme.thresholds[j])
        out.append(entry)
    return out


def dataset_document(dataset: Dataset, scheme: BinningScheme | None = None) -> dict:
    payload: dict[str, Any] = {
        "features": _features_payload(dataset, scheme),
        "rows": dataset.rows.tolist(),
        "true_labels": dataset.true_labels.tolist(),
        "predictions": dataset.predictions.tolist(),
        "class_names": list(dataset.class_names),
    }
    if scheme is not None:
        payload["scheme"] = {
            "num_bin": scheme.num_bin,
            "thresholds": [list(t) if t is not None else None for t in scheme.thresholds],
            "categories": [list(c) if c is not None else None for c in scheme.categories],
        }
    return document("dataset", payload, dataset_fingerprint(dataset))


def parse_dataset_document(doc: dict) -> tuple[Dataset, BinningScheme | None]:
    payload = check_document(doc, "dataset")
    features = [
        FeatureMeta(
            name=f["name"], kind=f["kind"], column_index=f["column_index"],
            categories=tuple(f["categories"]) if "categories" in f else None,
        )
        for f in payload["features"]
    ]
    dataset = Dataset(
        features=features,
        rows=np.array(payload["rows"], dtype=np.float64),
        true_labels=np.array(payload["true_labels"], dtype=np.int64),
        predictions=np.array(payload["predictions"], dtype=np.int64),
        class_names=list(payload["class_names"]),
    )
    scheme = None
    if "scheme" in payload:
        s = payload["scheme"]
        scheme = BinningScheme(
            num_bin=s["num_bin"],
            thresholds=tuple(tuple(t) if t is not None else None for t in s["thresholds"]),
            categories=tuple(tuple(c) if c is not None else None for c in s["categories"]),
        )
    return dataset, scheme


# ---------------------------------------------------------------------------
# Forest
# ---------------------------------------------------------------------------

def _config_payload(config: ForestConfig) -> dict:
    return {
        "n_trees": config.n_trees,
        "max_depth": config.max_depth,
        "min_samples_leaf": config.min_samples_leaf,
        "features_per_split": config.features_per_split,
        "rng_seed": config.rng_seed,
    }


def _tree_payload(tree: SurrogateTree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold_bin": tree.threshold_bin.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "depth": tree.depth.tolist(),
        "class_counts": tree.class_counts.tolist(),
    }


def _parse_tree(p: dict) -> SurrogateTree:
    return SurrogateTree(
        np.array(p["feature"], dtype=np.int64),
        np.array(p["threshold_bin"], dtype=np.int64),
        np.array(p["left"], dtype=np.int64),
        np.array(p["right"], dtype=np.int64),
        np.array(p["depth"], dtype=np.int64),
        np.array(p["class_counts"], dtype=np.int64),
    )


def forest_document(forest: SurrogateForest, fingerprint: str | None = None) -> dict:
    payload = {
        "config": _config_payload(forest.config),
        "trees": [_tree_payload(t) for t in forest.trees],
        "bootstrap": [b.tolist() for b in forest.bootstrap],
    }
    return document("forest", payload, fingerprint)


def parse_forest_document(doc: dict) -> SurrogateForest:
    payload = check_document(doc, "forest")
    cfg = payload["config"]
    fps = cfg["features_per_split"]
    config = ForestConfig(
        n_trees=cfg["n_trees"], max_depth=cfg["max_depth"],
        min_samples_leaf=cfg["min_samples_leaf"],
        features_per_split=fps if isinstance(fps, str) else int(fps),
        rng_seed=cfg["rng_seed"],
    )
    return SurrogateForest(
        trees=[_parse_tree(t) for t in payload["trees"]],
        config=config,
        bootstrap=[np.array(b, dtype=np.int64) for b in payload["bootstrap"]],
    )


# ---------------------------------------------------------------------------
# Rules / minimal set / hierarchy
# ---------------------------------------------------------------------------

def condition_payload(cond: Condition, data: DiscretizedDataset) -> dict:
    scheme = data.scheme
    return {
        "feature": cond.feature,
        "feature_name": data.base.features[cond.feature].name,
        "bin_lo": cond.bin_lo,
        "bin_hi": cond.bin_hi,
        "order": cond.order,
        "bin_labels": [scheme.bin_label(cond.feature, b) for b in range(cond.bin_lo, cond.bin_hi + 1)],
        "raw_range": scheme.raw_range_text(cond.feature, cond.bin_lo, cond.bin_hi),
    }


def rule_payload(rule: Rule, metrics: RuleMetrics, data: DiscretizedDataset,
                 rule_id: int | None = None) -> dict:
    from . import kernels
    per_class = kernels.class_popcounts(metrics.cover, data.packed().pred_masks)
    entry: dict[str, Any] = {
        "conditions": [condition_payload(c, data) for c in rule.conditions],
        "consequent": rule.consequent,
        "consequent_name": data.base.class_names[rule.consequent],
        "source": {"tree": rule.source[0], "node": rule.source[1]},
        "metrics": {
            "fidelity": metrics.fidelity,
            "coverage_count": metrics.coverage_count,
            "coverage_frac": metrics.coverage_frac,
            "length": metrics.length,
        },
        "per_class_count": per_class.tolist(),
        "text": rule_text(rule, data, metrics),
    }
    if rule_id is not None:
        entry["rule_id"] = rule_id
    return entry


def constraints_payload(constraints: Constraints) -> dict:
    return {
        "min_fidelity": constraints.min_fidelity,
        "min_coverage": constraints.min_coverage,
        "max_num_condition": constraints.max_num_condition,
        "num_bin": constraints.num_bin,
    }


def minimal_set_payload(minimal: MinimalRuleSet, data: DiscretizedDataset) -> dict:
    from .cover import set_coverage
    return {
        "rules": [rule_payload(r, m, data, rule_id=i) for i, (r, m) in enumerate(minimal.rules)],
        "set_coverage": set_coverage(minimal, data),
        "number_of_rules": len(minimal),
        "selection_log": [
            {"rule_id": step, "pool_index": idx, "gain": gain}
            for step, (idx, gain) in enumerate(minimal.selection_log)
        ],
    }


def hierarchy_payload(tree: HsrTree, data: DiscretizedDataset) -> dict:
    nodes = []
    for node in tree.nodes:
        entry: dict[str, Any] = {
            "id": node.node_id,
            "parent": node.parent,
            "depth": node.depth,
            "children": list(node.children),
            "rule_id": node.rule_id,
            "condition": condition_payload(node.condition, data) if node.condition else None,
        }
        if node.stats is not None:
            entry["stats"] = {
                "cover_count": node.stats.cover_count,
                "per_class_count": list(node.stats.per_class_count),
                "per_class_error_count": list(node.stats.per_class_error_count),
                "per_true_class_count": list(node.stats.per_true_class_count),
            }
        nodes.append(entry)
    return {"root": tree.root, "max_depth": tree.max_depth, "nodes": nodes}


def generate_document(result) -> dict:
    """Combined artifact for one generation run (rule set + hierarchy).

    Deliberately excludes wall-clock timings so repeated runs with the same
    seed serialize to identical bytes; timings travel out of band.
    """
    data = result.data
    payload = {
        "constraints": constraints_payload(result.constraints),
        "seed": result.seed,
        "class_names": list(data.base.class_names),
        "features": _features_payload(data.base, data.scheme),
        "n_instances": data.n,
        "pool_size": len(result.pool),
        "rule_set": minimal_set_payload(result.minimal, data),
        "hierarchy": hierarchy_payload(result.hierarchy, data),
    }
    return document("generate-result", payload, result.fingerprint)
