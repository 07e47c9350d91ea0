"""Synthetic black-box labeler for demos and tests.

Labels rows by a boolean expression over raw feature values, then flips each
label with a seeded probability. This stands in for an external model when
exercising the pipeline end to end; the expression grammar is a restricted
subset of Python (comparisons, and/or/not, parentheses).
"""

from __future__ import annotations

import ast

import numpy as np

from . import rng
from .tabular import CATEGORICAL, Dataset

_ALLOWED_CMP = (ast.Gt, ast.GtE, ast.Lt, ast.LtE, ast.Eq, ast.NotEq)


class ExpressionError(ValueError):
    """Raised for expressions outside the supported grammar."""


def _column(dataset: Dataset, name: str) -> tuple[np.ndarray, object]:
    j = dataset.feature_index(name)
    return dataset.rows[:, j], dataset.features[j]


def _const(node: ast.expr):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, str)):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _const(node.operand)
        if isinstance(inner, (int, float)):
            return -inner
    raise ExpressionError(f"unsupported constant: {ast.dump(node)}")


def _eval(node: ast.expr, dataset: Dataset) -> np.ndarray:
    if isinstance(node, ast.BoolOp):
        parts = [_eval(v, dataset) for v in node.values]
        acc = parts[0]
        for p in parts[1:]:
            acc = acc & p if isinstance(node.op, ast.And) else acc | p
        return acc
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        return ~_eval(node.operand, dataset)
    if isinstance(node, ast.Compare):
        if len(node.ops) != 1 or len(node.comparators) != 1:
            raise ExpressionError("chained comparisons are not supported")
        op = node.ops[0]
        if not isinstance(op, _ALLOWED_CMP):
            raise ExpressionError(f"unsupported operator: {type(op).__name__}")
        if not isinstance(node.left, ast.Name):
            raise ExpressionError("comparisons must have a feature name on the left")
        col, meta = _column(dataset, node.left.id)
        value = _const(node.comparators[0])
        if isinstance(value, str):
            if meta.kind != CATEGORICAL:
                raise ExpressionError(f"feature {meta.name!r} is numeric; compare against a number")
            if value not in meta.categories:
                raise ExpressionError(f"unknown category {value!r} for feature {meta.name!r}")
            value = meta.categories.index(value)
            if not isinstance(op, (ast.Eq, ast.NotEq)):
                raise ExpressionError("categorical features support only == and !=")
        if isinstance(op, ast.Gt):
            return col > value
        if isinstance(op, ast.GtE):
            return col >= value
        if isinstance(op, ast.Lt):
            return col < value
        if isinstance(op, ast.LtE):
            return col <= value
        if isinstance(op, ast.Eq):
            return col == value
        return col != value
    raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def evaluate_expression(expression: str, dataset: Dataset) -> np.ndarray:
    """Boolean vector of the expression over the dataset's raw features."""
    try:
        tree = ast.parse(expression, mode="eval")
    except SyntaxError as e:
        raise ExpressionError(f"cannot parse expression: {e}") from e
    return _eval(tree.body, dataset)


def demo_labels(dataset: Dataset, expression: str, noise: float = 0.0,
                seed: int = 0) -> np.ndarray:
    """0/1 labels from the expression, each flipped with probability `noise`."""
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must be in [0, 1]")
    labels = evaluate_expression(expression, dataset).astype(np.int64)
    if noise > 0.0:
        flips = rng.uniforms(rng.stream_seed(seed, 0xF11B), dataset.n) < noise
        labels = labels ^ flips.astype(np.int64)
    return labels
