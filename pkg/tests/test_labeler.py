import numpy as np
import pytest

import rulespace as rs
from rulespace.labeler import ExpressionError, demo_labels, evaluate_expression

from conftest import synth_dataset


def _ds():
    rows = np.array([
        [150.0, 20.0], [130.0, 35.0], [141.0, 31.0], [100.0, 28.0],
    ])
    feats = [rs.FeatureMeta("Glucose", "numeric", 0), rs.FeatureMeta("BMI", "numeric", 1)]
    z = np.zeros(4, dtype=np.int64)
    return rs.Dataset(feats, rows, z, z.copy(), ["0", "1"])


def test_expression_truth_values():
    ds = _ds()
    assert evaluate_expression("Glucose > 140", ds).tolist() == [True, False, True, False]
    assert evaluate_expression("Glucose > 140 and BMI <= 30", ds).tolist() \
        == [True, False, False, False]
    assert evaluate_expression("not (Glucose > 140 or BMI > 30)", ds).tolist() \
        == [False, False, False, True]
    assert evaluate_expression("Glucose == 100", ds).tolist() == [False, False, False, True]


def test_noise_zero_equals_expression():
    ds = _ds()
    labels = demo_labels(ds, "Glucose > 140", noise=0.0, seed=9)
    assert labels.tolist() == [1, 0, 1, 0]


def test_noise_one_flips_everything():
    ds = _ds()
    labels = demo_labels(ds, "Glucose > 140", noise=1.0, seed=9)
    assert labels.tolist() == [0, 1, 0, 1]


def test_noise_fraction_reproducible_and_binomial():
    ds = synth_dataset(0, n=1000, d=3)
    base = demo_labels(ds, "f0 > 0", noise=0.0)
    a = demo_labels(ds, "f0 > 0", noise=0.1, seed=42)
    b = demo_labels(ds, "f0 > 0", noise=0.1, seed=42)
    assert np.array_equal(a, b)
    flips = int((a != base).sum())
    # ~Binomial(1000, 0.1): allow five standard deviations
    assert abs(flips - 100) <= 5 * np.sqrt(1000 * 0.1 * 0.9)
    c = demo_labels(ds, "f0 > 0", noise=0.1, seed=43)
    assert not np.array_equal(a, c)


def test_categorical_equality():
    rows = np.array([[0.0], [1.0], [0.0]])
    feats = [rs.FeatureMeta("color", "categorical", 0, ("blue", "red"))]
    z = np.zeros(3, dtype=np.int64)
    ds = rs.Dataset(feats, rows, z, z.copy(), ["0"])
    assert evaluate_expression("color == 'red'", ds).tolist() == [False, True, False]
    with pytest.raises(ExpressionError, match="only == and !="):
        evaluate_expression("color > 'red'", ds)


def test_bad_expressions_rejected():
    ds = _ds()
    for expr in ("__import__('os')", "Glucose + 1 > 2", "Unknown > 3",
                 "Glucose > BMI", "1 < Glucose < 2"):
        with pytest.raises((ExpressionError, KeyError)):
            evaluate_expression(expr, ds)


def test_noise_out_of_range():
    with pytest.raises(ValueError, match="noise"):
        demo_labels(_ds(), "Glucose > 140", noise=1.5)
