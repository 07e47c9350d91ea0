import numpy as np
import pytest

import rulespace as rs
from rulespace.labeler import demo_labels

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"

# Expressions the bundled tables were designed around (thresholds sit on the
# empirical tertiles so binned regions align with the labeler's regions).
DIABETES_EXPR = "Glucose >= 134 or BMI >= 36"
CREDIT_EXPR = "CreditScore < 626 or DebtRatio >= 0.434"
LABELER_SEED = 7


def synth_dataset(seed: int, n: int = 120, d: int = 4, k: int = 2,
                  n_bins_hint: int = 4) -> rs.Dataset:
    """Small random dataset with random predictions, for unit tests."""
    r = np.random.default_rng(seed)
    rows = np.round(r.normal(0, 10, size=(n, d)), 2)
    features = [rs.FeatureMeta(f"f{j}", "numeric", j) for j in range(d)]
    labels = r.integers(0, k, size=n).astype(np.int64)
    preds = r.integers(0, k, size=n).astype(np.int64)
    return rs.Dataset(features, rows, labels, preds, [str(c) for c in range(k)])


@pytest.fixture(scope="session")
def diabetes() -> rs.Dataset:
    ds = rs.load_dataset(FIXTURES / "diabetes_surrogate.csv", "Outcome",
                         _preds_file(FIXTURES / "diabetes_surrogate.csv", "Outcome"))
    ds.predictions = demo_labels(ds, DIABETES_EXPR, noise=0.15, seed=LABELER_SEED)
    return ds


@pytest.fixture(scope="session")
def credit() -> rs.Dataset:
    ds = rs.load_dataset(FIXTURES / "credit_risk.csv", "Default",
                         _preds_file(FIXTURES / "credit_risk.csv", "Default"))
    ds.predictions = demo_labels(ds, CREDIT_EXPR, noise=0.15, seed=LABELER_SEED)
    return ds


def _preds_file(csv_path, label_col):
    """Temp predictions file mirroring the label column (placeholder until
    demo labels are attached)."""
    import csv as _csv
    import tempfile

    with open(csv_path, newline="") as fh:
        reader = _csv.reader(fh)
        header = next(reader)
        idx = header.index(label_col)
        values = [row[idx] for row in reader if row]
    tmp = tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False)
    tmp.write("\n".join(values) + "\n")
    tmp.close()
    return tmp.name


@pytest.fixture(scope="session")
def diabetes_disc(diabetes) -> rs.DiscretizedDataset:
    return rs.discretize(diabetes, rs.compute_binning(diabetes, 3))
