"""Tabular ingestion, percentile binning, and discretization.

Ingests a delimited table with true labels plus a separate black-box
prediction file, and turns numeric features into ordinal bin codes. Every
downstream stage (forest, extraction, hierarchy) consumes the discretized
dataset produced here.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bitset

NUMERIC = "numeric"
CATEGORICAL = "categorical"

_BIN_WORDS = {
    2: ("low", "high"),
    3: ("low", "medium", "high"),
    4: ("low", "medium-low", "medium-high", "high"),
    5: ("low", "medium-low", "medium", "medium-high", "high"),
}


class IngestError(ValueError):
    """Raised when input files violate the ingestion contract."""


@dataclass(frozen=True)
class FeatureMeta:
    """One column of the table. For categorical features the raw matrix
    stores the index into `categories`."""
    name: str
    kind: str
    column_index: int
    categories: tuple[str, ...] | None = None


@dataclass
class Dataset:
    features: list[FeatureMeta]
    rows: np.ndarray            # float64 (n, d); categorical cells hold category indices
    true_labels: np.ndarray     # int64 (n,)
    predictions: np.ndarray     # int64 (n,) output of the black box
    class_names: list[str]

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    @property
    def k(self) -> int:
        return len(self.class_names)

    def feature_names(self) -> list[str]:
        return [f.name for f in self.features]

    def feature_index(self, name: str) -> int:
        for f in self.features:
            if f.name == name:
                return f.column_index
        raise KeyError(f"unknown feature: {name!r}")


@dataclass(frozen=True)
class BinningScheme:
    """Per-feature discretization: threshold lists for numeric features
    (strictly increasing, length <= num_bin - 1 after de-duplication),
    native categories for categorical ones."""
    num_bin: int
    thresholds: tuple[tuple[float, ...] | None, ...]   # None for categorical
    categories: tuple[tuple[str, ...] | None, ...]     # None for numeric

    def effective_bins(self, j: int) -> int:
        if self.thresholds[j] is not None:
            return len(self.thresholds[j]) + 1
        return len(self.categories[j])

    def bin_label(self, j: int, b: int) -> str:
        """Ordinal descriptor ("low"/"medium"/...) or the category name."""
        cats = self.categories[j]
        if cats is not None:
            return cats[b]
        k = self.effective_bins(j)
        words = _BIN_WORDS.get(k)
        if words is not None:
            return words[b]
        return f"bin {b}"

    def raw_range_text(self, j: int, lo: int, hi: int) -> str:
        """Human-readable raw-value range for bins lo..hi of feature j."""
        cats = self.categories[j]
        if cats is not None:
            return "{" + ", ".join(cats[lo:hi + 1]) + "}"
        ts = self.thresholds[j]
        left = "-inf" if lo == 0 else _fmt(ts[lo - 1])
        right = "+inf" if hi >= len(ts) else _fmt(ts[hi])
        return f"[{left}, {right})"


def _fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass
class DiscretizedDataset:
    base: Dataset
    codes: np.ndarray           # uint8 (n, d)
    scheme: BinningScheme
    _packed: "PackedData | None" = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def d(self) -> int:
        return self.codes.shape[1]

    def effective_bins(self) -> np.ndarray:
        return np.array([self.scheme.effective_bins(j) for j in range(self.d)], dtype=np.int64)

    def packed(self) -> "PackedData":
        if self._packed is None:
            self._packed = PackedData.build(self)
        return self._packed


@dataclass
class PackedData:
    """Bitset views of a discretized dataset, shared by every hot path.

    lt_masks[f, b] holds the rows with codes[:, f] < b; entries with
    b > effective_bins(f) repeat the all-rows mask and are never consulted.
    """
    n: int
    words: int
    all_rows: np.ndarray            # uint64 (w,)
    lt_masks: np.ndarray            # uint64 (d, max_bins + 1, w)
    pred_masks: np.ndarray          # uint64 (k, w), rows with F(x) = c
    true_masks: np.ndarray          # uint64 (k, w), rows with y = c
    error_masks: np.ndarray         # uint64 (k, w), rows with F(x) = c and y != c

    @classmethod
    def build(cls, data: DiscretizedDataset) -> "PackedData":
        n, d = data.codes.shape
        k = data.base.k
        w = bitset.n_words(n)
        all_rows = bitset.ones(n)
        nb = data.effective_bins()
        max_b = int(nb.max()) if d else 1
        lt = np.empty((d, max_b + 1, w), dtype=np.uint64)
        for f in range(d):
            col = data.codes[:, f]
            for b in range(max_b + 1):
                if b == 0:
                    lt[f, b] = 0
                elif b >= nb[f]:
                    lt[f, b] = all_rows
                else:
                    lt[f, b] = bitset.pack_bool(col < b)
        preds = data.base.predictions
        trues = data.base.true_labels
        pred_masks = np.empty((k, w), dtype=np.uint64)
        true_masks = np.empty((k, w), dtype=np.uint64)
        error_masks = np.empty((k, w), dtype=np.uint64)
        for c in range(k):
            pred_masks[c] = bitset.pack_bool(preds == c)
            true_masks[c] = bitset.pack_bool(trues == c)
            error_masks[c] = bitset.pack_bool((preds == c) & (trues != c))
        return cls(n, w, all_rows, lt, pred_masks, true_masks, error_masks)

    def range_mask(self, f: int, lo: int, hi: int) -> np.ndarray:
        """Rows with lo <= codes[:, f] <= hi."""
        return self.lt_masks[f, hi + 1] & ~self.lt_masks[f, lo]


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def _read_table(path: str | Path, delimiter: str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise IngestError(f"{path}: empty table (need a header row and at least one data row)")
    header = [h.strip() for h in rows[0]]
    body = [[cell.strip() for cell in row] for row in rows[1:]]
    width = len(header)
    for i, row in enumerate(body):
        if len(row) != width:
            raise IngestError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
    return header, body


def _read_predictions(path: str | Path, n_rows: int, delimiter: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    values = [ln.split(delimiter)[0].strip() for ln in lines]
    if len(values) == n_rows + 1:
        values = values[1:]  # single-column table with a header line
    if len(values) != n_rows:
        raise IngestError(
            f"row-count mismatch: table has {n_rows} rows, predictions file has {len(values)}"
        )
    return values


def _is_float(s: str) -> bool:
    try:
        v = float(s)
    except ValueError:
        return False
    return math.isfinite(v)


def _sorted_classes(values: set[str]) -> list[str]:
    if all(_is_float(v) for v in values):
        return sorted(values, key=float)
    return sorted(values)


def load_dataset(data_path: str | Path, label_column: str,
                 predictions_path: str | Path, delimiter: str = ",") -> Dataset:
    """Ingest the data table and the black-box prediction file.

    The label column is removed from the feature set; class_names is the
    sorted union of label and prediction values. Prediction files holding
    bare integers against non-numeric label names are read as class ids.
    """
    header, body = _read_table(data_path, delimiter)
    if label_column not in header:
        raise IngestError(f"label column {label_column!r} not in header {header}")
    if len(set(header)) != len(header):
        raise IngestError("duplicate column names in header")
    label_idx = header.index(label_column)
    n = len(body)
    raw_labels = [row[label_idx] for row in body]
    raw_preds = _read_predictions(predictions_path, n, delimiter)

    for i, v in enumerate(raw_labels):
        if v == "":
            raise IngestError(f"missing label at data row {i + 1}")

    label_values = set(raw_labels)
    labels_numeric = all(_is_float(v) for v in label_values)
    preds_numeric = all(_is_float(v) for v in raw_preds)
    pred_is_id = (not labels_numeric) and preds_numeric and all(
        float(v) == int(float(v)) for v in raw_preds
    )
    if pred_is_id:
        class_names = _sorted_classes(label_values)
        pred_names = []
        for v in raw_preds:
            idx = int(float(v))
            if not 0 <= idx < len(class_names):
                raise IngestError(f"unknown class id {idx} in predictions (have {len(class_names)} classes)")
            pred_names.append(class_names[idx])
    else:
        pred_names = list(raw_preds)
        class_names = _sorted_classes(label_values | set(pred_names))

    class_id = {name: i for i, name in enumerate(class_names)}
    true_labels = np.array([class_id[v] for v in raw_labels], dtype=np.int64)
    predictions = np.array([class_id[v] for v in pred_names], dtype=np.int64)

    feature_cols = [j for j in range(len(header)) if j != label_idx]
    features: list[FeatureMeta] = []
    rows = np.empty((n, len(feature_cols)), dtype=np.float64)
    for out_j, j in enumerate(feature_cols):
        name = header[j]
        cells = [row[j] for row in body]
        for i, cell in enumerate(cells):
            if cell == "":
                raise IngestError(f"missing value at row {i + 1}, column {name!r}")
        if all(_is_float(c) for c in cells):
            features.append(FeatureMeta(name, NUMERIC, out_j))
            rows[:, out_j] = [float(c) for c in cells]
        else:
            cats = tuple(sorted(set(cells)))
            index = {c: i for i, c in enumerate(cats)}
            features.append(FeatureMeta(name, CATEGORICAL, out_j, cats))
            rows[:, out_j] = [index[c] for c in cells]

    return Dataset(features, rows, true_labels, predictions, class_names)


# ---------------------------------------------------------------------------
# Binning / discretization
# ---------------------------------------------------------------------------

def compute_binning(dataset: Dataset, num_bin: int = 3) -> BinningScheme:
    """Percentile thresholds at i/num_bin quantiles (linear interpolation),
    de-duplicated; categorical features keep their native categories."""
    if num_bin < 2:
        raise ValueError(f"num_bin must be >= 2, got {num_bin}")
    thresholds: list[tuple[float, ...] | None] = []
    categories: list[tuple[str, ...] | None] = []
    for meta in dataset.features:
        if meta.kind == CATEGORICAL:
            thresholds.append(None)
            categories.append(meta.categories)
            continue
        col = dataset.rows[:, meta.column_index]
        qs = [i / num_bin for i in range(1, num_bin)]
        raw = np.quantile(col, qs, method="linear")
        uniq: list[float] = []
        for t in raw:
            t = float(t)
            if not uniq or t > uniq[-1]:
                uniq.append(t)
        # a threshold equal to the minimum puts nothing below it; drop it
        lo = float(col.min())
        uniq = [t for t in uniq if t > lo]
        if not uniq:
            warnings.warn(f"feature {meta.name!r} is constant; single degenerate bin")
        thresholds.append(tuple(uniq))
        categories.append(None)
    return BinningScheme(num_bin, tuple(thresholds), tuple(categories))


def discretize(dataset: Dataset, scheme: BinningScheme) -> DiscretizedDataset:
    """codes[i, j] = number of thresholds <= rows[i, j] (half-open bins,
    threshold value owned by the upper bin). Idempotent given the scheme."""
    if len(scheme.thresholds) != dataset.d:
        raise ValueError("scheme does not match dataset features")
    codes = np.empty((dataset.n, dataset.d), dtype=np.uint8)
    for meta in dataset.features:
        j = meta.column_index
        col = dataset.rows[:, j]
        if meta.kind == CATEGORICAL:
            if scheme.categories[j] != meta.categories:
                raise ValueError(f"scheme categories differ for feature {meta.name!r}")
            codes[:, j] = col.astype(np.uint8)
        else:
            ts = scheme.thresholds[j]
            if ts is None:
                raise ValueError(f"scheme marks numeric feature {meta.name!r} as categorical")
            if len(ts) + 1 > 255:
                raise ValueError("more than 255 bins are not supported")
            codes[:, j] = np.searchsorted(np.asarray(ts), col, side="right").astype(np.uint8)
    return DiscretizedDataset(dataset, codes, scheme)
