"""Rule-set analysis and experiment harnesses.

Covers the interactive backends (rule filtering, pairwise overlap counts)
and the two batch studies: a parameter sweep reporting how rule-set size,
set coverage, and response time react to each generation parameter, and a
head-to-head of forest-extracted rules against a single surrogate decision
tree under identical constraints.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

from . import kernels
from .cover import MinimalRuleSet, greedy_minimal_set, set_coverage
from .extraction import Constraints, extract_rules
from .forest import ForestConfig, train_forest, train_single_tree
from .pipeline import generate
from .tabular import Dataset, DiscretizedDataset, compute_binning, discretize

HSR = "HSR"
SDT = "SDT"


# ---------------------------------------------------------------------------
# Filtering and overlap (comparison-view backend)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterSpec:
    """All parts optional; an empty spec matches every rule."""
    required_features: frozenset[int] = frozenset()
    feature_values: tuple[tuple[int, frozenset[int]], ...] = ()
    predictions: frozenset[int] = frozenset()

    @classmethod
    def make(cls, required_features=(), feature_values=None, predictions=()) -> "FilterSpec":
        fv = tuple(sorted((int(f), frozenset(int(b) for b in bins))
                          for f, bins in (feature_values or {}).items()))
        return cls(frozenset(int(f) for f in required_features), fv,
                   frozenset(int(c) for c in predictions))


def filter_rules(rs: MinimalRuleSet, spec: FilterSpec) -> list[int]:
    """Rule ids (positions in the minimal set) matching the spec: required
    features all present, every constrained feature that appears in the rule
    intersecting its allowed bins, and the consequent among the allowed
    predictions."""
    out = []
    for rid, (rule, _) in enumerate(rs.rules):
        by_feature = {c.feature: c for c in rule.conditions}
        if any(f not in by_feature for f in spec.required_features):
            continue
        ok = True
        for f, allowed in spec.feature_values:
            cond = by_feature.get(f)
            if cond is not None and not any(cond.bin_lo <= b <= cond.bin_hi for b in allowed):
                ok = False
                break
        if not ok:
            continue
        if spec.predictions and rule.consequent not in spec.predictions:
            continue
        out.append(rid)
    return out


@dataclass
class OverlapReport:
    anchor: int
    counts: dict[int, list[int]]    # other rule id -> per-class overlap counts


def overlap(rs: MinimalRuleSet, anchor: int, others: list[int],
            data: DiscretizedDataset) -> OverlapReport:
    """Per class c: |cover(anchor) & cover(other) & {x : F(x) = c}|."""
    if not 0 <= anchor < len(rs.rules):
        raise KeyError(f"no rule {anchor}")
    packed = data.packed()
    a_cover = rs.rules[anchor][1].cover
    counts: dict[int, list[int]] = {}
    for other in others:
        if not 0 <= other < len(rs.rules):
            raise KeyError(f"no rule {other}")
        inter = a_cover & rs.rules[other][1].cover
        counts[other] = [int(x) for x in kernels.class_popcounts(inter, packed.pred_masks)]
    return OverlapReport(anchor, counts)


# ---------------------------------------------------------------------------
# Parameter sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    num_bin: tuple[int, ...] = (2, 3, 4, 5)
    min_coverage: tuple[int, ...] = (10, 20, 30, 40, 50)
    max_num_condition: tuple[int, ...] = (2, 3, 4, 5)
    min_fidelity: tuple[float, ...] = (0.70, 0.75, 0.80, 0.85, 0.90)

    def parameters(self) -> dict[str, tuple]:
        return {
            "num_bin": self.num_bin,
            "min_coverage": self.min_coverage,
            "max_num_condition": self.max_num_condition,
            "min_fidelity": self.min_fidelity,
        }

    def cells(self) -> list[Constraints]:
        return [
            Constraints(min_fidelity=mf, min_coverage=mc, max_num_condition=mx, num_bin=nb)
            for nb, mc, mx, mf in product(self.num_bin, self.min_coverage,
                                          self.max_num_condition, self.min_fidelity)
        ]


@dataclass
class SweepCell:
    constraints: Constraints
    number_of_rules: int = 0
    set_coverage: float = 0.0
    response_time: float = 0.0
    ok: bool = False


@dataclass
class SweepRow:
    parameter: str
    value: float
    n_runs: int
    n_missing: int
    mean_number_of_rules: float
    mean_set_coverage: float
    mean_response_time: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    cells: list[SweepCell] = field(default_factory=list)


def cell_seed(base_seed: int, constraints: Constraints) -> int:
    """Stable per-cell seed from the base seed and the cell coordinates."""
    text = (f"{base_seed}|{constraints.num_bin}|{constraints.min_coverage}"
            f"|{constraints.max_num_condition}|{constraints.min_fidelity:.6f}")
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


_WORKER_DATASET: Dataset | None = None


def _init_worker(dataset: Dataset) -> None:
    global _WORKER_DATASET
    _WORKER_DATASET = dataset


def _run_cell_on(dataset: Dataset, constraints: Constraints, config: ForestConfig,
                 base_seed: int, timeout: float | None) -> SweepCell:
    cell = SweepCell(constraints)
    deadline = None if timeout is None else time.perf_counter() + timeout
    seeded = replace(config, rng_seed=cell_seed(base_seed, constraints))
    try:
        result = generate(dataset, constraints, seeded, deadline=deadline)
    except TimeoutError:
        return cell
    cell.number_of_rules = result.number_of_rules
    cell.set_coverage = result.set_coverage
    cell.response_time = result.response_time
    cell.ok = True
    return cell


def _run_cell(args) -> SweepCell:
    constraints, config, base_seed, timeout = args
    return _run_cell_on(_WORKER_DATASET, constraints, config, base_seed, timeout)


def run_sweep(dataset: Dataset, grid: SweepGrid | None = None,
              forest_config: ForestConfig | None = None, *,
              base_seed: int = 0, workers: int = 0,
              cell_timeout: float | None = None) -> SweepResult:
    """Run the full pipeline over the cartesian grid, then average each
    parameter value over every combination of the other three parameters.
    Cells run on a process pool when workers > 1; a timed-out cell is
    recorded as missing and excluded from the means."""
    grid = grid or SweepGrid()
    config = forest_config or ForestConfig()
    cells = grid.cells()
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(dataset,)) as pool:
            results = list(pool.map(
                _run_cell, [(c, config, base_seed, cell_timeout) for c in cells]))
    else:
        results = [_run_cell_on(dataset, c, config, base_seed, cell_timeout) for c in cells]

    rows: list[SweepRow] = []
    for name, values in grid.parameters().items():
        for value in values:
            hits = [r for r in results if getattr(r.constraints, name) == value]
            done = [r for r in hits if r.ok]
            n = len(done)
            rows.append(SweepRow(
                parameter=name,
                value=float(value),
                n_runs=n,
                n_missing=len(hits) - n,
                mean_number_of_rules=(sum(r.number_of_rules for r in done) / n) if n else 0.0,
                mean_set_coverage=(sum(r.set_coverage for r in done) / n) if n else 0.0,
                mean_response_time=(sum(r.response_time for r in done) / n) if n else 0.0,
            ))
    return SweepResult(rows, results)


SWEEP_COLUMNS = ["parameter", "value", "n_runs", "n_missing",
                 "mean_number_of_rules", "mean_set_coverage", "mean_response_time_s"]


def sweep_table(result: SweepResult, delimiter: str = ",") -> str:
    lines = [delimiter.join(SWEEP_COLUMNS)]
    for r in result.rows:
        lines.append(delimiter.join([
            r.parameter, f"{r.value:g}", str(r.n_runs), str(r.n_missing),
            f"{r.mean_number_of_rules:.4f}", f"{r.mean_set_coverage:.6f}",
            f"{r.mean_response_time:.6f}",
        ]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Forest rules vs single-tree baseline
# ---------------------------------------------------------------------------

@dataclass
class ComparisonRow:
    max_num_condition: int
    method: str                  # HSR (forest) or SDT (single tree)
    set_coverage: float
    number_of_rules: int
    avg_num_conditions: float


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]

    def series(self, method: str, metric: str) -> list[float]:
        return [getattr(r, metric) for r in self.rows if r.method == method]


def compare_hsr_sdt(dataset: Dataset, max_length: int = 10,
                    forest_config: ForestConfig | None = None) -> ComparisonReport:
    """Fixed constraints (min_fidelity 0.85, min_coverage 5, num_bin 3);
    the rule-length cap sweeps 1..max_length. Both methods share the same
    extraction and greedy-cover procedure; only the tree source differs."""
    config = forest_config or ForestConfig()
    base = Constraints(min_fidelity=0.85, min_coverage=5, num_bin=3)
    scheme = compute_binning(dataset, base.num_bin)
    data = discretize(dataset, scheme)
    forest = train_forest(data, config)
    single = train_single_tree(data, config)

    rows: list[ComparisonRow] = []
    for length in range(1, max_length + 1):
        constraints = replace(base, max_num_condition=length)
        for method, source in ((HSR, forest), (SDT, single)):
            pool = extract_rules(source, data, constraints)
            minimal = greedy_minimal_set(pool)
            lengths = [m.length for _, m in minimal.rules]
            rows.append(ComparisonRow(
                max_num_condition=length,
                method=method,
                set_coverage=set_coverage(minimal, data),
                number_of_rules=len(minimal),
                avg_num_conditions=(sum(lengths) / len(lengths)) if lengths else 0.0,
            ))
    return ComparisonReport(rows)


COMPARISON_COLUMNS = ["max_num_condition", "method", "set_coverage",
                      "number_of_rules", "avg_num_conditions"]


def comparison_table(report: ComparisonReport, delimiter: str = ",") -> str:
    lines = [delimiter.join(COMPARISON_COLUMNS)]
    for r in report.rows:
        lines.append(delimiter.join([
            str(r.max_num_condition), r.method, f"{r.set_coverage:.6f}",
            str(r.number_of_rules), f"{r.avg_num_conditions:.4f}",
        ]))
    return "\n".join(lines) + "\n"
