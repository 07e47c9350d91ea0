"""End-to-end generation: binning -> forest -> extraction -> cover -> hierarchy.

One entry point shared by the CLI, the HTTP service, and the experiment
harnesses, with per-phase wall-clock timings and an optional cooperative
deadline. The reported response time covers binning through cover, matching
what an interactive parameter change costs (hierarchy construction is
negligible and rebuilt with it).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cover import MinimalRuleSet, greedy_minimal_set, set_coverage
from .extraction import Constraints, RulePool, extract_rules
from .forest import ForestConfig, SurrogateForest, train_forest
from .hierarchy import HsrTree, annotate_stats, build_hsr
from .serialize import dataset_fingerprint
from .tabular import Dataset, DiscretizedDataset, compute_binning, discretize


@dataclass
class GenerateResult:
    data: DiscretizedDataset
    forest: SurrogateForest
    pool: RulePool
    minimal: MinimalRuleSet
    hierarchy: HsrTree
    constraints: Constraints
    seed: int
    fingerprint: str
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def number_of_rules(self) -> int:
        return len(self.minimal)

    @property
    def set_coverage(self) -> float:
        return set_coverage(self.minimal, self.data)

    @property
    def response_time(self) -> float:
        return sum(self.timings.get(k, 0.0) for k in ("binning", "forest", "extraction", "cover"))


def generate(dataset: Dataset, constraints: Constraints | None = None,
             forest_config: ForestConfig | None = None, *,
             data: DiscretizedDataset | None = None,
             forest: SurrogateForest | None = None,
             deadline: float | None = None) -> GenerateResult:
    """Run the full pipeline. Prebuilt `data` (discretization) and `forest`
    are reused when supplied — the service's per-num_bin caches and the
    comparison harness rely on this. `deadline` is a perf_counter timestamp;
    exceeding it raises TimeoutError between phases (and between trees)."""
    constraints = constraints or Constraints()
    constraints.validate()
    forest_config = forest_config or ForestConfig()

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if data is None:
        scheme = compute_binning(dataset, constraints.num_bin)
        data = discretize(dataset, scheme)
    timings["binning"] = time.perf_counter() - t0

    def check(phase: str) -> None:
        if deadline is not None and time.perf_counter() > deadline:
            raise TimeoutError(f"generation exceeded its time budget during {phase}")

    check("binning")
    t0 = time.perf_counter()
    if forest is None:
        forest = train_forest(data, forest_config, deadline=deadline)
    timings["forest"] = time.perf_counter() - t0

    check("forest")
    t0 = time.perf_counter()
    pool = extract_rules(forest, data, constraints)
    pool.fingerprint = dataset_fingerprint(dataset)
    timings["extraction"] = time.perf_counter() - t0

    check("extraction")
    t0 = time.perf_counter()
    minimal = greedy_minimal_set(pool)
    timings["cover"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hierarchy = annotate_stats(build_hsr(minimal), data)
    timings["hierarchy"] = time.perf_counter() - t0

    return GenerateResult(
        data=data,
        forest=forest,
        pool=pool,
        minimal=minimal,
        hierarchy=hierarchy,
        constraints=constraints,
        seed=forest_config.rng_seed,
        fingerprint=pool.fingerprint,
        timings=timings,
    )
