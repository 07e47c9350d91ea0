"""Surrogate rule sets for black-box classifiers.

Extracts a small, high-fidelity, hierarchically organized rule set that
describes a classifier's decision space from its predictions alone, and
serves it to an interactive explorer.
"""

from .analysis import (ComparisonReport, FilterSpec, OverlapReport, SweepGrid,
                       SweepResult, compare_hsr_sdt, filter_rules, overlap, run_sweep)
from .cover import CoverUniverse, MinimalRuleSet, greedy_minimal_set, set_coverage
from .extraction import (Condition, Constraints, Rule, RuleMetrics, RulePool,
                         evaluate_rule, extract_rules, rule_text)
from .forest import (ForestConfig, SplitNode, SurrogateForest, SurrogateTree,
                     train_forest, train_single_tree, tree_predict)
from .hierarchy import HierNode, HsrTree, NodeStats, annotate_stats, build_hsr, node_rule
from .labeler import demo_labels, evaluate_expression
from .pipeline import GenerateResult, generate
from .tabular import (BinningScheme, Dataset, DiscretizedDataset, FeatureMeta,
                      IngestError, compute_binning, discretize, load_dataset)

__version__ = "0.1.0"
