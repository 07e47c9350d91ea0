/** JSON shapes served by the rule-generation service. */

export interface ConditionJson {
  feature: number;
  feature_name: string;
  bin_lo: number;
  bin_hi: number;
  order: number;
  bin_labels: string[];
  raw_range: string;
}

export interface RuleMetricsJson {
  fidelity: number;
  coverage_count: number;
  coverage_frac: number;
  length: number;
}

export interface RuleJson {
  rule_id: number;
  conditions: ConditionJson[];
  consequent: number;
  consequent_name: string;
  metrics: RuleMetricsJson;
  per_class_count: number[];
  text: string;
}

export interface NodeStatsJson {
  cover_count: number;
  per_class_count: number[];
  per_class_error_count: number[];
  per_true_class_count: number[];
}

export interface HierNodeJson {
  id: number;
  parent: number | null;
  depth: number;
  children: number[];
  rule_id: number | null;
  condition: ConditionJson | null;
  stats?: NodeStatsJson;
}

export interface HierarchyJson {
  root: number;
  max_depth: number;
  nodes: HierNodeJson[];
  class_names?: string[];
}

export interface ConstraintsJson {
  min_fidelity: number;
  min_coverage: number;
  max_num_condition: number;
  num_bin: number;
}

export interface GeneratePayload {
  constraints: ConstraintsJson;
  seed: number;
  class_names: string[];
  n_instances: number;
  pool_size: number;
  rule_set: {
    rules: RuleJson[];
    set_coverage: number;
    number_of_rules: number;
  };
  hierarchy: HierarchyJson;
}

export interface SessionInfo {
  session_id: string;
  fingerprint: string;
  n_instances: number;
  n_features: number;
  class_names: string[];
  features: string[];
}

/** Filter spec in the service's query encoding. */
export interface FilterSpecJson {
  required_features?: (string | number)[];
  feature_values?: Record<string, number[]>;
  predictions?: (string | number)[];
}

export interface OverlapPayload {
  anchor: number;
  counts: Record<string, number[]>;
}
