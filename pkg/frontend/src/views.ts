/** Pure view models for the three rule-logic views.
 *
 * All three are driven by one filtered rule-id set, so whatever the filter,
 * they display exactly the same rules: the text list one row per rule, the
 * hierarchical list with shared prefixes rendered once, and the aligned tree
 * the nodes on the paths to the filtered rules' termini.
 */

import { glyphSegments, type GlyphSegment } from "./layout.js";
import type { HierarchyJson, HierNodeJson, RuleJson } from "./types.js";

export interface RuleBar {
  widthFrac: number;           // coverage bar relative to the dataset
  segments: GlyphSegment[];    // label distribution with error shading
}

export interface TextListRow {
  ruleId: number;
  text: string;
  bar: RuleBar;
}

export function textListModel(
  rules: RuleJson[],
  filteredIds: number[],
  nInstances: number,
  barWidth = 120,
): TextListRow[] {
  const byId = new Map(rules.map((r) => [r.rule_id, r]));
  return filteredIds
    .filter((id) => byId.has(id))
    .map((id) => {
      const rule = byId.get(id)!;
      const width = barWidth * (rule.metrics.coverage_count / Math.max(1, nInstances));
      const errors = rule.per_class_count.map((count, c) =>
        c === rule.consequent ? 0 : count,
      );
      // shading on the rule bar marks instances whose model prediction
      // disagrees with the rule's consequent
      return {
        ruleId: id,
        text: rule.text,
        bar: { widthFrac: width, segments: glyphSegments(width, rule.per_class_count, errors) },
      };
    });
}

export function textListRuleIds(rows: TextListRow[]): number[] {
  return rows.map((r) => r.ruleId);
}

// ---------------------------------------------------------------------------

export interface HierListRow {
  nodeId: number;
  depth: number;              // indentation level
  conditionText: string;
  ruleId: number | null;      // set on rows that terminate a displayed rule
  bar: RuleBar | null;        // glyph bar for the node's subgroup
}

function nodeIndex(h: HierarchyJson): Map<number, HierNodeJson> {
  return new Map(h.nodes.map((n) => [n.id, n]));
}

/** Node ids lying on a root path of at least one filtered rule. */
export function pathClosure(h: HierarchyJson, filteredIds: Set<number>): Set<number> {
  const byId = nodeIndex(h);
  const keep = new Set<number>();
  for (const n of h.nodes) {
    if (n.rule_id === null || !filteredIds.has(n.rule_id)) continue;
    let cur: HierNodeJson | undefined = n;
    while (cur && cur.parent !== null) {
      keep.add(cur.id);
      cur = byId.get(cur.parent);
    }
  }
  return keep;
}

export function conditionText(node: HierNodeJson): string {
  const c = node.condition;
  if (!c) return "(all instances)";
  const label = c.bin_lo === c.bin_hi
    ? c.bin_labels[0]
    : `${c.bin_labels[0]}..${c.bin_labels[c.bin_labels.length - 1]}`;
  return `${c.feature_name} is ${label} ${c.raw_range}`;
}

export function hierarchicalListModel(
  hierarchy: HierarchyJson,
  filteredIds: number[],
  nInstances: number,
  barWidth = 120,
): HierListRow[] {
  const wanted = new Set(filteredIds);
  const keep = pathClosure(hierarchy, wanted);
  const byId = nodeIndex(hierarchy);
  const rows: HierListRow[] = [];
  const walk = (id: number) => {
    const node = byId.get(id)!;
    if (node.condition !== null) {
      const stats = node.stats;
      const displayedRule =
        node.rule_id !== null && wanted.has(node.rule_id) ? node.rule_id : null;
      rows.push({
        nodeId: node.id,
        depth: node.depth,
        conditionText: conditionText(node),
        ruleId: displayedRule,
        bar: stats
          ? {
              widthFrac: barWidth * (stats.cover_count / Math.max(1, nInstances)),
              segments: glyphSegments(
                barWidth * (stats.cover_count / Math.max(1, nInstances)),
                stats.per_class_count,
                stats.per_class_error_count,
              ),
            }
          : null,
      });
    }
    for (const child of node.children) {
      if (keep.has(child)) walk(child);
    }
  };
  walk(hierarchy.root);
  return rows;
}

export function hierListRuleIds(rows: HierListRow[]): number[] {
  return rows.filter((r) => r.ruleId !== null).map((r) => r.ruleId!) as number[];
}

// ---------------------------------------------------------------------------

/** Rule ids whose termini the aligned tree displays for a filter. */
export function alignedTreeRuleIds(hierarchy: HierarchyJson, filteredIds: number[]): number[] {
  const wanted = new Set(filteredIds);
  const keep = pathClosure(hierarchy, wanted);
  const out: number[] = [];
  for (const n of hierarchy.nodes) {
    if (n.rule_id !== null && wanted.has(n.rule_id) && keep.has(n.id)) {
      out.push(n.rule_id);
    }
  }
  return out.sort((a, b) => a - b);
}

// ---------------------------------------------------------------------------

/** Client-side filter mirror (used for optimistic UI only; the service's
 * response is authoritative and the tests compare against it). */
export interface ClientFilter {
  requiredFeatures: Set<number>;
  featureValues: Map<number, Set<number>>;
  predictions: Set<number>;
}

export function applyFilter(rules: RuleJson[], filter: ClientFilter): number[] {
  const out: number[] = [];
  for (const rule of rules) {
    const byFeature = new Map(rule.conditions.map((c) => [c.feature, c]));
    let ok = true;
    for (const f of filter.requiredFeatures) {
      if (!byFeature.has(f)) { ok = false; break; }
    }
    if (ok) {
      for (const [f, bins] of filter.featureValues) {
        const cond = byFeature.get(f);
        if (cond && ![...bins].some((b) => cond.bin_lo <= b && b <= cond.bin_hi)) {
          ok = false;
          break;
        }
      }
    }
    if (ok && filter.predictions.size > 0 && !filter.predictions.has(rule.consequent)) {
      ok = false;
    }
    if (ok) out.push(rule.rule_id);
  }
  return out;
}
