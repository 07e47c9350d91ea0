/** Shared explorer state: one filtered rule set drives every view. */

import type { FilterSpecJson, GeneratePayload, RuleJson } from "./types.js";

export type ViewKind = "aligned-tree" | "text-list" | "hierarchical-list";

export interface ExplorerState {
  sessionId: string | null;
  classNames: string[];
  featureNames: string[];
  nInstances: number;
  generated: GeneratePayload | null;
  rules: RuleJson[];
  filteredIds: number[];
  filter: FilterSpecJson;
  activeView: ViewKind;
  /** selection order is the circled display number (1-based) */
  selectedRules: number[];
  hoveredNode: number | null;
}

export function initialState(): ExplorerState {
  return {
    sessionId: null,
    classNames: [],
    featureNames: [],
    nInstances: 0,
    generated: null,
    rules: [],
    filteredIds: [],
    filter: {},
    activeView: "aligned-tree",
    selectedRules: [],
    hoveredNode: null,
  };
}

export function toggleSelection(state: ExplorerState, ruleId: number): void {
  const at = state.selectedRules.indexOf(ruleId);
  if (at >= 0) state.selectedRules.splice(at, 1);
  else state.selectedRules.push(ruleId);
}

export function displayNumber(state: ExplorerState, ruleId: number): number | null {
  const at = state.selectedRules.indexOf(ruleId);
  return at >= 0 ? at + 1 : null;
}

/** Categorical palette (7 classes max per the glyph design). */
export const CLASS_COLORS = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948",
];

export function classColor(c: number): string {
  return CLASS_COLORS[c % CLASS_COLORS.length];
}
