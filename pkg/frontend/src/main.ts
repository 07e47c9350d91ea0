/** Explorer wiring: session setup, generation, and the five linked views. */

import { ApiClient } from "./api.js";
import {
  buildFilterPanel, buildParameterForm, DEFAULT_DRAFT, type ConstraintsDraft,
} from "./controls.js";
import {
  renderAlignedTree, renderComparison, renderDetail, renderHierList,
  renderTextList, type ViewCallbacks,
} from "./render.js";
import { initialState, toggleSelection, type ViewKind } from "./state.js";
import type { FilterSpecJson } from "./types.js";

const api = new ApiClient("");
const state = initialState();
let draft: ConstraintsDraft = { ...DEFAULT_DRAFT };
let generating = false;           // at most one in-flight generate
let overlapCounts: Map<number, number[]> | null = null;
let hoveredComparisonRule: number | null = null;
let detail: Parameters<typeof renderDetail>[2] = null;

const $ = (id: string) => document.getElementById(id)!;

function binLabelsFor(featureName: string): string[] {
  const generated = state.generated;
  if (!generated) return [];
  for (const node of generated.hierarchy.nodes) {
    if (node.condition?.feature_name === featureName) break;
  }
  const nb = generated.constraints.num_bin;
  const canned: Record<number, string[]> = {
    2: ["low", "high"],
    3: ["low", "medium", "high"],
    4: ["low", "medium-low", "medium-high", "high"],
    5: ["low", "medium-low", "medium", "medium-high", "high"],
  };
  return canned[nb] ?? Array.from({ length: nb }, (_, i) => `bin ${i}`);
}

const callbacks: ViewCallbacks = {
  onHoverNode(nodeId) {
    state.hoveredNode = nodeId;
    void updateDetail(nodeId);
    renderLogicViews();
  },
  onSelectNode(nodeId) {
    const node = state.generated?.hierarchy.nodes.find((n) => n.id === nodeId);
    if (!node || node.rule_id === null) return;
    toggleSelection(state, node.rule_id);
    overlapCounts = null;
    renderAll();
  },
  onHoverComparisonRule(ruleId) {
    hoveredComparisonRule = ruleId;
    if (ruleId !== null) void refreshOverlap(ruleId);
    else renderComparisonView();
  },
};

async function updateDetail(nodeId: number | null): Promise<void> {
  if (nodeId === null || !state.sessionId) {
    detail = null;
    renderDetail($("detail"), state, detail);
    return;
  }
  try {
    detail = await api.nodeDetail(state.sessionId, nodeId);
  } catch {
    detail = null;
  }
  renderDetail($("detail"), state, detail);
}

async function refreshOverlap(anchor: number): Promise<void> {
  if (!state.sessionId) return;
  const others = state.selectedRules.filter((id) => id !== anchor);
  try {
    const payload = await api.overlap(state.sessionId, anchor, others);
    overlapCounts = new Map(
      Object.entries(payload.counts).map(([k, v]) => [Number(k), v]));
  } catch {
    overlapCounts = null;
  }
  renderComparisonView();
}

function renderComparisonView(): void {
  renderComparison($("comparison"), state, overlapCounts, hoveredComparisonRule, callbacks);
}

function renderLogicViews(): void {
  const view = state.activeView;
  $("aligned-tree").style.display = view === "aligned-tree" ? "block" : "none";
  $("text-list").style.display = view === "text-list" ? "block" : "none";
  $("hier-list").style.display = view === "hierarchical-list" ? "block" : "none";
  if (view === "aligned-tree") renderAlignedTree($("aligned-tree"), state, callbacks);
  if (view === "text-list") renderTextList($("text-list"), state, callbacks);
  if (view === "hierarchical-list") renderHierList($("hier-list"), state, callbacks);
}

function renderAll(): void {
  renderLogicViews();
  renderComparisonView();
  renderDetail($("detail"), state, detail);
  const summary = $("summary");
  if (state.generated) {
    const rs = state.generated.rule_set;
    summary.textContent =
      `${rs.number_of_rules} rules, set coverage ` +
      `${(rs.set_coverage * 100).toFixed(1)}%, showing ${state.filteredIds.length}`;
  } else {
    summary.textContent = "";
  }
}

async function applyFilter(spec: FilterSpecJson): Promise<void> {
  state.filter = spec;
  if (!state.sessionId || !state.generated) return;
  const resp = await api.rules(state.sessionId, spec);
  state.filteredIds = resp.rule_ids;
  renderAll();
}

async function regenerate(next: ConstraintsDraft): Promise<void> {
  if (!state.sessionId || generating) return;
  generating = true;
  $("generate-status").textContent = "generating...";
  try {
    const { payload, elapsedSeconds } = await api.generate(
      state.sessionId,
      {
        min_fidelity: next.min_fidelity,
        min_coverage: next.min_coverage,
        max_num_condition: next.max_num_condition,
        num_bin: next.num_bin,
      },
      next.seed,
    );
    draft = next;
    // replace all views atomically on success
    state.generated = payload;
    state.rules = payload.rule_set.rules;
    state.filteredIds = payload.rule_set.rules.map((r) => r.rule_id);
    state.classNames = payload.class_names;
    state.nInstances = payload.n_instances;
    state.selectedRules = [];
    state.hoveredNode = null;
    overlapCounts = null;
    detail = null;
    $("generate-status").textContent =
      elapsedSeconds !== null ? `done in ${elapsedSeconds.toFixed(2)}s` : "done";
    buildFilterPanel($("filters"), state.featureNames, state.classNames,
                     payload.constraints.num_bin, binLabelsFor,
                     (spec) => void applyFilter(spec));
    renderAll();
  } catch (err) {
    $("generate-status").textContent = String(err);
  } finally {
    generating = false;
  }
}

async function startSession(): Promise<void> {
  const dataPath = ($("data-path") as HTMLInputElement).value.trim();
  const predsPath = ($("preds-path") as HTMLInputElement).value.trim();
  const labelCol = ($("label-col") as HTMLInputElement).value.trim();
  if (!dataPath || !predsPath || !labelCol) {
    $("session-status").textContent = "fill in all three fields";
    return;
  }
  try {
    const info = await api.createSession({
      data_path: dataPath, predictions_path: predsPath, label_column: labelCol,
    });
    state.sessionId = info.session_id;
    state.classNames = info.class_names;
    state.featureNames = info.features;
    state.nInstances = info.n_instances;
    $("session-status").textContent =
      `session ${info.session_id.slice(0, 8)}: ${info.n_instances} rows, ` +
      `${info.n_features} features`;
    await regenerate(draft);
  } catch (err) {
    $("session-status").textContent = String(err);
  }
}

function init(): void {
  buildParameterForm($("parameters"), draft, (d) => void regenerate(d));
  $("open-session").addEventListener("click", () => void startSession());
  $("gear").addEventListener("click", () => {
    $("param-popup").classList.toggle("open");
  });
  for (const kind of ["aligned-tree", "text-list", "hierarchical-list"] as ViewKind[]) {
    $(`tab-${kind}`).addEventListener("click", () => {
      state.activeView = kind;
      document.querySelectorAll(".tab").forEach((el) => el.classList.remove("active"));
      $(`tab-${kind}`).classList.add("active");
      renderLogicViews();
    });
  }
  renderAll();
}

init();
