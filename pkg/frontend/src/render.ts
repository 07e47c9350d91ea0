/** DOM/SVG renderers for the five views.
 *
 * Renderers are thin: they draw the pure models from layout.ts/views.ts and
 * forward interactions (hover, select) to callbacks. Hovering a node
 * highlights its ancestor path and every path to its descendants; clicking
 * assigns the next circled number and feeds the comparison view.
 */

import { layoutFeatureAlignedTree, type AlignedLayout } from "./layout.js";
import { classColor, displayNumber, type ExplorerState } from "./state.js";
import type { HierarchyJson, HierNodeJson } from "./types.js";
import {
  conditionText, hierarchicalListModel, pathClosure, textListModel,
} from "./views.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ViewCallbacks {
  onHoverNode: (nodeId: number | null) => void;
  onSelectNode: (nodeId: number) => void;
  onHoverComparisonRule: (ruleId: number | null) => void;
}

function svg<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

function nodeById(h: HierarchyJson): Map<number, HierNodeJson> {
  return new Map(h.nodes.map((n) => [n.id, n]));
}

function ancestorsOf(h: HierarchyJson, id: number): Set<number> {
  const byId = nodeById(h);
  const out = new Set<number>();
  let cur = byId.get(id);
  while (cur && cur.parent !== null) {
    out.add(cur.id);
    cur = byId.get(cur.parent);
  }
  return out;
}

function descendantsOf(h: HierarchyJson, id: number): Set<number> {
  const byId = nodeById(h);
  const out = new Set<number>();
  const stack = [id];
  while (stack.length) {
    const cur = byId.get(stack.pop()!)!;
    for (const child of cur.children) {
      out.add(child);
      stack.push(child);
    }
  }
  return out;
}

function drawGlyph(
  group: SVGGElement, x: number, y: number, size: number,
  segments: { classIndex: number; x: number; width: number; errorWidth: number }[],
): void {
  const left = x - size / 2;
  const top = y - size / 2;
  for (const seg of segments) {
    group.appendChild(svg("rect", {
      x: left + seg.x, y: top, width: Math.max(0, seg.width), height: size,
      fill: classColor(seg.classIndex),
    }));
    if (seg.errorWidth > 0) {
      group.appendChild(svg("rect", {
        x: left + seg.x + seg.width - seg.errorWidth, y: top,
        width: seg.errorWidth, height: size,
        fill: "#1d1d1d", opacity: 0.45,
      }));
    }
  }
  group.appendChild(svg("rect", {
    x: left, y: top, width: size, height: size,
    fill: "none", stroke: "#333", "stroke-width": 1,
  }));
}

export function renderAlignedTree(
  container: HTMLElement, state: ExplorerState, cb: ViewCallbacks,
): AlignedLayout | null {
  container.replaceChildren();
  const generated = state.generated;
  if (!generated) return null;
  const hierarchy = generated.hierarchy;
  const visible = pathClosure(hierarchy, new Set(state.filteredIds));
  const layout = layoutFeatureAlignedTree(hierarchy, visible);
  const pad = 24;
  const header = 26;
  const el = svg("svg", {
    width: layout.width + 2 * pad,
    height: layout.height + header + 2 * pad,
    class: "aligned-tree",
  });

  // column headers and guides
  for (const col of layout.columns) {
    const label = svg("text", {
      x: pad + col.x, y: pad, class: "column-label", "text-anchor": "middle",
    });
    label.textContent = col.featureName;
    el.appendChild(label);
    el.appendChild(svg("line", {
      x1: pad + col.x - col.width / 2, y1: pad + 8,
      x2: pad + col.x + col.width / 2, y2: pad + 8,
      stroke: "#bbb",
    }));
  }

  const hovered = state.hoveredNode;
  const highlight = new Set<number>();
  if (hovered !== null) {
    highlight.add(hovered);
    for (const a of ancestorsOf(hierarchy, hovered)) highlight.add(a);
    for (const d of descendantsOf(hierarchy, hovered)) highlight.add(d);
  }

  const pos = new Map(layout.nodes.map((n) => [n.id, n]));
  const rootY = pad + header;
  for (const edge of layout.edges) {
    const from = pos.get(edge.from);
    const to = pos.get(edge.to)!;
    const x1 = from ? pad + from.x : pad + layout.rootAnchor.x;
    const y1 = from ? rootY + from.y + from.size / 2 : rootY - 6;
    const lit = highlight.has(edge.to) &&
      (edge.from === state.generated!.hierarchy.root || highlight.has(edge.from) ||
       hovered === edge.from);
    el.appendChild(svg("line", {
      x1, y1, x2: pad + to.x, y2: rootY + to.y - to.size / 2,
      stroke: lit ? "#e15759" : "#999",
      "stroke-width": lit ? 2.5 : 1,
      class: "tree-edge",
    }));
  }

  for (const node of layout.nodes) {
    const g = svg("g", { class: "tree-node", "data-node": node.id });
    drawGlyph(g as SVGGElement, pad + node.x, rootY + node.y, node.size, node.segments);
    if (hovered === node.id) {
      g.appendChild(svg("rect", {
        x: pad + node.x - node.size / 2 - 3, y: rootY + node.y - node.size / 2 - 3,
        width: node.size + 6, height: node.size + 6,
        fill: "none", stroke: "#e15759", "stroke-width": 2,
      }));
    }
    if (node.ruleId !== null) {
      const num = displayNumber(state, node.ruleId);
      if (num !== null) {
        g.appendChild(svg("circle", {
          cx: pad + node.x + node.size / 2 + 9, cy: rootY + node.y - node.size / 2,
          r: 8, fill: "#fff", stroke: "#333",
        }));
        const t = svg("text", {
          x: pad + node.x + node.size / 2 + 9, y: rootY + node.y - node.size / 2 + 4,
          "text-anchor": "middle", class: "selection-number",
        });
        t.textContent = String(num);
        g.appendChild(t);
      }
    }
    g.addEventListener("mouseenter", () => cb.onHoverNode(node.id));
    g.addEventListener("mouseleave", () => cb.onHoverNode(null));
    g.addEventListener("click", () => cb.onSelectNode(node.id));
    el.appendChild(g);
  }

  container.appendChild(el);
  return layout;
}

function barSvg(bar: { widthFrac: number; segments: { classIndex: number; x: number; width: number; errorWidth: number }[] },
                maxWidth = 124, height = 12): SVGSVGElement {
  const el = svg("svg", { width: maxWidth, height, class: "rule-bar" });
  for (const seg of bar.segments) {
    el.appendChild(svg("rect", {
      x: seg.x, y: 0, width: Math.max(0, seg.width), height,
      fill: classColor(seg.classIndex),
    }));
    if (seg.errorWidth > 0) {
      el.appendChild(svg("rect", {
        x: seg.x + seg.width - seg.errorWidth, y: 0, width: seg.errorWidth, height,
        fill: "#1d1d1d", opacity: 0.45,
      }));
    }
  }
  el.appendChild(svg("rect", {
    x: 0, y: 0, width: bar.widthFrac, height, fill: "none", stroke: "#555",
  }));
  return el;
}

export function renderTextList(
  container: HTMLElement, state: ExplorerState, cb: ViewCallbacks,
): void {
  container.replaceChildren();
  if (!state.generated) return;
  const rows = textListModel(state.rules, state.filteredIds, state.nInstances);
  const terminusByRule = new Map<number, number>();
  for (const n of state.generated.hierarchy.nodes) {
    if (n.rule_id !== null) terminusByRule.set(n.rule_id, n.id);
  }
  for (const row of rows) {
    const div = document.createElement("div");
    div.className = "rule-row";
    const num = displayNumber(state, row.ruleId);
    const label = document.createElement("span");
    label.className = "rule-num";
    label.textContent = num !== null ? `(${num})` : "";
    const text = document.createElement("span");
    text.className = "rule-text";
    text.textContent = row.text;
    div.append(label, barSvg(row.bar), text);
    const nodeId = terminusByRule.get(row.ruleId);
    if (nodeId !== undefined) {
      div.addEventListener("mouseenter", () => cb.onHoverNode(nodeId));
      div.addEventListener("mouseleave", () => cb.onHoverNode(null));
      div.addEventListener("click", () => cb.onSelectNode(nodeId));
    }
    container.appendChild(div);
  }
}

export function renderHierList(
  container: HTMLElement, state: ExplorerState, cb: ViewCallbacks,
): void {
  container.replaceChildren();
  if (!state.generated) return;
  const rows = hierarchicalListModel(
    state.generated.hierarchy, state.filteredIds, state.nInstances);
  for (const row of rows) {
    const div = document.createElement("div");
    div.className = "rule-row hier-row";
    div.style.paddingLeft = `${(row.depth - 1) * 26}px`;
    const num = row.ruleId !== null ? displayNumber(state, row.ruleId) : null;
    const label = document.createElement("span");
    label.className = "rule-num";
    label.textContent = num !== null ? `(${num})` : "";
    const text = document.createElement("span");
    text.className = "rule-text";
    text.textContent = (row.ruleId !== null ? "THEN: " : "") + row.conditionText;
    div.append(label);
    if (row.bar) div.append(barSvg(row.bar));
    div.append(text);
    div.addEventListener("mouseenter", () => cb.onHoverNode(row.nodeId));
    div.addEventListener("mouseleave", () => cb.onHoverNode(null));
    div.addEventListener("click", () => cb.onSelectNode(row.nodeId));
    container.appendChild(div);
  }
}

export function renderComparison(
  container: HTMLElement, state: ExplorerState,
  overlapCounts: Map<number, number[]> | null,
  hoveredRule: number | null, cb: ViewCallbacks,
): void {
  container.replaceChildren();
  if (!state.generated) return;
  const byId = new Map(state.rules.map((r) => [r.rule_id, r]));
  const maxCount = Math.max(1, ...state.selectedRules.map(
    (id) => byId.get(id)?.metrics.coverage_count ?? 0));
  state.selectedRules.forEach((ruleId, i) => {
    const rule = byId.get(ruleId);
    if (!rule) return;
    const row = document.createElement("div");
    row.className = "compare-row";
    const label = document.createElement("span");
    label.className = "rule-num";
    label.textContent = `(${i + 1})`;
    // hovering one bar re-renders the others as overlap with it
    const counts = hoveredRule !== null && hoveredRule !== ruleId && overlapCounts
      ? overlapCounts.get(ruleId) ?? rule.per_class_count.map(() => 0)
      : rule.per_class_count;
    const total = counts.reduce((a, b) => a + b, 0);
    const width = 180 * (total / maxCount);
    const bar = svg("svg", { width: 184, height: 14 });
    let x = 0;
    counts.forEach((count, c) => {
      const w = total > 0 ? width * (count / total) : 0;
      bar.appendChild(svg("rect", { x, y: 0, width: w, height: 14, fill: classColor(c) }));
      x += w;
    });
    const text = document.createElement("span");
    text.className = "compare-count";
    text.textContent = `${total}`;
    row.append(label, bar, text);
    row.addEventListener("mouseenter", () => cb.onHoverComparisonRule(ruleId));
    row.addEventListener("mouseleave", () => cb.onHoverComparisonRule(null));
    container.appendChild(row);
  });
}

export function renderDetail(
  container: HTMLElement, state: ExplorerState,
  detail: { text: string; stats: { cover_count: number; per_class_count: number[]; per_class_error_count: number[] } } | null,
): void {
  container.replaceChildren();
  if (!detail) {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "Hover a node or rule to see its description.";
    container.appendChild(hint);
    return;
  }
  const text = document.createElement("p");
  text.className = "detail-text";
  text.textContent = detail.text;
  container.appendChild(text);
  const list = document.createElement("ul");
  detail.stats.per_class_count.forEach((count, c) => {
    const li = document.createElement("li");
    const name = state.classNames[c] ?? String(c);
    const errors = detail.stats.per_class_error_count[c] ?? 0;
    li.textContent = `${name}: ${count} covered, ${errors} model errors`;
    const dot = document.createElement("span");
    dot.className = "class-dot";
    dot.style.background = classColor(c);
    li.prepend(dot);
    list.appendChild(li);
  });
  container.appendChild(list);
  const total = document.createElement("p");
  total.className = "detail-total";
  total.textContent = `covers ${detail.stats.cover_count} instances`;
  container.appendChild(total);
}

export { conditionText };
