/** Feature-aligned tree layout.
 *
 * Rows are tree depths (top to bottom); every feature owns one column, and
 * a node sits in the column of the condition added last on its path. Within
 * a column nodes are ordered by bin interval, low values leftmost. Columns
 * are ordered by the total number of instances covered by their nodes, so
 * heavier features appear first. All geometry is deterministic.
 */

import type { HierarchyJson, HierNodeJson } from "./types.js";

export interface GlyphSegment {
  classIndex: number;
  x: number;       // offset inside the glyph
  width: number;
  errorWidth: number;  // shaded sub-segment, anchored at the segment's right edge
}

export interface LayoutNode {
  id: number;
  row: number;             // = node depth
  column: number;          // column index of the condition's feature
  x: number;               // glyph center
  y: number;
  size: number;            // glyph width = height
  ruleId: number | null;
  segments: GlyphSegment[];
}

export interface LayoutEdge {
  from: number;  // parent node id (may be the root)
  to: number;
}

export interface ColumnInfo {
  feature: number;
  featureName: string;
  index: number;
  x: number;       // column center
  width: number;
  coverMass: number;
}

export interface AlignedLayout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  columns: ColumnInfo[];
  rootAnchor: { x: number; y: number };
  width: number;
  height: number;
  rowHeight: number;
}

export interface LayoutOptions {
  minSize: number;
  maxSize: number;
  slotWidth: number;
  rowHeight: number;
  columnGap: number;
}

export const DEFAULT_OPTIONS: LayoutOptions = {
  minSize: 14,
  maxSize: 44,
  slotWidth: 56,
  rowHeight: 96,
  columnGap: 28,
};

/** Monotone size scale: sqrt of cover count, mapped onto [minSize, maxSize]. */
export function sizeScale(counts: number[], opts: LayoutOptions): (c: number) => number {
  const lo = Math.sqrt(Math.max(0, Math.min(...counts)));
  const hi = Math.sqrt(Math.max(0, ...counts));
  return (c: number) => {
    if (hi <= lo) return (opts.minSize + opts.maxSize) / 2;
    const t = (Math.sqrt(Math.max(0, c)) - lo) / (hi - lo);
    return opts.minSize + t * (opts.maxSize - opts.minSize);
  };
}

/** Horizontal class segments of a glyph; widths are proportional to the
 * per-class counts and sum to the glyph size exactly (the last segment
 * absorbs rounding). Error sub-segments shade the model's mistakes. */
export function glyphSegments(size: number, perClass: number[], perError: number[]): GlyphSegment[] {
  const total = perClass.reduce((a, b) => a + b, 0);
  if (total <= 0) return [];
  const segments: GlyphSegment[] = [];
  let x = 0;
  for (let c = 0; c < perClass.length; c++) {
    const isLast = c === perClass.length - 1;
    const width = isLast
      ? Math.max(0, size - x)
      : (size * perClass[c]) / total;
    const errorWidth = perClass[c] > 0 ? (width * perError[c]) / perClass[c] : 0;
    segments.push({ classIndex: c, x, width, errorWidth });
    x += width;
  }
  return segments;
}

function conditionNodes(h: HierarchyJson): HierNodeJson[] {
  return h.nodes.filter((n) => n.condition !== null);
}

export function layoutFeatureAlignedTree(
  hierarchy: HierarchyJson,
  visible?: Set<number>,
  options?: Partial<LayoutOptions>,
): AlignedLayout {
  const opts = { ...DEFAULT_OPTIONS, ...options };
  const all = conditionNodes(hierarchy).filter(
    (n) => visible === undefined || visible.has(n.id),
  );

  // columns ordered by descending total coverage mass, then feature index
  const mass = new Map<number, number>();
  const names = new Map<number, string>();
  for (const n of all) {
    const f = n.condition!.feature;
    mass.set(f, (mass.get(f) ?? 0) + (n.stats?.cover_count ?? 0));
    names.set(f, n.condition!.feature_name);
  }
  const features = [...mass.keys()].sort(
    (a, b) => (mass.get(b)! - mass.get(a)!) || (a - b),
  );

  // within a column: low-to-high interval, then id for determinism
  const byFeature = new Map<number, HierNodeJson[]>();
  for (const n of all) {
    const f = n.condition!.feature;
    if (!byFeature.has(f)) byFeature.set(f, []);
    byFeature.get(f)!.push(n);
  }
  for (const nodes of byFeature.values()) {
    nodes.sort(
      (a, b) =>
        a.condition!.bin_lo - b.condition!.bin_lo ||
        a.condition!.bin_hi - b.condition!.bin_hi ||
        a.id - b.id,
    );
  }

  const columns: ColumnInfo[] = [];
  let xCursor = opts.columnGap;
  for (let i = 0; i < features.length; i++) {
    const f = features[i];
    const slots = byFeature.get(f)!.length;
    const width = Math.max(1, slots) * opts.slotWidth;
    columns.push({
      feature: f,
      featureName: names.get(f) ?? `f${f}`,
      index: i,
      x: xCursor + width / 2,
      width,
      coverMass: mass.get(f)!,
    });
    xCursor += width + opts.columnGap;
  }
  const totalWidth = Math.max(xCursor, 2 * opts.columnGap + opts.slotWidth);

  const scale = sizeScale(all.map((n) => n.stats?.cover_count ?? 0), opts);
  const columnByFeature = new Map(columns.map((c) => [c.feature, c]));
  const nodes: LayoutNode[] = [];
  for (const [f, colNodes] of byFeature) {
    const col = columnByFeature.get(f)!;
    const left = col.x - col.width / 2;
    colNodes.forEach((n, slot) => {
      const stats = n.stats ?? {
        cover_count: 0, per_class_count: [], per_class_error_count: [],
        per_true_class_count: [],
      };
      const size = scale(stats.cover_count);
      nodes.push({
        id: n.id,
        row: n.depth,
        column: col.index,
        x: left + (slot + 0.5) * opts.slotWidth,
        y: n.depth * opts.rowHeight,
        size,
        ruleId: n.rule_id,
        segments: glyphSegments(size, stats.per_class_count, stats.per_class_error_count),
      });
    });
  }
  nodes.sort((a, b) => a.id - b.id);

  const present = new Set(nodes.map((n) => n.id));
  const edges: LayoutEdge[] = [];
  for (const n of all) {
    if (n.parent !== null && (present.has(n.parent) || n.parent === hierarchy.root)) {
      edges.push({ from: n.parent, to: n.id });
    }
  }

  const maxDepth = all.reduce((m, n) => Math.max(m, n.depth), 0);
  return {
    nodes,
    edges,
    columns,
    rootAnchor: { x: totalWidth / 2, y: 0 },
    width: totalWidth,
    height: (maxDepth + 1) * opts.rowHeight,
    rowHeight: opts.rowHeight,
  };
}
