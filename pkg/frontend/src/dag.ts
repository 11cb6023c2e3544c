// Layered drawing of the conditioned circuit: root on top, leaves at the
// bottom, and/or glyphs on inner nodes. Pure layout + SVG string, no DOM.

import { DagJson, DagNode } from "./types.js";

export interface LayoutNode {
  node: DagNode;
  layer: number;
  x: number;
  y: number;
}

export interface DagLayout {
  nodes: LayoutNode[];
  edges: Array<[number, number]>; // parent id -> child id
  width: number;
  height: number;
}

const X_STEP = 86;
const Y_STEP = 78;
const MARGIN = 40;

/** Longest-path layering: a node sits one layer above its deepest child. */
export function layoutDag(dag: DagJson): DagLayout {
  const byId = new Map(dag.nodes.map((n) => [n.id, n]));
  const depth = new Map<number, number>();
  for (const node of dag.nodes) {
    // nodes arrive topologically ordered (children first)
    const kids = node.children ?? [];
    const d = kids.length ? Math.max(...kids.map((c) => depth.get(c)!)) + 1 : 0;
    depth.set(node.id, d);
  }
  const reachable = new Set<number>();
  const stack = [dag.root];
  while (stack.length) {
    const id = stack.pop()!;
    if (reachable.has(id)) continue;
    reachable.add(id);
    for (const c of byId.get(id)?.children ?? []) stack.push(c);
  }
  const maxDepth = Math.max(...[...reachable].map((id) => depth.get(id)!));
  const layers = new Map<number, number[]>();
  for (const id of [...reachable].sort((a, b) => a - b)) {
    const layer = maxDepth - depth.get(id)!; // root layer 0 at the top
    const bucket = layers.get(layer);
    if (bucket) bucket.push(id);
    else layers.set(layer, [id]);
  }
  const widest = Math.max(...[...layers.values()].map((l) => l.length));
  const nodes: LayoutNode[] = [];
  const edges: Array<[number, number]> = [];
  for (const [layer, ids] of [...layers.entries()].sort((a, b) => a[0] - b[0])) {
    const offset = ((widest - ids.length) * X_STEP) / 2;
    ids.forEach((id, i) => {
      nodes.push({
        node: byId.get(id)!,
        layer,
        x: MARGIN + offset + i * X_STEP,
        y: MARGIN + layer * Y_STEP,
      });
    });
  }
  for (const id of reachable) {
    for (const c of byId.get(id)?.children ?? []) edges.push([id, c]);
  }
  return {
    nodes,
    edges,
    width: 2 * MARGIN + (widest - 1) * X_STEP + X_STEP,
    height: 2 * MARGIN + maxDepth * Y_STEP + Y_STEP / 2,
  };
}

function glyph(node: DagNode): string {
  switch (node.kind) {
    case "and":
      return "∧"; // ∧
    case "or":
      return "∨"; // ∨
    case "true":
      return "⊤"; // ⊤
    case "false":
      return "⊥"; // ⊥
    case "literal":
      return (node.literal!.positive ? "" : "¬") + node.literal!.name;
  }
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderDag(dag: DagJson): string {
  const layout = layoutDag(dag);
  const pos = new Map(layout.nodes.map((ln) => [ln.node.id, ln]));
  const edges = layout.edges
    .map(([p, c]) => {
      const a = pos.get(p)!;
      const b = pos.get(c)!;
      return `<line x1="${a.x}" y1="${a.y + 16}" x2="${b.x}" y2="${b.y - 16}" />`;
    })
    .join("");
  const nodes = layout.nodes
    .map((ln) => {
      const inner = ln.node.kind === "literal" ? "leaf" : ln.node.kind;
      const label = esc(glyph(ln.node));
      return `
      <g class="dag-node dag-${inner}" transform="translate(${ln.x},${ln.y})">
        <rect x="-36" y="-16" width="72" height="32" rx="8"></rect>
        <text text-anchor="middle" dominant-baseline="central">${label}</text>
      </g>`;
    })
    .join("");
  return `<svg class="dag" viewBox="0 0 ${layout.width} ${layout.height}"
    width="${layout.width}" height="${layout.height}">
    <g class="dag-edges">${edges}</g>${nodes}
  </svg>`;
}

export function renderDagTooLarge(detail: string): string {
  return `<div class="empty-state">Theory too large to draw; likelihoods are
  still available. (${esc(detail)})</div>`;
}

/** Positive literal names drawn in the circuit; pruned branches vanish here. */
export function positiveLiterals(dag: DagJson): Set<string> {
  const names = new Set<string>();
  for (const node of dag.nodes) {
    if (node.kind === "literal" && node.literal!.positive) {
      names.add(node.literal!.name);
    }
  }
  return names;
}
