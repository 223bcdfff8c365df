// SVG node-link rendering of a proof state. A pure projection: the same
// view, layout and selection always produce the same DOM.

import type { LayoutMap } from "./layout";
import { CANVAS_H, CANVAS_W, placeMissing } from "./layout";
import type { NodeView, SessionView } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface WorkspaceHandlers {
  onNodeClick(node: NodeView): void;
  onNodeDrag?(nodeId: number, x: number, y: number): void;
}

const FILL: Record<string, string> = {
  gray: "#c8c8c8",
  yellow: "#f4de7a",
  green: "#9fd89f",
};

function nodeFill(node: NodeView): string {
  if (node.kind === "hint" && !node.justified) return "#9ecbff";
  if (node.color && FILL[node.color]) return FILL[node.color];
  return "#d9c2ec";
}

function svg<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    el.setAttribute(k, String(v));
  }
  return el;
}

export function renderWorkspace(
  view: SessionView,
  layout: LayoutMap,
  selection: Set<number>,
  handlers: WorkspaceHandlers,
): SVGSVGElement {
  const nodes = view.nodes ?? [];
  placeMissing(nodes, layout);
  const root = svg("svg", {
    class: "workspace",
    viewBox: `0 0 ${CANVAS_W} ${CANVAS_H}`,
    width: CANVAS_W,
    height: CANVAS_H,
  });

  const defs = svg("defs");
  const marker = svg("marker", {
    id: "arrow",
    viewBox: "0 0 10 10",
    refX: 9,
    refY: 5,
    markerWidth: 7,
    markerHeight: 7,
    orient: "auto-start-reverse",
  });
  marker.appendChild(svg("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#555" }));
  defs.appendChild(marker);
  root.appendChild(defs);

  const byId = new Map(nodes.map((n) => [n.id, n]));
  for (const [parent, child] of view.edges ?? []) {
    const a = layout.get(parent);
    const b = layout.get(child);
    if (!a || !b || !byId.has(parent) || !byId.has(child)) continue;
    root.appendChild(
      svg("line", {
        class: "edge",
        "data-edge": `${parent}-${child}`,
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        stroke: "#555",
        "stroke-width": 1.5,
        "marker-end": "url(#arrow)",
      }),
    );
  }

  for (const node of nodes) {
    root.appendChild(renderNode(node, layout, selection, handlers));
  }
  return root;
}

function renderNode(
  node: NodeView,
  layout: LayoutMap,
  selection: Set<number>,
  handlers: WorkspaceHandlers,
): SVGGElement {
  const pos = layout.get(node.id)!;
  const selected = selection.has(node.id);
  const group = svg("g", {
    class: `node kind-${node.kind}${node.justified ? " justified" : " unjustified"}${selected ? " selected" : ""}`,
    "data-node-id": node.id,
    "data-statement": node.statement,
    transform: `translate(${pos.x} ${pos.y})`,
  });

  const width = Math.max(64, node.statement.length * 9 + 26);
  const shapeAttrs = {
    fill: nodeFill(node),
    stroke: selected ? "#1d4ed8" : "#444",
    "stroke-width": selected ? 3 : 1.5,
  };
  if (node.kind === "conclusion") {
    group.appendChild(
      svg("rect", { ...shapeAttrs, x: -width / 2, y: -22, width, height: 44, rx: 4 }),
    );
  } else {
    group.appendChild(svg("ellipse", { ...shapeAttrs, cx: 0, cy: 0, rx: width / 2, ry: 24 }));
  }

  if (node.kind === "hint" && !node.justified) {
    const goal = svg("text", { class: "goal-tag", x: 0, y: -30, "text-anchor": "middle" });
    goal.textContent = "Goal";
    group.appendChild(goal);
  }

  const text = svg("text", { x: 0, y: 5, "text-anchor": "middle", class: "statement" });
  text.textContent = node.statement;
  group.appendChild(text);

  if (!node.justified) {
    const q = svg("text", {
      class: "question-mark",
      x: width / 2 + 10,
      y: -14,
      "text-anchor": "middle",
    });
    q.textContent = "?";
    group.appendChild(q);
  } else if (node.label !== null) {
    const label = svg("text", { class: "node-label", x: 0, y: -32, "text-anchor": "middle" });
    label.textContent = node.rule ? `${node.label}: ${node.rule}` : `${node.label}`;
    group.appendChild(label);
  }

  group.addEventListener("click", () => handlers.onNodeClick(node));
  if (handlers.onNodeDrag) {
    attachDrag(group, node.id, layout, handlers.onNodeDrag);
  }
  return group;
}

function attachDrag(
  group: SVGGElement,
  nodeId: number,
  layout: LayoutMap,
  onDrag: (nodeId: number, x: number, y: number) => void,
): void {
  let dragging = false;
  let moved = false;
  group.addEventListener("pointerdown", (ev) => {
    dragging = true;
    moved = false;
    ev.preventDefault();
  });
  group.addEventListener("pointermove", (ev) => {
    if (!dragging) return;
    moved = true;
    const pos = layout.get(nodeId)!;
    onDrag(nodeId, pos.x + ev.movementX, pos.y + ev.movementY);
  });
  group.addEventListener("pointerup", () => {
    dragging = false;
    void moved;
  });
}
