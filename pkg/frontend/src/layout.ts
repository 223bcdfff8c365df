// Client-only node positions. Never logged, never sent to the server;
// dragging just edits this map.

import type { NodeView } from "./types";

export interface Point {
  x: number;
  y: number;
}

export type LayoutMap = Map<number, Point>;

export const CANVAS_W = 760;
export const CANVAS_H = 520;

/** Givens across the top, conclusion bottom center, the rest in rows. */
export function placeMissing(nodes: NodeView[], layout: LayoutMap): void {
  const givens = nodes.filter((n) => n.kind === "given");
  givens.forEach((n, i) => {
    if (!layout.has(n.id)) {
      layout.set(n.id, {
        x: ((i + 1) * CANVAS_W) / (givens.length + 1),
        y: 60,
      });
    }
  });
  const conclusion = nodes.find((n) => n.kind === "conclusion");
  if (conclusion && !layout.has(conclusion.id)) {
    layout.set(conclusion.id, { x: CANVAS_W / 2, y: CANVAS_H - 50 });
  }
  const middle = nodes.filter((n) => n.kind !== "given" && n.kind !== "conclusion");
  middle.forEach((n) => {
    if (layout.has(n.id)) return;
    const slot = layout.size;
    const col = slot % 4;
    const row = Math.floor(slot / 4) % 4;
    layout.set(n.id, {
      x: 120 + col * 170 + (row % 2) * 40,
      y: 150 + row * 85,
    });
  });
}
