// SVG board rendering: labeled nodes, child edges, pebble badges numbered
// in placement order, set pebbles as colored outlines.

import { layoutBoard } from "./layout.js";
import type { BoardView, SessionView, Side } from "./types.js";

const RADIUS = 16;
const STEP_X = 70;
const STEP_Y = band();

function band(): number {
  return 64;
}

const SET_COLORS = ["#e6552c", "#2c7fe6", "#23a455", "#a23de0", "#d4a017"];

export interface RenderOptions {
  onNodeClick: (side: Side, id: number) => void;
  selected: Set<number>;
  selectionSide: Side | null;
  highlight: { side: Side; id: number } | null;
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function renderBoard(
  container: HTMLElement,
  side: Side,
  board: BoardView,
  view: SessionView,
  options: RenderOptions,
): void {
  container.innerHTML = "";
  const positions = layoutBoard(board);
  const width = Math.max(...positions.map((p) => p.x)) * STEP_X + 2 * RADIUS + 40;
  const height = Math.max(...positions.map((p) => p.y)) * STEP_Y + 2 * RADIUS + 56;
  const svg = svgEl("svg", { width, height, class: "board" });
  const cx = (p: { x: number }) => p.x * STEP_X + RADIUS + 20;
  const cy = (p: { y: number }) => p.y * STEP_Y + RADIUS + 16;
  const at = new Map(positions.map((p) => [p.id, p]));

  for (const [a, b] of board.child_edges) {
    const pa = at.get(a)!;
    const pb = at.get(b)!;
    svg.appendChild(svgEl("line", {
      x1: cx(pa), y1: cy(pa), x2: cx(pb), y2: cy(pb), class: "edge",
    }));
  }

  const pebblesHere = view.pebbles.map((pair, i) => ({
    round: i + 1,
    elem: side === "L" ? pair[0] : pair[1],
  }));
  const setsHere = view.set_pebbles.map((pair, i) => ({
    index: i,
    elems: new Set(side === "L" ? pair[0] : pair[1]),
  }));

  for (const pos of positions) {
    const node = board.nodes[pos.id];
    const group = svgEl("g", { class: "node", "data-id": pos.id });
    setsHere.forEach((entry, rank) => {
      if (entry.elems.has(pos.id)) {
        group.appendChild(svgEl("circle", {
          cx: cx(pos), cy: cy(pos), r: RADIUS + 4 + 3 * rank,
          class: "set-outline", stroke: SET_COLORS[entry.index % SET_COLORS.length],
        }));
      }
    });
    const selected = options.selectionSide === side && options.selected.has(pos.id);
    const highlighted = options.highlight?.side === side && options.highlight.id === pos.id;
    const circle = svgEl("circle", {
      cx: cx(pos), cy: cy(pos), r: RADIUS,
      class: "node-circle" + (selected ? " selected" : "") + (highlighted ? " hint" : ""),
    });
    circle.addEventListener("click", () => options.onNodeClick(side, pos.id));
    group.appendChild(circle);
    const idText = svgEl("text", {
      x: cx(pos), y: cy(pos) + 4, class: "node-id", "text-anchor": "middle",
    });
    idText.textContent = String(pos.id);
    idText.addEventListener("click", () => options.onNodeClick(side, pos.id));
    group.appendChild(idText);
    if (node.labels.length) {
      const labelText = svgEl("text", {
        x: cx(pos), y: cy(pos) + RADIUS + 13, class: "node-labels",
        "text-anchor": "middle",
      });
      labelText.textContent = node.labels.join(",");
      group.appendChild(labelText);
    }
    const mine = pebblesHere.filter((p) => p.elem === pos.id);
    mine.forEach((p, i) => {
      const badge = svgEl("g", { class: "pebble" });
      const bx = cx(pos) + RADIUS - 4 + 14 * i;
      const by = cy(pos) - RADIUS + 2;
      badge.appendChild(svgEl("circle", { cx: bx, cy: by, r: 9, class: "pebble-circle" }));
      const t = svgEl("text", { x: bx, y: by + 3.5, class: "pebble-text", "text-anchor": "middle" });
      t.textContent = String(p.round);
      badge.appendChild(t);
      group.appendChild(badge);
    });
    svg.appendChild(group);
  }
  container.appendChild(svg);
}
