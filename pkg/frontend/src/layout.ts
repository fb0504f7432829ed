// Tree layout for board rendering: children ordered by the sibling order,
// x from left-to-right leaf order, y from depth. Non-tree frames fall back
// to a single row.

import type { BoardView } from "./types.js";

export interface NodePosition {
  id: number;
  x: number;
  y: number;
}

export function orderSiblings(ids: number[], siblingPairs: [number, number][]): number[] {
  const before = new Map<number, number>();
  for (const id of ids) before.set(id, 0);
  for (const [a, b] of siblingPairs) {
    if (before.has(b) && ids.includes(a)) before.set(b, (before.get(b) ?? 0) + 1);
  }
  return [...ids].sort((a, b) => (before.get(a) ?? 0) - (before.get(b) ?? 0));
}

export function layoutBoard(board: BoardView): NodePosition[] {
  if (board.parent === null) {
    return board.nodes.map((node, i) => ({ id: node.id, x: i, y: 0 }));
  }
  const parent = new Map<number, number>();
  for (const [key, value] of Object.entries(board.parent)) {
    parent.set(parseInt(key, 10), value);
  }
  const children = new Map<number, number[]>();
  for (const node of board.nodes) children.set(node.id, []);
  for (const [child, par] of parent.entries()) children.get(par)?.push(child);
  const roots = board.nodes.map((n) => n.id).filter((id) => !parent.has(id));

  const positions: NodePosition[] = [];
  let nextLeaf = 0;

  const place = (id: number, depth: number): number => {
    const kids = orderSiblings(children.get(id) ?? [], board.sibling_pairs);
    if (kids.length === 0) {
      positions.push({ id, x: nextLeaf++, y: depth });
      return nextLeaf - 1;
    }
    const xs = kids.map((kid) => place(kid, depth + 1));
    const x = (Math.min(...xs) + Math.max(...xs)) / 2;
    positions.push({ id, x, y: depth });
    return x;
  };

  for (const root of orderSiblings(roots, board.sibling_pairs)) place(root, 0);
  return positions.sort((a, b) => a.id - b.id);
}
