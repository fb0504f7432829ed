// Move construction and client-side pre-validation. The service's
// legal_moves list is authoritative; the builder only assembles encodings
// and refuses selections that cannot become a legal move.

import type { Side } from "./types.js";

export type MoveKind = "point" | "set" | "tc" | "tcpair" | "lfp" | "gfp";

export interface KindAvailability {
  point: Set<Side>;
  set: Set<Side>;
  tc: Set<Side>;
  tcpair: boolean;
  lfp: boolean;
  gfp: boolean;
}

export function encodeSet(elems: Iterable<number>): string {
  return "{" + [...elems].sort((a, b) => a - b).join(",") + "}";
}

/** Which move kinds (and on which sides) the legal-move list offers. */
export function availableKinds(legalMoves: string[]): KindAvailability {
  const out: KindAvailability = {
    point: new Set(),
    set: new Set(),
    tc: new Set(),
    tcpair: false,
    lfp: false,
    gfp: false,
  };
  for (const move of legalMoves) {
    const [kind, side] = move.split(" ");
    if (kind === "pt") out.point.add(side as Side);
    else if (kind === "set") out.set.add(side as Side);
    else if (kind === "tc") out.tc.add(side as Side);
    else if (kind === "tcpair") out.tcpair = true;
    else if (kind === "lfp") out.lfp = true;
    else if (kind === "gfp") out.gfp = true;
  }
  return out;
}

/** Pebble index pairs (i, j) offered by the tc moves on a side. */
export function tcPebblePairs(legalMoves: string[], side: Side): Array<[number, number]> {
  const seen = new Set<string>();
  const out: Array<[number, number]> = [];
  for (const move of legalMoves) {
    const parts = move.split(" ");
    if (parts[0] !== "tc" || parts[1] !== side) continue;
    const key = `${parts[2]} ${parts[3]}`;
    if (seen.has(key)) continue;
    seen.add(key);
    out.push([parseInt(parts[2].slice(2), 10), parseInt(parts[3].slice(2), 10)]);
  }
  return out;
}

export interface BuiltMove {
  move?: string;
  error?: string;
}

/**
 * Selection state machine: single click submits a point; set-like moves
 * multi-select then confirm; the tc wizard picks two pebbles before the set.
 */
export class MoveBuilder {
  kind: MoveKind = "point";
  side: Side = "L";
  picked: number[] = [];
  pebbleI: number | null = null;
  pebbleJ: number | null = null;

  constructor(public legalMoves: string[]) {}

  get kinds(): KindAvailability {
    return availableKinds(this.legalMoves);
  }

  startKind(kind: MoveKind, side: Side): void {
    this.kind = kind;
    this.side = kind === "lfp" ? "R" : kind === "gfp" ? "L" : side;
    this.picked = [];
    this.pebbleI = null;
    this.pebbleJ = null;
  }

  /** The side node clicks select on in the current mode. */
  get activeSide(): Side {
    return this.side;
  }

  get needsPebbles(): boolean {
    return this.kind === "tc" && (this.pebbleI === null || this.pebbleJ === null);
  }

  clickPebble(index: number): BuiltMove {
    if (this.kind !== "tc") return { error: "pebble picks belong to the tc wizard" };
    if (this.pebbleI === null) {
      this.pebbleI = index;
      return {};
    }
    if (index === this.pebbleI) return { error: "pick two distinct pebbles" };
    this.pebbleJ = index;
    return {};
  }

  /** Click a node on `side`; point mode submits immediately. */
  clickNode(side: Side, id: number): BuiltMove {
    if (this.kind === "point") {
      const move = `pt ${side} ${id}`;
      return this.validate(move);
    }
    if (side !== this.activeSide) {
      return { error: `selection happens on the ${this.activeSide} board` };
    }
    if (this.kind === "tc" && this.needsPebbles) {
      return { error: "pick the two pebbles i and j first" };
    }
    if (this.kind === "tcpair") {
      if (this.picked.length >= 2) this.picked = [];
      this.picked.push(id);
      return {};
    }
    const at = this.picked.indexOf(id);
    if (at >= 0) this.picked.splice(at, 1);
    else this.picked.push(id);
    return {};
  }

  /** Adopt a whole admissible set from the family picker. */
  selectFamilySet(elems: number[]): void {
    this.picked = [...elems];
  }

  confirm(): BuiltMove {
    switch (this.kind) {
      case "point":
        return { error: "point moves submit on click" };
      case "set":
        return this.validate(`set ${this.side} ${encodeSet(this.picked)}`);
      case "tc":
        if (this.needsPebbles) return { error: "pick the two pebbles i and j first" };
        return this.validate(
          `tc ${this.side} i=${this.pebbleI} j=${this.pebbleJ} ${encodeSet(this.picked)}`);
      case "tcpair":
        if (this.picked.length !== 2) {
          return { error: "pick the inside element, then the outside element" };
        }
        return this.validate(`tcpair ${this.picked[0]} ${this.picked[1]}`);
      case "lfp":
        return this.validate(`lfp ${encodeSet(this.picked)}`);
      case "gfp":
        return this.validate(`gfp ${encodeSet(this.picked)}`);
    }
  }

  private validate(move: string): BuiltMove {
    if (!this.legalMoves.includes(move)) {
      return { error: `not a legal move here: ${move}` };
    }
    return { move };
  }
}
