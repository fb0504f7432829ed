// Wire types mirroring the game service schema.

export type Side = "L" | "R";
export type LogicId = "fo" | "mso" | "fotc1" | "folfp1";
export type Role = "spoiler" | "duplicator";
export type Verdict = "ongoing" | "spoiler" | "duplicator";

export interface BoardNode {
  id: number;
  labels: string[];
}

export interface BoardView {
  n: number;
  nodes: BoardNode[];
  child_edges: [number, number][];
  parent: Record<string, number> | null;
  sibling_pairs: [number, number][];
  admissible: "full" | number[][];
  structure: unknown;
}

export interface SessionView {
  id: string;
  logic: LogicId;
  rounds: number;
  rounds_left: number;
  human_role: Role;
  to_move: "human" | "engine" | null;
  phase: string;
  pebbles: [number, number][];
  set_pebbles: [number[], number[]][];
  legal_moves: string[];
  verdict: Verdict;
  transcript: string[];
  state_hash: string;
  boards: { left: BoardView; right: BoardView };
}

export interface Hint {
  move: string;
  predicted_winner: Verdict;
}

export interface CreateSessionBody {
  left: unknown;
  right: unknown;
  logic: LogicId;
  rounds: number;
  human_role: Role;
}
