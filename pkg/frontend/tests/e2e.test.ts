// Scripted end-to-end game against the real service: a full FO game on
// chain2 vs chain3 (n = 2) played as Spoiler by following hints must be won;
// an illegal TC set move is rejected with the rule text; and the final
// verdict agrees with the CLI `equiv` on the same inputs.

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameClient, ServiceError } from "../src/client.js";
import { MoveBuilder } from "../src/moves.js";

const PORT = 8347;
const BASE = `http://127.0.0.1:${PORT}`;

const CHAIN2 = {
  vocab: [{ name: "lt", arity: 2 }], n: 2,
  rel: { lt: [[0, 1]] }, admissible: "full",
};
const CHAIN3 = {
  vocab: [{ name: "lt", arity: 2 }], n: 3,
  rel: { lt: [[0, 1], [0, 2], [1, 2]] }, admissible: "full",
};

let service: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/sessions/probe`);
      if (response.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("service did not come up");
}

function runCli(args: string[]): Promise<number> {
  return new Promise((resolve, reject) => {
    execFile("python3", ["-m", "treelogic.cli", ...args], (error) => {
      if (error && typeof error.code !== "number") reject(error);
      else resolve(error && typeof error.code === "number" ? error.code : 0);
    });
  });
}

beforeAll(async () => {
  service = spawn("python3", ["-m", "treelogic.cli", "serve", "--port", String(PORT)],
    { stdio: "ignore" });
  await waitForService();
}, 30000);

afterAll(() => {
  service.kill();
});

describe("end-to-end game session", () => {
  it("plays a full FO game as Spoiler following hints and wins", async () => {
    const client = new GameClient(BASE);
    let view = await client.createSession({
      left: CHAIN2, right: CHAIN3, logic: "fo", rounds: 2, human_role: "spoiler",
    });
    expect(view.to_move).toBe("human");
    let guard = 0;
    while (view.verdict === "ongoing") {
      expect(guard++).toBeLessThan(20);
      const hint = await client.getHint(view.id);
      expect(hint.predicted_winner).toBe("spoiler");
      // drive the move through the same builder the UI uses
      const builder = new MoveBuilder(view.legal_moves);
      const [kind, side, elem] = hint.move.split(" ");
      expect(kind).toBe("pt");
      const built = builder.clickNode(side as "L" | "R", parseInt(elem, 10));
      expect(built.move).toBe(hint.move);
      view = await client.postMove(view.id, built.move!);
    }
    expect(view.verdict).toBe("spoiler");
    expect(view.legal_moves).toEqual([]);
  }, 30000);

  it("rejects an intentionally illegal TC set move with the rule text", async () => {
    const client = new GameClient(BASE);
    let view = await client.createSession({
      left: CHAIN3, right: CHAIN3, logic: "fotc1", rounds: 3, human_role: "spoiler",
    });
    view = await client.postMove(view.id, "pt L 0");
    view = await client.postMove(view.id, "pt L 1");
    // the set {0,1} contains both named pebbles, violating a_j not in A
    let rejection: ServiceError | null = null;
    try {
      await client.postMove(view.id, "tc L i=0 j=1 {0,1}");
    } catch (exc) {
      rejection = exc as ServiceError;
    }
    expect(rejection).not.toBeNull();
    expect(rejection!.status).toBe(422);
    expect(rejection!.message).toContain("a_i in A and a_j not in A");
    // the builder would have refused it client-side too
    const builder = new MoveBuilder(view.legal_moves);
    builder.startKind("tc", "L");
    builder.clickPebble(0);
    builder.clickPebble(1);
    builder.clickNode("L", 0);
    builder.clickNode("L", 1);
    expect(builder.confirm().error).toMatch(/not a legal move/);
  }, 30000);

  it("final verdict matches the CLI equiv on the same inputs", async () => {
    const dir = mkdtempSync(join(tmpdir(), "treelogic-"));
    const left = join(dir, "chain2.json");
    const right = join(dir, "chain3.json");
    writeFileSync(left, JSON.stringify(CHAIN2));
    writeFileSync(right, JSON.stringify(CHAIN3));
    // --strict exits 1 when spoiler wins (frames inequivalent)
    const code = await runCli(["equiv", "--logic", "fo", "-n", "2",
      left, right, "--strict"]);

    const client = new GameClient(BASE);
    let view = await client.createSession({
      left: CHAIN2, right: CHAIN3, logic: "fo", rounds: 2, human_role: "spoiler",
    });
    while (view.verdict === "ongoing") {
      const hint = await client.getHint(view.id);
      view = await client.postMove(view.id, hint.move);
    }
    expect(view.verdict === "spoiler").toBe(code === 1);
  }, 30000);

  it("session view stays a pure projection (replays deterministically)", async () => {
    const client = new GameClient(BASE);
    const first = await client.createSession({
      left: CHAIN2, right: CHAIN3, logic: "fo", rounds: 2, human_role: "spoiler",
    });
    const second = await client.createSession({
      left: CHAIN2, right: CHAIN3, logic: "fo", rounds: 2, human_role: "spoiler",
    });
    let a = await client.postMove(first.id, "pt R 1");
    let b = await client.postMove(second.id, "pt R 1");
    expect(a.state_hash).toBe(b.state_hash);
    expect(a.transcript).toEqual(b.transcript);
  }, 30000);
});
