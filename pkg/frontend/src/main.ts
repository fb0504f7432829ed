// Application wiring: start form, board interaction, move submission,
// hints, and verdicts. The server is authoritative for all game state.

import { GameClient, ServiceError } from "./client.js";
import { MoveBuilder, tcPebblePairs, type MoveKind } from "./moves.js";
import { renderBoard } from "./render.js";
import type { Hint, LogicId, Role, SessionView, Side } from "./types.js";

const SAMPLES: Record<string, unknown> = {
  chain2: { vocab: [{ name: "lt", arity: 2 }], n: 2, rel: { lt: [[0, 1]] }, admissible: "full" },
  chain3: {
    vocab: [{ name: "lt", arity: 2 }], n: 3,
    rel: { lt: [[0, 1], [0, 2], [1, 2]] }, admissible: "full",
  },
  "tree: root with two children": {
    tree: { label: [], children: [{ label: ["P1"], children: [] }, { label: [], children: [] }] },
  },
  "generator (seeded tree)": { generator: { kind: "tree", size: 4, seed: 7 } },
};

class App {
  client: GameClient;
  view: SessionView | null = null;
  builder: MoveBuilder | null = null;
  hint: Hint | null = null;
  message = "";

  constructor(private root: HTMLElement) {
    const base = (localStorage.getItem("treelogic-base") ?? "http://127.0.0.1:8321");
    this.client = new GameClient(base);
    this.renderStart();
  }

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Record<string, string> = {}, text = "",
  ): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
    if (text) node.textContent = text;
    return node;
  }

  // ---- start form ---------------------------------------------------------

  renderStart(): void {
    this.root.innerHTML = "";
    const form = this.el("div", { class: "start-form" });
    form.appendChild(this.el("h1", {}, "treelogic: Ehrenfeucht–Fraïssé games"));

    const baseRow = this.el("div", { class: "row" });
    baseRow.appendChild(this.el("label", {}, "service base URL"));
    const baseInput = this.el("input", { id: "base", value: localStorage.getItem("treelogic-base") ?? "http://127.0.0.1:8321" });
    baseRow.appendChild(baseInput);
    form.appendChild(baseRow);

    const mkSelect = (id: string, label: string, values: string[]) => {
      const row = this.el("div", { class: "row" });
      row.appendChild(this.el("label", {}, label));
      const select = this.el("select", { id });
      for (const value of values) {
        select.appendChild(this.el("option", { value }, value));
      }
      row.appendChild(select);
      return { row, select };
    };

    const logic = mkSelect("logic", "logic", ["fo", "mso", "fotc1", "folfp1"]);
    const rounds = mkSelect("rounds", "rounds", ["0", "1", "2", "3"]);
    rounds.select.value = "2";
    const role = mkSelect("role", "you play", ["spoiler", "duplicator"]);
    form.append(logic.row, rounds.row, role.row);

    const sides: Record<Side, HTMLTextAreaElement> = {} as never;
    for (const side of ["L", "R"] as Side[]) {
      const row = this.el("div", { class: "row structure" });
      row.appendChild(this.el("label", {}, side === "L" ? "left structure" : "right structure"));
      const pick = this.el("select", {});
      pick.appendChild(this.el("option", { value: "" }, "custom JSON..."));
      for (const name of Object.keys(SAMPLES)) {
        pick.appendChild(this.el("option", { value: name }, name));
      }
      const area = this.el("textarea", { rows: "4" });
      area.value = JSON.stringify(SAMPLES[side === "L" ? "chain2" : "chain3"]);
      pick.value = side === "L" ? "chain2" : "chain3";
      pick.addEventListener("change", () => {
        if (pick.value) area.value = JSON.stringify(SAMPLES[pick.value]);
      });
      row.append(pick, area);
      form.appendChild(row);
      sides[side] = area;
    }

    const error = this.el("div", { class: "error", id: "start-error" });
    const start = this.el("button", {}, "start game");
    start.addEventListener("click", async () => {
      error.textContent = "";
      localStorage.setItem("treelogic-base", baseInput.value);
      this.client = new GameClient(baseInput.value);
      let left: unknown;
      let right: unknown;
      try {
        left = JSON.parse(sides.L.value);
        right = JSON.parse(sides.R.value);
      } catch (exc) {
        error.textContent = `invalid JSON: ${exc}`;
        return;
      }
      try {
        this.view = await this.client.createSession({
          left, right,
          logic: logic.select.value as LogicId,
          rounds: parseInt(rounds.select.value, 10),
          human_role: role.select.value as Role,
        });
        this.builder = new MoveBuilder(this.view.legal_moves);
        this.hint = null;
        this.message = "";
        this.renderGame();
      } catch (exc) {
        error.textContent = exc instanceof ServiceError
          ? `service ${exc.status}: ${exc.message}` : String(exc);
      }
    });
    form.append(start, error);
    this.root.appendChild(form);
  }

  // ---- game view ----------------------------------------------------------

  private applyView(view: SessionView): void {
    this.view = view;
    this.builder = new MoveBuilder(view.legal_moves);
    this.hint = null;
    this.renderGame();
  }

  private async submit(move: string): Promise<void> {
    if (!this.view) return;
    try {
      this.message = "";
      this.applyView(await this.client.postMove(this.view.id, move));
    } catch (exc) {
      this.message = exc instanceof ServiceError
        ? `rejected (${exc.status}): ${exc.message}` : String(exc);
      this.renderGame();
    }
  }

  private onNodeClick(side: Side, id: number): void {
    if (!this.view || !this.builder || this.view.verdict !== "ongoing") return;
    const result = this.builder.clickNode(side, id);
    if (result.move) {
      void this.submit(result.move);
      return;
    }
    this.message = result.error ?? "";
    this.renderGame();
  }

  private hintTarget(): { side: Side; id: number } | null {
    if (!this.hint) return null;
    const parts = this.hint.move.split(" ");
    if (parts[0] === "pt") return { side: parts[1] as Side, id: parseInt(parts[2], 10) };
    return null;
  }

  renderGame(): void {
    const view = this.view;
    const builder = this.builder;
    if (!view || !builder) return;
    this.root.innerHTML = "";
    const top = this.el("div", { class: "topbar" });
    top.appendChild(this.el("span", { class: "banner" },
      view.verdict === "ongoing" ? view.phase : `game over: ${view.verdict} wins`));
    top.appendChild(this.el("span", { class: "rounds" },
      `round ${view.rounds - view.rounds_left + (view.verdict === "ongoing" ? 1 : 0)} / ${view.rounds}`));
    top.appendChild(this.el("span", {},
      `you are ${view.human_role} (${view.logic}, ${view.to_move ?? "finished"})`));
    const restart = this.el("button", {}, "new game");
    restart.addEventListener("click", () => this.renderStart());
    top.appendChild(restart);
    this.root.appendChild(top);

    const boards = this.el("div", { class: "boards" });
    for (const side of ["L", "R"] as Side[]) {
      const panel = this.el("div", { class: "panel" });
      panel.appendChild(this.el("h3", {}, side === "L" ? "left structure" : "right structure"));
      const host = this.el("div", {});
      renderBoard(host, side, side === "L" ? view.boards.left : view.boards.right, view, {
        onNodeClick: (s, id) => this.onNodeClick(s, id),
        selected: new Set(builder.kind === "point" ? [] : builder.picked),
        selectionSide: builder.kind === "point" ? null : builder.activeSide,
        highlight: this.hintTarget(),
      });
      panel.appendChild(host);
      const board = side === "L" ? view.boards.left : view.boards.right;
      if (board.admissible !== "full" && builder.kind !== "point"
          && builder.activeSide === side) {
        const picker = this.el("div", { class: "family" });
        picker.appendChild(this.el("span", {}, "admissible sets: "));
        for (const elems of board.admissible) {
          const button = this.el("button", {}, `{${elems.join(",")}}`);
          button.addEventListener("click", () => {
            builder.selectFamilySet(elems);
            this.renderGame();
          });
          picker.appendChild(button);
        }
        panel.appendChild(picker);
      }
      boards.appendChild(panel);
    }
    this.root.appendChild(boards);

    if (view.verdict === "ongoing" && view.to_move === "human") {
      this.root.appendChild(this.controls());
    }

    if (this.message) {
      this.root.appendChild(this.el("div", { class: "error" }, this.message));
    }
    if (this.hint) {
      this.root.appendChild(this.el("div", { class: "hint-box" },
        `hint: ${this.hint.move} (predicted winner: ${this.hint.predicted_winner})`));
    }

    const transcript = this.el("div", { class: "transcript" });
    transcript.appendChild(this.el("h4", {}, "transcript"));
    for (const entry of view.transcript) {
      transcript.appendChild(this.el("div", {}, entry));
    }
    this.root.appendChild(transcript);
  }

  private controls(): HTMLElement {
    const view = this.view!;
    const builder = this.builder!;
    const bar = this.el("div", { class: "controls" });
    const kinds = builder.kinds;
    const addKind = (kind: MoveKind, side: Side, label: string) => {
      const button = this.el("button",
        { class: builder.kind === kind && builder.side === side ? "active" : "" }, label);
      button.addEventListener("click", () => {
        builder.startKind(kind, side);
        this.message = kind === "tc" ? "pick pebble i, then pebble j, then the set" : "";
        this.renderGame();
      });
      bar.appendChild(button);
    };
    if (kinds.point.size) addKind("point", "L", "point move (click a node)");
    for (const side of kinds.set) addKind("set", side, `set move on ${side}`);
    for (const side of kinds.tc) addKind("tc", side, `tc move on ${side}`);
    if (kinds.tcpair) addKind("tcpair", builder.activeSide, "pick the pair");
    if (kinds.lfp) addKind("lfp", "R", "lfp move (set on R)");
    if (kinds.gfp) addKind("gfp", "L", "gfp move (set on L)");

    if (builder.kind === "tc" && builder.needsPebbles) {
      const pebbleBar = this.el("div", { class: "pebble-picker" });
      pebbleBar.appendChild(this.el("span", {},
        builder.pebbleI === null ? "pebble i: " : `i=${builder.pebbleI}; pebble j: `));
      for (const [i, j] of tcPebblePairs(view.legal_moves, builder.side)) {
        for (const index of [i, j]) {
          if (!pebbleBar.querySelector(`[data-peb="${index}"]`)) {
            const button = this.el("button", { "data-peb": String(index) }, `#${index}`);
            button.addEventListener("click", () => {
              const result = builder.clickPebble(index);
              this.message = result.error ?? "";
              this.renderGame();
            });
            pebbleBar.appendChild(button);
          }
        }
      }
      bar.appendChild(pebbleBar);
    }

    if (builder.kind !== "point") {
      const confirm = this.el("button", { class: "confirm" }, "confirm selection");
      confirm.addEventListener("click", () => {
        const result = builder.confirm();
        if (result.move) void this.submit(result.move);
        else {
          this.message = result.error ?? "";
          this.renderGame();
        }
      });
      bar.appendChild(confirm);
    }

    const hint = this.el("button", {}, "hint");
    hint.addEventListener("click", async () => {
      try {
        this.hint = await this.client.getHint(view.id);
      } catch (exc) {
        this.message = String(exc);
      }
      this.renderGame();
    });
    bar.appendChild(hint);
    return bar;
  }
}

const root = document.getElementById("app");
if (root) new App(root);
