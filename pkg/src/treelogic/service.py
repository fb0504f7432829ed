"""Local HTTP/JSON service hosting interactive EF-game sessions between a
human and the engine.

Sessions live in memory under per-session locks; the engine's game-value
search is memoized per session, so after the initial solve each reply is a
table lookup.  The move wire format is the canonical game move encoding.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware

from .errors import (GameBudgetExceeded, IllegalMove, ParseError,
                     StructureError, TreelogicError)
from .games import (GameConfig, Player, _Search, apply_move, describe_phase,
                    initial_state, legal_moves, optimal_move, parse_move,
                    status, winner_from)
from .structures import Frame, ParamFrame, labels_of, mask_elems, parse_structure
from .syntax import Logic
from .testkit import GenConfig, random_tree

SIZE_CAP = 8
ROUND_CAPS = {Logic.FO: 6, Logic.MSO: 3, Logic.FOTC1: 3, Logic.FOLFP1: 3}
SEARCH_BUDGET = 3_000_000


class CapExceeded(TreelogicError):
    pass


def _frame_from_doc(doc) -> Frame:
    if isinstance(doc, dict) and "generator" in doc:
        spec = doc["generator"]
        cfg = GenConfig(seed=int(spec.get("seed", 0)),
                        min_size=int(spec.get("size", 3)),
                        max_size=int(spec.get("size", 3)))
        return random_tree(cfg).frame
    return parse_structure(json.dumps(doc))


def board_view(frame: Frame) -> dict:
    """Rendering-oriented projection: per-node labels, child covers when lt
    is interpreted, and the sibling order."""
    nodes = [{"id": i, "labels": labels_of(frame, i)} for i in range(frame.size)]
    covers = []
    parent: dict[int, int] | None = {}
    if "lt" in frame.vocab:
        lt = {tuple(t) for t in frame.tuples("lt")}
        covers = sorted((a, b) for a, b in lt
                        if not any((a, c) in lt and (c, b) in lt
                                   for c in range(frame.size)))
        for a, b in covers:
            if parent is not None and b in parent:
                parent = None
                break
            if parent is not None:
                parent[b] = a
    siblings = sorted(tuple(t) for t in frame.tuples("slt")) if "slt" in frame.vocab else []
    return {
        "n": frame.size,
        "nodes": nodes,
        "child_edges": [list(c) for c in covers],
        "parent": {str(k): v for k, v in parent.items()} if parent is not None else None,
        "sibling_pairs": [list(s) for s in siblings],
        "admissible": "full" if frame.admissible is None
        else [mask_elems(m) for m in frame.admissible],
        "structure": frame.to_json(),
    }


@dataclass
class Session:
    id: str
    config: GameConfig
    human_role: Player
    state: object = None
    transcript: list[str] = field(default_factory=list)
    search: _Search = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        self.state = initial_state(self.config)
        self.search = _Search(SEARCH_BUDGET)
        self.search.value(self.state)  # precompute the game value
        self._engine_steps()

    # -- engine -------------------------------------------------------------

    def verdict(self) -> Player | None:
        decided = status(self.state)
        if decided is not None:
            return decided
        # a mover stuck mid-phase (e.g. no admissible GFP reply) loses
        if not legal_moves(self.state):
            return self.state.mover.other
        return None

    def _engine_steps(self) -> None:
        while self.verdict() is None and self.state.mover is not self.human_role:
            move = optimal_move(self.state, search=self.search)
            self.state = apply_move(self.state, move)
            self.transcript.append(f"engine {move.encode()}")

    def play_human(self, text: str) -> None:
        if self.verdict() is not None:
            raise IllegalMove("game is over")
        if self.state.mover is not self.human_role:
            raise NotYourTurn("engine to move")
        move = parse_move(text)
        self.state = apply_move(self.state, move)
        self.transcript.append(f"human {move.encode()}")
        self._engine_steps()

    def hint(self) -> dict:
        if self.verdict() is not None:
            raise NotYourTurn("game is over")
        move = optimal_move(self.state, search=self.search)
        predicted = winner_from(self.state, search=self.search)
        return {"move": move.encode(), "predicted_winner": predicted.value}

    # -- projection ----------------------------------------------------------

    def state_hash(self) -> str:
        payload = repr((self.state.rounds_left, self.state.elem_pebbles,
                        self.state.set_pebbles, self.state.phase)).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    def view(self) -> dict:
        verdict = self.verdict()
        human_turn = verdict is None and self.state.mover is self.human_role
        return {
            "id": self.id,
            "logic": self.config.logic.value,
            "rounds": self.config.rounds,
            "rounds_left": self.state.rounds_left,
            "human_role": self.human_role.value,
            "to_move": None if verdict is not None else
            ("human" if human_turn else "engine"),
            "phase": describe_phase(self.state),
            "pebbles": [list(p) for p in self.state.elem_pebbles],
            "set_pebbles": [[mask_elems(a), mask_elems(b)]
                            for a, b in self.state.set_pebbles],
            "legal_moves": [m.encode() for m in legal_moves(self.state)]
            if human_turn else [],
            "verdict": verdict.value if verdict is not None else "ongoing",
            "transcript": list(self.transcript),
            "state_hash": self.state_hash(),
            "boards": {"left": board_view(self.config.left.frame),
                       "right": board_view(self.config.right.frame)},
        }


class NotYourTurn(TreelogicError):
    pass


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, body: dict) -> Session:
        try:
            logic = Logic(body.get("logic", "fo"))
        except ValueError as exc:
            raise ParseError(f"unknown logic {body.get('logic')!r}") from exc
        rounds = int(body.get("rounds", 2))
        role = body.get("human_role", "spoiler")
        if role not in (Player.SPOILER.value, Player.DUPLICATOR.value):
            raise ParseError(f"unknown role {role!r}")
        if "left" not in body or "right" not in body:
            raise ParseError("body needs 'left' and 'right' structure documents")
        left = _frame_from_doc(body["left"])
        right = _frame_from_doc(body["right"])
        if left.size > SIZE_CAP or right.size > SIZE_CAP:
            raise CapExceeded(f"structures are capped at {SIZE_CAP} elements")
        if rounds < 0 or rounds > ROUND_CAPS[logic]:
            raise CapExceeded(
                f"{logic.value} games are capped at {ROUND_CAPS[logic]} rounds")
        config = GameConfig(logic, rounds, ParamFrame(left), ParamFrame(right))
        session = Session(str(uuid.uuid4())[:8], config, Player(role))
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(session_id)
            del self._sessions[session_id]


def create_app():
    app = FastAPI(title="treelogic game service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = SessionStore()
    app.state.store = store

    def fetch(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(404, f"no session {session_id!r}")

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(400, "malformed JSON body")
        try:
            session = store.create(body)
        except (CapExceeded, GameBudgetExceeded) as exc:
            raise HTTPException(422, str(exc))
        except (ParseError, StructureError) as exc:
            raise HTTPException(400, str(exc))
        return session.view()

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return fetch(session_id).view()

    @app.post("/sessions/{session_id}/moves")
    async def post_move(session_id: str, body: dict):
        session = fetch(session_id)
        move = body.get("move", "")
        with session.lock:
            try:
                session.play_human(move)
            except NotYourTurn as exc:
                raise HTTPException(409, str(exc))
            except IllegalMove as exc:
                raise HTTPException(422, str(exc))
            return session.view()

    @app.get("/sessions/{session_id}/hint")
    async def get_hint(session_id: str):
        session = fetch(session_id)
        with session.lock:
            try:
                return session.hint()
            except NotYourTurn as exc:
                raise HTTPException(409, str(exc))

    @app.delete("/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        try:
            store.delete(session_id)
        except KeyError:
            raise HTTPException(404, f"no session {session_id!r}")

    return app


def main() -> None:
    import uvicorn

    port = int(os.environ.get("TREELOGIC_PORT", "8321"))
    uvicorn.run(create_app(), host="127.0.0.1", port=port)


if __name__ == "__main__":
    main()
