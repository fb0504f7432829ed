"""Ehrenfeucht-Fraisse games for FO, MSO, FO(TC1) and FO(LFP1) on frames:
game states, legal-move generation, exact winner computation by exhaustive
alternating search with memoization, and optimal-move extraction.

A round is one full Spoiler/Duplicator exchange, including the set and point
sub-phases of TC and fixpoint moves.  The winning condition is checked after
every completed round; since pebble maps only grow, a violation is sticky
and early exit matches checking only at the end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .errors import GameBudgetExceeded, IllegalMove, StructureError
from .structures import Frame, ParamFrame, mask_elems, mask_of
from .syntax import Logic


class Player(str, Enum):
    SPOILER = "spoiler"
    DUPLICATOR = "duplicator"

    @property
    def other(self) -> "Player":
        return Player.DUPLICATOR if self is Player.SPOILER else Player.SPOILER


def _other_side(side: str) -> str:
    return "R" if side == "L" else "L"


@dataclass(frozen=True)
class GameConfig:
    logic: Logic
    rounds: int
    left: ParamFrame
    right: ParamFrame

    def __post_init__(self):
        if self.left.frame.vocab != self.right.frame.vocab:
            raise StructureError("both frames must share one vocabulary")
        if len(self.left.elems) != len(self.right.elems):
            raise StructureError("element parameter lists differ in length")
        if len(self.left.sets) != len(self.right.sets):
            raise StructureError("set parameter lists differ in length")
        if self.logic in (Logic.FO, Logic.FOTC1) and (self.left.sets or self.right.sets):
            raise StructureError(f"{self.logic.value} games take no set parameters")

    def side(self, side: str) -> Frame:
        return self.left.frame if side == "L" else self.right.frame


# Moves ---------------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    def encode(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class PointPick(Move):
    side: str
    elem: int

    def encode(self) -> str:
        return f"pt {self.side} {self.elem}"


def _set_str(mask: int) -> str:
    return "{" + ",".join(str(e) for e in mask_elems(mask)) + "}"


@dataclass(frozen=True)
class SetPick(Move):
    side: str
    mask: int

    def encode(self) -> str:
        return f"set {self.side} {_set_str(self.mask)}"


@dataclass(frozen=True)
class TCInit(Move):
    """Spoiler names pebbles i, j and a separating admissible set on side."""

    side: str
    i: int
    j: int
    mask: int

    def encode(self) -> str:
        return f"tc {self.side} i={self.i} j={self.j} {_set_str(self.mask)}"


@dataclass(frozen=True)
class TCPair(Move):
    inside: int
    outside: int

    def encode(self) -> str:
        return f"tcpair {self.inside} {self.outside}"


@dataclass(frozen=True)
class LFPInit(Move):
    """Spoiler's LFP set pick, always in the right frame."""

    mask: int

    def encode(self) -> str:
        return f"lfp {_set_str(self.mask)}"


@dataclass(frozen=True)
class GFPInit(Move):
    """Spoiler's GFP set pick, always in the left frame."""

    mask: int

    def encode(self) -> str:
        return f"gfp {_set_str(self.mask)}"


def _parse_set(text: str) -> int:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise IllegalMove(f"bad set syntax {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        return 0
    return mask_of(int(e) for e in inner.split(","))


def parse_move(text: str) -> Move:
    """Decode the canonical move encoding."""
    parts = text.strip().split()
    if not parts:
        raise IllegalMove("empty move")
    kind = parts[0]
    try:
        if kind == "pt" and len(parts) == 3 and parts[1] in ("L", "R"):
            return PointPick(parts[1], int(parts[2]))
        if kind == "set" and len(parts) == 3 and parts[1] in ("L", "R"):
            return SetPick(parts[1], _parse_set(parts[2]))
        if kind == "tc" and len(parts) == 5 and parts[1] in ("L", "R"):
            i = int(parts[2].removeprefix("i="))
            j = int(parts[3].removeprefix("j="))
            return TCInit(parts[1], i, j, _parse_set(parts[4]))
        if kind == "tcpair" and len(parts) == 3:
            return TCPair(int(parts[1]), int(parts[2]))
        if kind == "lfp" and len(parts) == 2:
            return LFPInit(_parse_set(parts[1]))
        if kind == "gfp" and len(parts) == 2:
            return GFPInit(_parse_set(parts[1]))
    except ValueError as exc:
        raise IllegalMove(f"bad move {text!r}: {exc}") from exc
    raise IllegalMove(f"unrecognized move {text!r}")


# Phases --------------------------------------------------------------------


@dataclass(frozen=True)
class SpoilerTurn:
    pass


@dataclass(frozen=True)
class PointReply:
    side: str  # where Spoiler picked
    elem: int


@dataclass(frozen=True)
class SetReply:
    side: str
    mask: int


@dataclass(frozen=True)
class TCSetReply:
    side: str  # init side
    i: int
    j: int
    mask: int


@dataclass(frozen=True)
class TCPairPick:
    side: str        # init side; Spoiler's pair lives on the other side
    init_mask: int   # on side
    reply_mask: int  # on the other side


@dataclass(frozen=True)
class TCPairReply:
    side: str
    init_mask: int
    reply_mask: int
    inside: int
    outside: int


@dataclass(frozen=True)
class LFPSetReply:
    right_mask: int


@dataclass(frozen=True)
class LFPPointPick:
    left_mask: int
    right_mask: int


@dataclass(frozen=True)
class LFPPointReply:
    left_mask: int
    right_mask: int
    left_elem: int


@dataclass(frozen=True)
class GFPSetReply:
    left_mask: int


@dataclass(frozen=True)
class GFPPointPick:
    left_mask: int
    right_mask: int


@dataclass(frozen=True)
class GFPPointReply:
    left_mask: int
    right_mask: int
    right_elem: int


_SPOILER_PHASES = (SpoilerTurn, TCPairPick, LFPPointPick, GFPPointPick)


@dataclass(frozen=True)
class GameState:
    config: GameConfig
    rounds_left: int
    elem_pebbles: tuple[tuple[int, int], ...]
    set_pebbles: tuple[tuple[int, int], ...]
    phase: object
    violated: bool  # sticky winning-condition failure

    def key(self):
        return (self.rounds_left, self.elem_pebbles, self.set_pebbles, self.phase)

    @property
    def mover(self) -> Player:
        return Player.SPOILER if isinstance(self.phase, _SPOILER_PHASES) else Player.DUPLICATOR


def initial_state(config: GameConfig) -> GameState:
    pebbles = tuple(zip(config.left.elems, config.right.elems))
    sets = tuple(zip(config.left.sets, config.right.sets))
    state = GameState(config, config.rounds, pebbles, sets, SpoilerTurn(), False)
    return _with_violation(state, full=True)


def winning_condition(state: GameState) -> bool:
    """Partial isomorphism over base atoms; MSO adds two-way set membership
    with every set pebble, FO(LFP1) one-way (posimorphism)."""
    return _condition_holds(state, range(len(state.elem_pebbles)),
                            range(len(state.set_pebbles)))


def _condition_holds(state: GameState, new_elems, new_sets) -> bool:
    cfg = state.config
    pairs = state.elem_pebbles
    total = len(pairs)
    for i in new_elems:
        a, b = pairs[i]
        for j in range(total):
            c, d = pairs[j]
            if (a == c) != (b == d):
                return False
    lf, rf = cfg.left.frame, cfg.right.frame
    for name, arity in lf.vocab.relations:
        lt, rt = lf.tuples(name), rf.tuples(name)
        for idxs in itertools.product(range(total), repeat=arity):
            if not any(i in new_elems for i in idxs):
                continue
            if (tuple(pairs[i][0] for i in idxs) in lt) != \
               (tuple(pairs[i][1] for i in idxs) in rt):
                return False
    if cfg.logic in (Logic.MSO, Logic.FOLFP1):
        both_ways = cfg.logic is Logic.MSO
        for j, (am, bm) in enumerate(state.set_pebbles):
            fresh_set = j in new_sets
            for i, (a, b) in enumerate(pairs):
                if not fresh_set and i not in new_elems:
                    continue
                a_in, b_in = bool(am >> a & 1), bool(bm >> b & 1)
                if a_in and not b_in:
                    return False
                if both_ways and b_in and not a_in:
                    return False
    return True


def _with_violation(state: GameState, full: bool = False,
                    fresh_elems: int = 0, fresh_sets: int = 0) -> GameState:
    if state.violated:
        return state
    ne = len(state.elem_pebbles)
    ns = len(state.set_pebbles)
    if full:
        ok = _condition_holds(state, range(ne), range(ns))
    else:
        ok = _condition_holds(state, range(ne - fresh_elems, ne),
                              range(ns - fresh_sets, ns))
    if ok:
        return state
    return GameState(state.config, state.rounds_left, state.elem_pebbles,
                     state.set_pebbles, state.phase, True)


def status(state: GameState) -> Player | None:
    """The decided winner, or None while the game is ongoing.  Decisions
    happen only between rounds (phase SpoilerTurn)."""
    if not isinstance(state.phase, SpoilerTurn):
        return None
    if state.violated:
        return Player.SPOILER
    if state.rounds_left == 0:
        return Player.DUPLICATOR
    return None


# Legal moves ---------------------------------------------------------------


def _point_moves(cfg: GameConfig) -> list[Move]:
    return [PointPick(side, e)
            for side in ("L", "R")
            for e in range(cfg.side(side).size)]


def _tc_inits(state: GameState) -> list[Move]:
    cfg = state.config
    out: list[Move] = []
    pairs = state.elem_pebbles
    for side in ("L", "R"):
        frame = cfg.side(side)
        col = 0 if side == "L" else 1
        for i in range(len(pairs)):
            for j in range(len(pairs)):
                if i == j:
                    continue
                ei, ej = pairs[i][col], pairs[j][col]
                if ei == ej:
                    continue  # no set separates a pebble from itself
                for mask in frame.family():
                    if mask >> ei & 1 and not mask >> ej & 1:
                        out.append(TCInit(side, i, j, mask))
    return out


def legal_moves(state: GameState) -> list[Move]:
    """Exhaustive legal moves in the current phase, per the game definition
    for the configured logic."""
    cfg = state.config
    phase = state.phase
    if isinstance(phase, SpoilerTurn):
        if status(state) is not None:
            raise IllegalMove("game already decided")
        moves = _point_moves(cfg)
        if cfg.logic is Logic.MSO:
            for side in ("L", "R"):
                moves += [SetPick(side, m) for m in cfg.side(side).family()]
        elif cfg.logic is Logic.FOTC1:
            moves += _tc_inits(state)
        elif cfg.logic is Logic.FOLFP1:
            rf, lf = cfg.right.frame, cfg.left.frame
            rfull, lfull = (1 << rf.size) - 1, (1 << lf.size) - 1
            rights = {b for _, b in state.elem_pebbles}
            lefts = {a for a, _ in state.elem_pebbles}
            moves += [LFPInit(m) for m in rf.family()
                      if m != rfull and any(not m >> b & 1 for b in rights)]
            moves += [GFPInit(m) for m in lf.family()
                      if m != lfull and any(m >> a & 1 for a in lefts)]
        return moves
    if isinstance(phase, PointReply):
        side = _other_side(phase.side)
        return [PointPick(side, e) for e in range(cfg.side(side).size)]
    if isinstance(phase, SetReply):
        side = _other_side(phase.side)
        return [SetPick(side, m) for m in cfg.side(side).family()]
    if isinstance(phase, TCSetReply):
        side = _other_side(phase.side)
        frame = cfg.side(side)
        col = 0 if side == "L" else 1
        ei = state.elem_pebbles[phase.i][col]
        ej = state.elem_pebbles[phase.j][col]
        return [SetPick(side, m) for m in frame.family()
                if m >> ei & 1 and not m >> ej & 1]
    if isinstance(phase, TCPairPick):
        side = _other_side(phase.side)
        n = cfg.side(side).size
        m = phase.reply_mask
        return [TCPair(e1, e2) for e1 in range(n) for e2 in range(n)
                if m >> e1 & 1 and not m >> e2 & 1]
    if isinstance(phase, TCPairReply):
        n = cfg.side(phase.side).size
        m = phase.init_mask
        return [TCPair(e1, e2) for e1 in range(n) for e2 in range(n)
                if m >> e1 & 1 and not m >> e2 & 1]
    if isinstance(phase, LFPSetReply):
        lf = cfg.left.frame
        lfull = (1 << lf.size) - 1
        return [SetPick("L", m) for m in lf.family() if m != lfull]
    if isinstance(phase, LFPPointPick):
        return [PointPick("L", a) for a in range(cfg.left.frame.size)
                if not phase.left_mask >> a & 1]
    if isinstance(phase, LFPPointReply):
        return [PointPick("R", b) for b in range(cfg.right.frame.size)
                if not phase.right_mask >> b & 1]
    if isinstance(phase, GFPSetReply):
        rf = cfg.right.frame
        rfull = (1 << rf.size) - 1
        return [SetPick("R", m) for m in rf.family() if m != rfull and m != 0]
    if isinstance(phase, GFPPointPick):
        return [PointPick("R", b) for b in range(cfg.right.frame.size)
                if phase.right_mask >> b & 1]
    if isinstance(phase, GFPPointReply):
        return [PointPick("L", a) for a in range(cfg.left.frame.size)
                if phase.left_mask >> a & 1]
    raise TypeError(f"unknown phase {phase!r}")


def describe_phase(state: GameState) -> str:
    """Human-readable statement of what the current game definition demands."""
    phase = state.phase
    logic = state.config.logic.value
    if isinstance(phase, SpoilerTurn):
        return f"Spoiler to move ({logic} game, {state.rounds_left} round(s) left)"
    if isinstance(phase, PointReply):
        return f"Duplicator answers the point picked on {phase.side} with a point on {_other_side(phase.side)}"
    if isinstance(phase, SetReply):
        return f"Duplicator answers the set picked on {phase.side} with an admissible set on {_other_side(phase.side)}"
    if isinstance(phase, TCSetReply):
        return ("Duplicator picks a set with the pebble conditions a_i in A and a_j not in A "
                f"mirrored on {_other_side(phase.side)}")
    if isinstance(phase, TCPairPick):
        return "Spoiler picks b_{s+1} in B, b_{s+2} not in B"
    if isinstance(phase, TCPairReply):
        return "Duplicator answers with a_{s+1} in A, a_{s+2} not in A"
    if isinstance(phase, LFPSetReply):
        return "Duplicator answers with an admissible proper subset of the left domain"
    if isinstance(phase, LFPPointPick):
        return "Spoiler picks a_{s+1} outside the left set"
    if isinstance(phase, LFPPointReply):
        return "Duplicator answers with b_{s+1} outside the right set"
    if isinstance(phase, GFPSetReply):
        return "Duplicator answers with a nonempty admissible proper subset of the right domain"
    if isinstance(phase, GFPPointPick):
        return "Spoiler picks b_{s+1} inside the right set"
    if isinstance(phase, GFPPointReply):
        return "Duplicator answers with a_{s+1} inside the left set"
    return ""


_RULE_TEXT = {
    TCInit: "a set A with a_i in A and a_j not in A, once two pebbles are on the board",
    TCPair: "a pair with the first element inside the set and the second outside",
    LFPInit: "an admissible proper subset of the right domain missing some pebble b_i",
    GFPInit: "an admissible proper subset of the left domain containing some pebble a_i",
    PointPick: "a point in the structure the current phase designates",
    SetPick: "an admissible set satisfying the current phase's conditions",
}


def apply_move(state: GameState, move: Move) -> GameState:
    """Validate the move against legal_moves and advance the state; a round
    completes (and rounds_left drops) when the Duplicator reply lands."""
    if move not in legal_moves(state):
        rule = _RULE_TEXT.get(type(move), "a legal move for this phase")
        raise IllegalMove(f"illegal move {move.encode()!r}: the rule requires {rule}")
    return _apply(state, move)


def _apply(state: GameState, move: Move) -> GameState:
    cfg = state.config
    phase = state.phase

    def advance(new_phase) -> GameState:
        return GameState(cfg, state.rounds_left, state.elem_pebbles,
                         state.set_pebbles, new_phase, state.violated)

    def complete(new_pairs=(), new_sets=()) -> GameState:
        nxt = GameState(cfg, state.rounds_left - 1,
                        state.elem_pebbles + tuple(new_pairs),
                        state.set_pebbles + tuple(new_sets),
                        SpoilerTurn(), state.violated)
        return _with_violation(nxt, fresh_elems=len(new_pairs),
                               fresh_sets=len(new_sets))

    if isinstance(phase, SpoilerTurn):
        if isinstance(move, PointPick):
            return advance(PointReply(move.side, move.elem))
        if isinstance(move, SetPick):
            return advance(SetReply(move.side, move.mask))
        if isinstance(move, TCInit):
            return advance(TCSetReply(move.side, move.i, move.j, move.mask))
        if isinstance(move, LFPInit):
            return advance(LFPSetReply(move.mask))
        if isinstance(move, GFPInit):
            return advance(GFPSetReply(move.mask))
    if isinstance(phase, PointReply) and isinstance(move, PointPick):
        if phase.side == "L":
            pair = (phase.elem, move.elem)
        else:
            pair = (move.elem, phase.elem)
        return complete(new_pairs=[pair])
    if isinstance(phase, SetReply) and isinstance(move, SetPick):
        if phase.side == "L":
            pair = (phase.mask, move.mask)
        else:
            pair = (move.mask, phase.mask)
        return complete(new_sets=[pair])
    if isinstance(phase, TCSetReply) and isinstance(move, SetPick):
        return advance(TCPairPick(phase.side, phase.mask, move.mask))
    if isinstance(phase, TCPairPick) and isinstance(move, TCPair):
        return advance(TCPairReply(phase.side, phase.init_mask, phase.reply_mask,
                                   move.inside, move.outside))
    if isinstance(phase, TCPairReply) and isinstance(move, TCPair):
        # The sets are forgotten; only the two pebble pairs remain.
        if phase.side == "L":
            pairs = [(move.inside, phase.inside), (move.outside, phase.outside)]
        else:
            pairs = [(phase.inside, move.inside), (phase.outside, move.outside)]
        return complete(new_pairs=pairs)
    if isinstance(phase, LFPSetReply) and isinstance(move, SetPick):
        return advance(LFPPointPick(move.mask, phase.right_mask))
    if isinstance(phase, LFPPointPick) and isinstance(move, PointPick):
        return advance(LFPPointReply(phase.left_mask, phase.right_mask, move.elem))
    if isinstance(phase, LFPPointReply) and isinstance(move, PointPick):
        return complete(new_pairs=[(phase.left_elem, move.elem)],
                        new_sets=[(phase.left_mask, phase.right_mask)])
    if isinstance(phase, GFPSetReply) and isinstance(move, SetPick):
        return advance(GFPPointPick(phase.left_mask, move.mask))
    if isinstance(phase, GFPPointPick) and isinstance(move, PointPick):
        return advance(GFPPointReply(phase.left_mask, phase.right_mask, move.elem))
    if isinstance(phase, GFPPointReply) and isinstance(move, PointPick):
        return complete(new_pairs=[(move.elem, phase.right_elem)],
                        new_sets=[(phase.left_mask, phase.right_mask)])
    raise IllegalMove(f"move {move.encode()!r} does not fit phase {phase!r}")


# Winner search ---------------------------------------------------------------

DEFAULT_BUDGET = 2_000_000


class _Search:
    def __init__(self, budget: int):
        self.budget = budget
        self.memo: dict = {}
        self.visited = 0

    def value(self, state: GameState) -> Player:
        decided = status(state)
        if decided is not None:
            return decided
        key = state.key()
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.visited += 1
        if self.visited > self.budget:
            raise GameBudgetExceeded(
                f"game search exceeded {self.budget} positions")
        mover = state.mover
        result = mover.other
        moves = legal_moves(state)
        for move in moves:
            if self.value(_apply(state, move)) == mover:
                result = mover
                break
        self.memo[key] = result
        return result


def winner_from(state: GameState, budget: int = DEFAULT_BUDGET,
                search: _Search | None = None) -> Player:
    search = search or _Search(budget)
    return search.value(state)


def winner(config: GameConfig, budget: int = DEFAULT_BUDGET) -> Player:
    """Exact game value of the n-round game by exhaustive alternating search
    with memoization.  Intended scale: frames of at most 8 elements and at
    most 3 rounds for the set-move games; beyond the position budget the
    search raises GameBudgetExceeded rather than guessing."""
    return winner_from(initial_state(config), budget)


def optimal_move(state: GameState, budget: int = DEFAULT_BUDGET,
                 search: _Search | None = None) -> Move:
    """A move preserving the mover's game value when one exists, otherwise
    any legal move; ties break on the lexicographically least encoding."""
    moves = legal_moves(state)
    if not moves:
        raise IllegalMove("no legal move available")
    search = search or _Search(budget)
    value = search.value(state)
    ordered = sorted(moves, key=lambda m: m.encode())
    # When the mover is losing, every move preserves the (opponent's) value,
    # so the first encoded move wins the tie-break either way.
    for move in ordered:
        if search.value(_apply(state, move)) == value:
            return move
    return ordered[0]


def n_equivalent(logic: Logic, n: int, left: Frame, right: Frame,
                 budget: int = DEFAULT_BUDGET) -> bool:
    """True iff Duplicator wins the n-round game on the bare frames."""
    cfg = GameConfig(logic, n, ParamFrame(left), ParamFrame(right))
    return winner(cfg, budget) is Player.DUPLICATOR
