"""Model checking for all four logics on frames.

`evaluate` implements the admissible-set clauses: set quantifiers, TC and
LFP range over the frame's family (the Full family recovers the standard
semantics).  `eval_tc_path` and `eval_lfp_kleene` are the independent
path-reachability and Kleene-iteration oracles for Full frames.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import NotStandard, StructureError, UnboundVariable
from .structures import Frame
from .syntax import (
    GFP, LFP, TC, And, Eq, ExistsElem, ExistsSet, ForallElem, ForallSet,
    Formula, Implies, Not, Or, RelAtom, SetAtom, Top, check_positive,
    free_variables,
)


@dataclass
class Assignment:
    """Partial valuation: element vars to elements, set vars to admissible
    sets (bit masks)."""

    elem: dict[str, int] = field(default_factory=dict)
    sets: dict[str, int] = field(default_factory=dict)

    @staticmethod
    def parse(text: str, frame: Frame) -> "Assignment":
        """Parse "x=0, X={1,2}" into an assignment over the frame; commas
        inside braces separate set elements."""
        g = Assignment()
        parts, depth, cur = [], 0, ""
        for ch in text:
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
            else:
                cur += ch
        parts.append(cur)
        for part in parts:
            part = part.strip()
            if not part:
                continue
            name, eq, rest = part.partition("=")
            name, rest = name.strip(), rest.strip()
            if not eq or not name:
                raise StructureError(f"bad binding {part!r}")
            if rest.startswith("{"):
                if not rest.endswith("}"):
                    raise StructureError(f"bad set binding {part!r}")
                inner = rest[1:-1].strip()
                mask = 0
                for e in inner.split(","):
                    if e.strip():
                        mask |= 1 << int(e)
                g.sets[name] = mask
            else:
                g.elem[name] = int(rest)
        return g


class _Ctx:
    """Per-call evaluation context: the frame, a mutable environment, and
    caches for fixpoint/transitive-closure subformulas and closed
    subformulas (whose truth is fixed per frame)."""

    __slots__ = ("frame", "elem", "sets", "tc_cache", "lfp_cache", "closed_cache")

    def __init__(self, frame: Frame, elem: dict[str, int], sets: dict[str, int]):
        self.frame = frame
        self.elem = elem
        self.sets = sets
        self.tc_cache: dict = {}
        self.lfp_cache: dict = {}
        self.closed_cache = _closed_cache_for(frame)

    def outer_key(self, phi: Formula, skip_elem: tuple[str, ...],
                  skip_sets: tuple[str, ...] = ()):
        ev, sv = free_variables(phi)
        return (
            tuple(sorted((v, self.elem[v]) for v in ev if v not in skip_elem)),
            tuple(sorted((v, self.sets[v]) for v in sv if v not in skip_sets)),
        )


def evaluate(frame: Frame, phi: Formula, g: Assignment | None = None) -> bool:
    """Truth of phi on the frame under g, per the frame semantics."""
    g = g or Assignment()
    ev, sv = free_variables(phi)
    for v in ev:
        if v not in g.elem:
            raise UnboundVariable(f"element variable {v} unbound")
        if not (0 <= g.elem[v] < frame.size):
            raise StructureError(f"assignment sends {v} outside the domain")
    for v in sv:
        if v not in g.sets:
            raise UnboundVariable(f"set variable {v} unbound")
        if not frame.in_family(g.sets[v]):
            raise StructureError(f"assignment sends {v} to a non-admissible set")
    ctx = _Ctx(frame, dict(g.elem), dict(g.sets))
    return _eval(ctx, phi)


_CLOSED_CACHES: dict[Frame, dict] = {}


def _closed_cache_for(frame: Frame) -> dict:
    # Memoized truth of closed subformulas, shared across calls per frame.
    cache = _CLOSED_CACHES.get(frame)
    if cache is None:
        if len(_CLOSED_CACHES) > 256:
            _CLOSED_CACHES.clear()
        cache = _CLOSED_CACHES.setdefault(frame, {})
    return cache


def _eval(ctx: _Ctx, phi: Formula) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, RelAtom):
        return tuple(ctx.elem[a] for a in phi.args) in ctx.frame.tuples(phi.symbol)
    if isinstance(phi, Eq):
        return ctx.elem[phi.left] == ctx.elem[phi.right]
    if isinstance(phi, SetAtom):
        return bool(ctx.sets[phi.setvar] >> ctx.elem[phi.arg] & 1)
    if isinstance(phi, Not):
        return not _eval(ctx, phi.body)
    if isinstance(phi, And):
        return _eval(ctx, phi.left) and _eval(ctx, phi.right)
    if isinstance(phi, Or):
        return _eval(ctx, phi.left) or _eval(ctx, phi.right)
    if isinstance(phi, Implies):
        return not _eval(ctx, phi.left) or _eval(ctx, phi.right)
    closed = None
    if isinstance(phi, (ExistsElem, ForallElem, ExistsSet, ForallSet, TC, LFP, GFP)):
        fe, fs = free_variables(phi)
        if not fe and not fs:
            hit = ctx.closed_cache.get(phi)
            if hit is not None:
                return hit
            closed = phi
    result = _eval_quantified(ctx, phi)
    if closed is not None:
        ctx.closed_cache[closed] = result
    return result


def _eval_quantified(ctx: _Ctx, phi: Formula) -> bool:
    if isinstance(phi, (ExistsElem, ForallElem)):
        want = isinstance(phi, ExistsElem)
        old = ctx.elem.get(phi.var)
        try:
            for a in range(ctx.frame.size):
                ctx.elem[phi.var] = a
                if _eval(ctx, phi.body) == want:
                    return want
        finally:
            _restore(ctx.elem, phi.var, old)
        return not want
    if isinstance(phi, (ExistsSet, ForallSet)):
        want = isinstance(phi, ExistsSet)
        old = ctx.sets.get(phi.var)
        try:
            for mask in ctx.frame.family():
                ctx.sets[phi.var] = mask
                if _eval(ctx, phi.body) == want:
                    return want
        finally:
            _restore(ctx.sets, phi.var, old)
        return not want
    if isinstance(phi, TC):
        return _eval_tc(ctx, phi)
    if isinstance(phi, LFP):
        return _eval_lfp(ctx, phi)
    if isinstance(phi, GFP):
        return _eval_gfp(ctx, phi)
    raise TypeError(f"unknown formula node {phi!r}")


def _restore(env: dict, key: str, old):
    if old is None:
        env.pop(key, None)
    else:
        env[key] = old


def _edge_pairs(ctx: _Ctx, phi: TC) -> list[tuple[int, int]]:
    """All (a, b) with body(a, b) true, under the surrounding assignment."""
    n = ctx.frame.size
    old_x, old_y = ctx.elem.get(phi.x), ctx.elem.get(phi.y)
    pairs = []
    try:
        for a in range(n):
            ctx.elem[phi.x] = a
            for b in range(n):
                ctx.elem[phi.y] = b
                if _eval(ctx, phi.body):
                    pairs.append((a, b))
    finally:
        _restore(ctx.elem, phi.x, old_x)
        _restore(ctx.elem, phi.y, old_y)
    return pairs


def _eval_tc(ctx: _Ctx, phi: TC) -> bool:
    # For all admissible A: g(u) ∈ A and A closed under the body implies
    # g(v) ∈ A.  Equivalently g(v) lies in the intersection of all closed
    # admissible sets containing g(u); that map is cached per assignment of
    # the body's other free variables.
    key = (id(phi),) + ctx.outer_key(phi.body, (phi.x, phi.y))
    entry = ctx.tc_cache.get(key)
    if entry is None:
        pairs = _edge_pairs(ctx, phi)
        closed = []
        for mask in ctx.frame.family():
            if all(not (mask >> a & 1) or (mask >> b & 1) for a, b in pairs):
                closed.append(mask)
        must = {}
        for z in range(ctx.frame.size):
            inter = (1 << ctx.frame.size) - 1
            for mask in closed:
                if mask >> z & 1:
                    inter &= mask
            must[z] = inter
        entry = must
        ctx.tc_cache[key] = entry
    u, v = ctx.elem[phi.u], ctx.elem[phi.v]
    return bool(entry[u] >> v & 1)


def _body_image(ctx: _Ctx, phi, mask: int) -> int:
    """{a : body(a, X:=mask)} as a mask."""
    old_x = ctx.elem.get(phi.var)
    old_s = ctx.sets.get(phi.setvar)
    ctx.sets[phi.setvar] = mask
    out = 0
    try:
        for a in range(ctx.frame.size):
            ctx.elem[phi.var] = a
            if _eval(ctx, phi.body):
                out |= 1 << a
    finally:
        _restore(ctx.elem, phi.var, old_x)
        _restore(ctx.sets, phi.setvar, old_s)
    return out


def _eval_lfp(ctx: _Ctx, phi: LFP) -> bool:
    # g(y) belongs to every admissible prefixed point of the body operator.
    key = (id(phi),) + ctx.outer_key(phi.body, (phi.var,), (phi.setvar,))
    inter = ctx.lfp_cache.get(key)
    if inter is None:
        inter = (1 << ctx.frame.size) - 1
        for mask in ctx.frame.family():
            if _body_image(ctx, phi, mask) & ~mask == 0:
                inter &= mask
        ctx.lfp_cache[key] = inter
    return bool(inter >> ctx.elem[phi.arg] & 1)


def _eval_gfp(ctx: _Ctx, phi: GFP) -> bool:
    # Dual clause: some admissible postfixed point contains g(y).
    key = ("g", id(phi)) + ctx.outer_key(phi.body, (phi.var,), (phi.setvar,))
    union = ctx.lfp_cache.get(key)
    if union is None:
        union = 0
        for mask in ctx.frame.family():
            if mask & ~_body_image(ctx, phi, mask) == 0:
                union |= mask
        ctx.lfp_cache[key] = union
    return bool(union >> ctx.elem[phi.arg] & 1)


# ---------------------------------------------------------------------------
# Independent oracles (Full frames only)


def eval_tc_path(frame: Frame, g: Assignment, phi: TC) -> bool:
    """Path semantics: a finite body-path joins g(u) to g(v); the length-1
    path makes this reflexive.  Breadth-first reachability, no set clause."""
    if not frame.is_full:
        raise NotStandard("path semantics applies to Full frames only")
    ctx = _Ctx(frame, dict(g.elem), dict(g.sets))
    u, v = ctx.elem[phi.u], ctx.elem[phi.v]
    if u == v:
        return True
    succs: dict[int, list[int]] = {}
    for a, b in _edge_pairs(ctx, phi):
        succs.setdefault(a, []).append(b)
    seen = {u}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        for b in succs.get(a, ()):
            if b == v:
                return True
            if b not in seen:
                seen.add(b)
                queue.append(b)
    return False


def eval_lfp_kleene(frame: Frame, g: Assignment, phi: LFP) -> bool:
    """Kleene iteration from the empty set up to the least fixed point."""
    if not frame.is_full:
        raise NotStandard("Kleene iteration applies to Full frames only")
    if not check_positive(phi.body, phi.setvar):
        raise StructureError(f"body not positive in {phi.setvar}")
    ctx = _Ctx(frame, dict(g.elem), dict(g.sets))
    current = 0
    while True:
        nxt = _body_image(ctx, phi, current)
        if nxt == current:
            break
        current = nxt
    return bool(current >> ctx.elem[phi.arg] & 1)
