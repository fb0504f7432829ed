"""Seeded random generators, bounded formula enumeration, and the
independent oracles used by the property and acceptance suites.

Every oracle here avoids the module it is meant to check: reachability and
Kleene iteration live in evaluate, shape checking in structures, canonical
forest codes and isomorphism search here, with no reference to the games.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace

from .errors import EnumerationBudget, StructureError
from .structures import Frame, TreeStructure, check_forest_shape, labels_of, mask_of
from .syntax import (
    LFP, TC, And, Eq, ExistsElem, ExistsSet, ForallElem, ForallSet,
    Formula, Implies, Logic, Not, Or, RelAtom, SetAtom, Top, Vocabulary,
    tree_vocabulary,
)


@dataclass(frozen=True)
class GenConfig:
    """Generator settings; identical config and seed give identical output."""

    seed: int = 0
    min_size: int = 1
    max_size: int = 5
    vocab: Vocabulary = field(default_factory=tree_vocabulary)
    logic: Logic = Logic.FO
    max_depth: int = 2        # quantifier depth bound for random formulas
    max_nodes: int = 10       # AST size bound for random formulas

    def rng(self) -> random.Random:
        return random.Random(self.seed)


# ---------------------------------------------------------------------------
# Random structures


def random_frame(cfg: GenConfig, rng: random.Random | None = None,
                 listed: bool = False) -> Frame:
    """Arbitrary frame over cfg.vocab: independently sampled tuples, Full or
    randomly listed admissible family."""
    rng = rng or cfg.rng()
    n = rng.randint(cfg.min_size, cfg.max_size)
    density = rng.uniform(0.1, 0.45)
    interp = {}
    for name, arity in cfg.vocab.relations:
        tuples = [t for t in itertools.product(range(n), repeat=arity)
                  if rng.random() < density]
        interp[name] = tuples
    admissible = None
    if listed:
        count = rng.randint(1, min(8, 1 << n))
        admissible = {rng.randrange(1 << n) for _ in range(count)}
    return Frame.make(cfg.vocab, n, interp, admissible)


def _random_tree_tables(cfg: GenConfig, rng: random.Random):
    n = rng.randint(cfg.min_size, cfg.max_size)
    parent = {i: rng.randrange(i) for i in range(1, n)}
    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for c in sorted(parent):
        children[parent[c]].append(c)
    return n, parent, children


def _tree_interp(n: int, parent: dict[int, int], children: dict[int, list[int]],
                 vocab: Vocabulary, rng: random.Random):
    lt = set()
    for c, p in parent.items():
        a = c
        while a in parent:
            a = parent[a]
            lt.add((a, c))
    slt = set()
    for kids in children.values():
        for i in range(len(kids)):
            for j in range(i + 1, len(kids)):
                slt.add((kids[i], kids[j]))
    root = next(i for i in range(n) if i not in parent)
    interp: dict[str, list] = {"lt": sorted(lt), "slt": sorted(slt), "R": [(root,)]}
    for name, arity in vocab.relations:
        if arity == 1 and name != "R":
            interp[name] = [(i,) for i in range(n) if rng.random() < 0.4]
    return interp


def random_tree(cfg: GenConfig, rng: random.Random | None = None) -> TreeStructure:
    """Uniform-ish random ordered labeled tree (always passes shape checks)."""
    rng = rng or cfg.rng()
    n, parent, children = _random_tree_tables(cfg, rng)
    interp = _tree_interp(n, parent, children, cfg.vocab, rng)
    return TreeStructure(Frame.make(cfg.vocab, n, interp))


NEAR_TREE_AXIOMS = tuple(f"T{i}" for i in range(1, 11))


def random_near_tree(cfg: GenConfig, violate: str,
                     rng: random.Random | None = None) -> Frame:
    """A frame guaranteed to fail the requested tree axiom (consequences of
    the damage may fail too, e.g. a T2 self-loop also breaks T3)."""
    rng = rng or cfg.rng()
    vocab = cfg.vocab
    if violate not in NEAR_TREE_AXIOMS:
        raise ValueError(f"unknown axiom {violate!r}")

    def labeled(interp, n):
        for name, arity in vocab.relations:
            if arity == 1 and name not in interp:
                interp[name] = [(i,) for i in range(n) if rng.random() < 0.4]
        return Frame.make(vocab, n, interp)

    if violate == "T1":
        # Chain of three with the transitive pair removed.
        return labeled({"lt": [(0, 1), (1, 2)], "slt": []}, 3)
    if violate == "T2":
        tree = random_tree(replace(cfg, min_size=2), rng).frame
        a = rng.randrange(tree.size)
        interp = {k: list(v) for k, v in tree.interp.items()}
        interp["lt"].append((a, a))
        return Frame.make(vocab, tree.size, interp)
    if violate == "T3":
        # x<y with no immediate child of x below y: dense-looking gap.
        return labeled({"lt": [(0, 3), (0, 2), (2, 3), (0, 1), (1, 2)], "slt": []}, 4)
    if violate == "T4":
        return labeled({"lt": [], "slt": []}, 2)
    if violate == "T5":
        # Diamond: two incomparable parents of one node.
        return labeled({"lt": [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)],
                        "slt": [(1, 2)]}, 4)
    if violate == "T6":
        return labeled({"lt": [(0, 1), (0, 2), (0, 3)],
                        "slt": [(1, 2), (2, 3), (3, 1)]}, 4)
    if violate == "T7":
        return labeled({"lt": [(0, 1), (0, 2)], "slt": [(1, 2), (1, 1)]}, 3)
    if violate == "T8":
        # Sibling order with no immediate next sibling between 1 and 4.
        return labeled({"lt": [(0, 1), (0, 2), (0, 3), (0, 4)],
                        "slt": [(1, 4), (1, 3), (3, 4), (1, 2), (2, 3)]}, 5)
    if violate == "T9":
        return labeled({"lt": [(0, 1), (0, 2)], "slt": [(1, 2), (2, 1)]}, 3)
    # T10: two children of one parent left unordered.
    return labeled({"lt": [(0, 1), (0, 2)], "slt": []}, 3)


# ---------------------------------------------------------------------------
# Random formulas


_ELEM_POOL = ("x", "y", "z", "w", "x1", "y1", "z1", "w1")
_SET_POOL = ("X", "Y", "Z", "X1", "Y1")


def random_formula(cfg: GenConfig, rng: random.Random | None = None,
                   free_elem: tuple[str, ...] = ("x",),
                   free_sets: tuple[str, ...] = ()) -> Formula:
    """Well-formed, logic-admissible random formula whose free variables lie
    within the given pools; LFP bodies respect positivity."""
    rng = rng or cfg.rng()
    logic = cfg.logic
    if free_sets and logic not in (Logic.MSO, Logic.FOLFP1):
        raise ValueError(f"{logic.value} formulas cannot have free set variables")
    budget = [rng.randint(3, max(3, cfg.max_nodes))]

    # polarity maps each fixpoint-bound set variable to whether the current
    # position is positive relative to its own binder
    def pick_atom(evars, svars, polarity):
        choices = ["top", "eq", "rel"]
        usable_sets = [s for s in svars if polarity.get(s, True)]
        if usable_sets and logic in (Logic.MSO, Logic.FOLFP1):
            choices += ["setatom", "setatom"]
        kind = rng.choice(choices)
        if kind == "top" or not evars:
            return Top()
        if kind == "eq":
            return Eq(rng.choice(evars), rng.choice(evars))
        if kind == "setatom":
            return SetAtom(rng.choice(usable_sets), rng.choice(evars))
        name, arity = rng.choice(cfg.vocab.relations)
        return RelAtom(name, tuple(rng.choice(evars) for _ in range(arity)))

    def fresh_from(pool, used):
        for v in pool:
            if v not in used:
                return v
        return f"{pool[0]}{len(used)}"

    def flipped(polarity):
        return {v: not p for v, p in polarity.items()}

    def build(qd, evars, svars, polarity) -> Formula:
        budget[0] -= 1
        kinds = ["atom", "atom"]
        if budget[0] > 0:
            kinds += ["not", "and", "or", "implies"]
            if qd > 0:
                kinds += ["exists", "forall"]
                if logic == Logic.MSO:
                    kinds += ["exists_set", "forall_set"]
                if logic == Logic.FOTC1 and evars:
                    kinds += ["tc"]
                if logic == Logic.FOLFP1 and evars:
                    kinds += ["lfp"]
        kind = rng.choice(kinds)
        if kind == "atom":
            return pick_atom(evars, svars, polarity)
        if kind == "not":
            return Not(build(qd, evars, svars, flipped(polarity)))
        if kind in ("and", "or"):
            cls = And if kind == "and" else Or
            return cls(build(qd, evars, svars, polarity),
                       build(qd, evars, svars, polarity))
        if kind == "implies":
            return Implies(build(qd, evars, svars, flipped(polarity)),
                           build(qd, evars, svars, polarity))
        if kind in ("exists", "forall"):
            v = fresh_from(_ELEM_POOL, evars)
            cls = ExistsElem if kind == "exists" else ForallElem
            return cls(v, build(qd - 1, evars + (v,), svars, polarity))
        if kind in ("exists_set", "forall_set"):
            s = fresh_from(_SET_POOL, svars)
            cls = ExistsSet if kind == "exists_set" else ForallSet
            sub = dict(polarity)
            sub.pop(s, None)  # rebinding releases the constraint
            return cls(s, build(qd - 1, evars, svars + (s,), sub))
        if kind == "tc":
            x = fresh_from(_ELEM_POOL, evars)
            y = fresh_from(_ELEM_POOL, evars + (x,))
            body = build(qd - 1, evars + (x, y), svars, polarity)
            return TC(x, y, body, rng.choice(evars), rng.choice(evars))
        # lfp: body must be positive in the new set variable
        s = fresh_from(_SET_POOL, svars)
        x = fresh_from(_ELEM_POOL, evars)
        sub = dict(polarity)
        sub[s] = True
        body = build(qd - 1, evars + (x,), svars + (s,), sub)
        return LFP(s, x, body, rng.choice(evars))

    return build(cfg.max_depth, tuple(free_elem), tuple(free_sets), {})


# ---------------------------------------------------------------------------
# Bounded formula enumeration


def _truth_vector(formula: Formula, contexts) -> int:
    """Truth values across the contexts packed into a bitmask."""
    from .evaluate import Assignment, evaluate
    out = 0
    for i, (frame, elem, sets) in enumerate(contexts):
        if evaluate(frame, formula, Assignment(elem=dict(elem), sets=dict(sets))):
            out |= 1 << i
    return out


def enumerate_formulas(vocab: Vocabulary, qdepth: int, var_pool: tuple[str, ...],
                       bool_depth: int, logic: Logic,
                       set_pool: tuple[str, ...] = ("X", "Y", "Z"),
                       max_count: int = 100_000,
                       dedup_frames: tuple[Frame, ...] | None = None) -> list[Formula]:
    """Deterministic exhaustive stream of closed formulas of quantifier depth
    <= qdepth, Boolean structure normalized to negation over conjunction.

    Purely syntactic by default (bounded by `bool_depth` closure rounds and
    `max_count`).  With `dedup_frames`, intermediate levels are deduplicated
    by truth vectors over every (frame, assignment) context and the Boolean
    closure runs to saturation, which keeps the stream small while preserving
    every distinguishing power over those frames.
    """
    if logic in (Logic.FOTC1, Logic.FOLFP1):
        raise EnumerationBudget("enumeration covers FO and MSO only")
    if logic == Logic.FO:
        set_pool = ()

    def contexts_for(evars, svars):
        ctxs = []
        for frame in dedup_frames:
            elem_choices = itertools.product(range(frame.size), repeat=len(evars))
            for elems in elem_choices:
                base = dict(zip(evars, elems))
                for masks in itertools.product(list(frame.family()), repeat=len(svars)):
                    ctxs.append((frame, base, dict(zip(svars, masks))))
        return ctxs

    memo: dict = {}

    def guard(count: int):
        if count > max_count:
            raise EnumerationBudget(f"enumeration exceeded {max_count} formulas")

    def level(k: int, ne: int, ns: int) -> list[Formula]:
        key = (k, ne, ns)
        if key in memo:
            return memo[key]
        evars = var_pool[:ne]
        svars = set_pool[:ns]
        base: list[Formula] = [Top()]
        for name, arity in vocab.relations:
            base += [RelAtom(name, args)
                     for args in itertools.product(evars, repeat=arity)]
        base += [Eq(a, b) for a, b in itertools.combinations(evars, 2)]
        if logic == Logic.MSO:
            base += [SetAtom(s, v) for s in svars for v in evars]
        if k > 0:
            if ne < len(var_pool):
                for body in level(k - 1, ne + 1, ns):
                    base.append(ExistsElem(var_pool[ne], body))
            if logic == Logic.MSO and ns < len(set_pool):
                for body in level(k - 1, ne, ns + 1):
                    base.append(ExistsSet(set_pool[ns], body))

        if dedup_frames is None:
            pool = list(dict.fromkeys(base))
            for _ in range(bool_depth):
                guard(len(pool))
                seen = set(pool)
                new = []
                for f in pool:
                    nf = Not(f)
                    if nf not in seen:
                        seen.add(nf)
                        new.append(nf)
                for f, g in itertools.combinations(pool, 2):
                    c = And(f, g)
                    if c not in seen:
                        seen.add(c)
                        new.append(c)
                    guard(len(pool) + len(new))
                pool += new
            result = pool
        else:
            # Deduplicate by truth vector over every (frame, assignment)
            # context and close the Boolean level to saturation: every
            # Boolean combination's vector keeps a formula representative.
            ctxs = contexts_for(evars, svars)
            full = (1 << len(ctxs)) - 1
            by_vec: dict[int, Formula] = {}
            for f in base:
                by_vec.setdefault(_truth_vector(f, ctxs), f)
            changed = True
            while changed:
                guard(len(by_vec))
                changed = False
                items = list(by_vec.items())
                for vec, f in items:
                    nv = ~vec & full
                    if nv not in by_vec:
                        by_vec[nv] = Not(f)
                        changed = True
                for (v1, f1), (v2, f2) in itertools.combinations(items, 2):
                    cv = v1 & v2
                    if cv not in by_vec:
                        by_vec[cv] = And(f1, f2)
                        changed = True
            result = list(by_vec.values())
        memo[key] = result
        return result

    return level(qdepth, 0, 0)


def distinguishing_formula(left: Frame, right: Frame, logic: Logic, qdepth: int,
                           var_pool: tuple[str, ...] = ("x1", "x2", "x3"),
                           bool_depth: int = 2) -> Formula | None:
    """First enumerated closed sentence of quantifier depth <= qdepth that
    the two frames disagree on, else None."""
    from .evaluate import evaluate
    formulas = enumerate_formulas(left.vocab, qdepth, var_pool, bool_depth,
                                  logic, dedup_frames=(left, right))
    for f in formulas:
        if evaluate(left, f) != evaluate(right, f):
            return f
    return None


# ---------------------------------------------------------------------------
# Canonical codes and isomorphism


def canonical_tree_code(frame: Frame) -> str:
    """Label-annotated nested-parenthesis code of an ordered labeled forest;
    equal codes characterize isomorphism of ordered forests."""
    if not check_forest_shape(frame, require_root_labels=False):
        raise StructureError("canonical codes need a forest-shaped frame")
    lt = {tuple(t) for t in frame.tuples("lt")}
    slt = {tuple(t) for t in frame.tuples("slt")}
    n = frame.size
    covers = {(a, b) for a, b in lt
              if not any((a, c) in lt and (c, b) in lt for c in range(n))}
    parent = {b: a for a, b in covers}
    roots = [x for x in range(n) if x not in parent]

    def ordered(group: list[int]) -> list[int]:
        return sorted(group, key=lambda v: sum((u, v) in slt for u in group))

    def code(v: int) -> str:
        kids = ordered([c for c in range(n) if parent.get(c) == v])
        labels = ",".join(sorted(labels_of(frame, v)))
        return f"({labels}{''.join(code(c) for c in kids)})"

    return "".join(code(r) for r in ordered(roots))


def frames_isomorphic(left: Frame, right: Frame) -> bool:
    """Brute-force isomorphism including the admissible families (small
    frames only)."""
    if left.vocab != right.vocab or left.size != right.size:
        return False
    if (left.admissible is None) != (right.admissible is None):
        return False
    n = left.size
    for perm in itertools.permutations(range(n)):
        if all(
            frozenset(tuple(perm[e] for e in t) for t in left.tuples(name))
            == right.tuples(name)
            for name, _ in left.vocab.relations
        ):
            if left.admissible is None:
                return True
            mapped = {mask_of(perm[e] for e in _bits(m)) for m in left.admissible}
            if mapped == set(right.admissible):
                return True
    return False


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def relabeled_copy_with_map(frame: Frame, rng: random.Random) -> tuple[Frame, list[int]]:
    """Isomorphic copy under a random permutation, returning the permutation
    (old element -> new element)."""
    perm = list(range(frame.size))
    rng.shuffle(perm)
    interp = {name: [tuple(perm[e] for e in t) for t in tuples]
              for name, tuples in frame.rel}
    admissible = None
    if frame.admissible is not None:
        admissible = {mask_of(perm[e] for e in _bits(m)) for m in frame.admissible}
    return Frame.make(frame.vocab, frame.size, interp, admissible), perm


def relabeled_copy(frame: Frame, rng: random.Random) -> Frame:
    return relabeled_copy_with_map(frame, rng)[0]
