"""Formula ASTs over a relational vocabulary, the concrete grammar, and
structural analyses: quantifier depth, free variables, substitution,
positivity, and negation normal form with greatest fixpoints.

Element variables are lowercase-initial identifiers, set variables are
uppercase-initial.  Formulas are immutable values and safe to share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

from .errors import LogicMismatch, NotSubstitutable, ParseError


class Logic(str, Enum):
    FO = "fo"
    MSO = "mso"
    FOTC1 = "fotc1"
    FOLFP1 = "folfp1"


@dataclass(frozen=True)
class Vocabulary:
    """Purely relational vocabulary: (symbol, arity) pairs, arities >= 1."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.relations:
            if name in seen:
                raise ValueError(f"duplicate relation symbol {name!r}")
            if arity < 1:
                raise ValueError(f"arity of {name!r} must be positive")
            seen.add(name)

    @cached_property
    def arity(self) -> dict[str, int]:
        return dict(self.relations)

    def __contains__(self, name: str) -> bool:
        return name in self.arity

    def extend(self, extra: tuple[tuple[str, int], ...]) -> "Vocabulary":
        return Vocabulary(self.relations + tuple(extra))


def tree_vocabulary(labels: int = 2) -> Vocabulary:
    """The tree vocabulary: descendant lt, sibling slt, root mark R, P1..Pn."""
    rels = [("lt", 2), ("slt", 2), ("R", 1)]
    rels += [(f"P{i}", 1) for i in range(1, labels + 1)]
    return Vocabulary(tuple(rels))


def is_set_var(name: str) -> bool:
    return name[0].isupper()


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return render_formula(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class RelAtom(Formula):
    symbol: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class SetAtom(Formula):
    setvar: str
    arg: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ExistsElem(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallElem(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class TC(Formula):
    """[TC_{x y} body](u, v): x, y bound in body; u, v free."""

    x: str
    y: str
    body: Formula
    u: str
    v: str


def _check_positive_body(cls_name: str, setvar: str, body: Formula) -> None:
    if not check_positive(body, setvar):
        raise ValueError(f"{cls_name} body must be positive in {setvar}")


@dataclass(frozen=True)
class LFP(Formula):
    """[LFP_{X x} body](y): X, x bound in body; y free; body positive in X."""

    setvar: str
    var: str
    body: Formula
    arg: str

    def __post_init__(self):
        _check_positive_body("LFP", self.setvar, self.body)


@dataclass(frozen=True)
class GFP(Formula):
    """Dual of LFP; produced by nnf_gfp, also accepted by the grammar."""

    setvar: str
    var: str
    body: Formula
    arg: str

    def __post_init__(self):
        _check_positive_body("GFP", self.setvar, self.body)


BINARY = (And, Or, Implies)
ELEM_QUANT = (ExistsElem, ForallElem)
SET_QUANT = (ExistsSet, ForallSet)


def make_and(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def make_or(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


# ---------------------------------------------------------------------------
# Structural analyses


def quantifier_depth(phi: Formula) -> int:
    """Max nesting where element/set quantifiers, TC, LFP and GFP count 1."""
    if isinstance(phi, (Top, RelAtom, Eq, SetAtom)):
        return 0
    if isinstance(phi, Not):
        return quantifier_depth(phi.body)
    if isinstance(phi, BINARY):
        return max(quantifier_depth(phi.left), quantifier_depth(phi.right))
    if isinstance(phi, ELEM_QUANT + SET_QUANT):
        return 1 + quantifier_depth(phi.body)
    if isinstance(phi, TC):
        return 1 + quantifier_depth(phi.body)
    if isinstance(phi, (LFP, GFP)):
        return 1 + quantifier_depth(phi.body)
    raise TypeError(f"unknown formula node {phi!r}")


@lru_cache(maxsize=None)
def free_variables(phi: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Free (element-vars, set-vars) of phi."""
    if isinstance(phi, Top):
        return frozenset(), frozenset()
    if isinstance(phi, RelAtom):
        return frozenset(phi.args), frozenset()
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right)), frozenset()
    if isinstance(phi, SetAtom):
        return frozenset((phi.arg,)), frozenset((phi.setvar,))
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, BINARY):
        le, ls = free_variables(phi.left)
        re_, rs = free_variables(phi.right)
        return le | re_, ls | rs
    if isinstance(phi, ELEM_QUANT):
        e, s = free_variables(phi.body)
        return e - {phi.var}, s
    if isinstance(phi, SET_QUANT):
        e, s = free_variables(phi.body)
        return e, s - {phi.var}
    if isinstance(phi, TC):
        e, s = free_variables(phi.body)
        return (e - {phi.x, phi.y}) | {phi.u, phi.v}, s
    if isinstance(phi, (LFP, GFP)):
        e, s = free_variables(phi.body)
        return (e - {phi.var}) | {phi.arg}, s - {phi.setvar}
    raise TypeError(f"unknown formula node {phi!r}")


def all_variables(phi: Formula) -> set[str]:
    """Every variable name occurring in phi, bound or free."""
    out: set[str] = set()

    def walk(f: Formula):
        if isinstance(f, RelAtom):
            out.update(f.args)
        elif isinstance(f, Eq):
            out.update((f.left, f.right))
        elif isinstance(f, SetAtom):
            out.update((f.setvar, f.arg))
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, BINARY):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, ELEM_QUANT + SET_QUANT):
            out.add(f.var)
            walk(f.body)
        elif isinstance(f, TC):
            out.update((f.x, f.y, f.u, f.v))
            walk(f.body)
        elif isinstance(f, (LFP, GFP)):
            out.update((f.setvar, f.var, f.arg))
            walk(f.body)

    walk(phi)
    return out


def fresh_names(taken: set[str], prefix: str):
    """Deterministic stream of names prefix1, prefix2, ... skipping taken."""
    i = 1
    while True:
        name = f"{prefix}{i}"
        if name not in taken:
            taken.add(name)
            yield name
        i += 1


def substitute(phi: Formula, x: str, t: str) -> Formula:
    """Replace free element variable x by element variable t, refusing capture."""
    if x == t:
        return phi
    rep = lambda v: t if v == x else v  # noqa: E731
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, RelAtom):
        return RelAtom(phi.symbol, tuple(rep(a) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(rep(phi.left), rep(phi.right))
    if isinstance(phi, SetAtom):
        return SetAtom(phi.setvar, rep(phi.arg))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, x, t))
    if isinstance(phi, BINARY):
        return type(phi)(substitute(phi.left, x, t), substitute(phi.right, x, t))
    if isinstance(phi, ELEM_QUANT):
        if phi.var == x:
            return phi
        if phi.var == t and x in free_variables(phi.body)[0]:
            raise NotSubstitutable(f"{t} not substitutable for {x}: captured by binder {t}")
        return type(phi)(phi.var, substitute(phi.body, x, t))
    if isinstance(phi, SET_QUANT):
        return type(phi)(phi.var, substitute(phi.body, x, t))
    if isinstance(phi, TC):
        u, v = rep(phi.u), rep(phi.v)
        if x in (phi.x, phi.y):
            return TC(phi.x, phi.y, phi.body, u, v)
        if t in (phi.x, phi.y) and x in free_variables(phi.body)[0]:
            raise NotSubstitutable(f"{t} not substitutable for {x}: captured by TC binder")
        return TC(phi.x, phi.y, substitute(phi.body, x, t), u, v)
    if isinstance(phi, (LFP, GFP)):
        arg = rep(phi.arg)
        if phi.var == x:
            return type(phi)(phi.setvar, phi.var, phi.body, arg)
        if phi.var == t and x in free_variables(phi.body)[0]:
            raise NotSubstitutable(f"{t} not substitutable for {x}: captured by fixpoint binder")
        return type(phi)(phi.setvar, phi.var, substitute(phi.body, x, t), arg)
    raise TypeError(f"unknown formula node {phi!r}")


def substitute_set(phi: Formula, x_set: str, t_set: str) -> Formula:
    """Replace free set variable X by set variable T, refusing capture."""
    if x_set == t_set:
        return phi
    if isinstance(phi, (Top, RelAtom, Eq)):
        return phi
    if isinstance(phi, SetAtom):
        return SetAtom(t_set if phi.setvar == x_set else phi.setvar, phi.arg)
    if isinstance(phi, Not):
        return Not(substitute_set(phi.body, x_set, t_set))
    if isinstance(phi, BINARY):
        return type(phi)(substitute_set(phi.left, x_set, t_set),
                         substitute_set(phi.right, x_set, t_set))
    if isinstance(phi, ELEM_QUANT):
        return type(phi)(phi.var, substitute_set(phi.body, x_set, t_set))
    if isinstance(phi, SET_QUANT):
        if phi.var == x_set:
            return phi
        if phi.var == t_set and x_set in free_variables(phi.body)[1]:
            raise NotSubstitutable(f"{t_set} not substitutable for {x_set}: captured by binder")
        return type(phi)(phi.var, substitute_set(phi.body, x_set, t_set))
    if isinstance(phi, TC):
        return TC(phi.x, phi.y, substitute_set(phi.body, x_set, t_set), phi.u, phi.v)
    if isinstance(phi, (LFP, GFP)):
        if phi.setvar == x_set:
            return phi
        if phi.setvar == t_set and x_set in free_variables(phi.body)[1]:
            raise NotSubstitutable(f"{t_set} not substitutable for {x_set}: captured by fixpoint binder")
        return type(phi)(phi.setvar, phi.var, substitute_set(phi.body, x_set, t_set), phi.arg)
    raise TypeError(f"unknown formula node {phi!r}")


def freshen_bound(phi: Formula, avoid: set[str]) -> Formula:
    """Rename every bound variable whose name lies in `avoid` to a fresh name.

    Free variables are untouched; used to restore no-shared-variable and
    substitutability preconditions.
    """
    taken = set(avoid) | all_variables(phi)
    elem_fresh = fresh_names(taken, "z")
    set_fresh = fresh_names(taken, "Z")

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq, SetAtom)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, BINARY):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, ELEM_QUANT):
            body = walk(f.body)
            if f.var in avoid:
                nv = next(elem_fresh)
                return type(f)(nv, substitute(body, f.var, nv))
            return type(f)(f.var, body)
        if isinstance(f, SET_QUANT):
            body = walk(f.body)
            if f.var in avoid:
                nv = next(set_fresh)
                return type(f)(nv, substitute_set(body, f.var, nv))
            return type(f)(f.var, body)
        if isinstance(f, TC):
            body = walk(f.body)
            x, y = f.x, f.y
            if x in avoid:
                nx = next(elem_fresh)
                body = substitute(body, x, nx)
                x = nx
            if y in avoid:
                ny = next(elem_fresh)
                body = substitute(body, y, ny)
                y = ny
            return TC(x, y, body, f.u, f.v)
        if isinstance(f, (LFP, GFP)):
            body = walk(f.body)
            sv, ev = f.setvar, f.var
            if sv in avoid:
                nsv = next(set_fresh)
                body = substitute_set(body, sv, nsv)
                sv = nsv
            if ev in avoid:
                nev = next(elem_fresh)
                body = substitute(body, ev, nev)
                ev = nev
            return type(f)(sv, ev, body, f.arg)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi)


def check_positive(phi: Formula, x_set: str) -> bool:
    """True iff every free occurrence of X sits under an even number of
    negations; the left side of an implication counts as one negation."""

    def walk(f: Formula, positive: bool) -> bool:
        if isinstance(f, SetAtom):
            return positive or f.setvar != x_set
        if isinstance(f, (Top, RelAtom, Eq)):
            return True
        if isinstance(f, Not):
            return walk(f.body, not positive)
        if isinstance(f, Implies):
            return walk(f.left, not positive) and walk(f.right, positive)
        if isinstance(f, (And, Or)):
            return walk(f.left, positive) and walk(f.right, positive)
        if isinstance(f, ELEM_QUANT):
            return walk(f.body, positive)
        if isinstance(f, SET_QUANT):
            if f.var == x_set:
                return True
            return walk(f.body, positive)
        if isinstance(f, TC):
            return walk(f.body, positive)
        if isinstance(f, (LFP, GFP)):
            if f.setvar == x_set:
                return True
            return walk(f.body, positive)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi, True)


def nnf_gfp(phi: Formula) -> Formula:
    """Negation normal form: negations pushed to atoms, ¬LFP dualized to GFP
    (and vice versa), ¬∃ to ∀¬ and dually.  Evaluation-equivalent on Full
    frames; the input may not contain TC under a negation."""

    def walk(f: Formula, neg: bool, flipped: frozenset[str]) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq)):
            return Not(f) if neg else f
        if isinstance(f, SetAtom):
            eff = neg ^ (f.setvar in flipped)
            return Not(f) if eff else f
        if isinstance(f, Not):
            return walk(f.body, not neg, flipped)
        if isinstance(f, And):
            l, r = walk(f.left, neg, flipped), walk(f.right, neg, flipped)
            return Or(l, r) if neg else And(l, r)
        if isinstance(f, Or):
            l, r = walk(f.left, neg, flipped), walk(f.right, neg, flipped)
            return And(l, r) if neg else Or(l, r)
        if isinstance(f, Implies):
            l = walk(f.left, not neg, flipped)
            r = walk(f.right, neg, flipped)
            return And(l, r) if neg else Or(l, r)
        if isinstance(f, ExistsElem):
            cls = ForallElem if neg else ExistsElem
            return cls(f.var, walk(f.body, neg, flipped))
        if isinstance(f, ForallElem):
            cls = ExistsElem if neg else ForallElem
            return cls(f.var, walk(f.body, neg, flipped))
        if isinstance(f, ExistsSet):
            cls = ForallSet if neg else ExistsSet
            return cls(f.var, walk(f.body, neg, flipped - {f.var}))
        if isinstance(f, ForallSet):
            cls = ExistsSet if neg else ForallSet
            return cls(f.var, walk(f.body, neg, flipped - {f.var}))
        if isinstance(f, TC):
            if neg:
                raise LogicMismatch("cannot put a negated TC in negation normal form")
            return TC(f.x, f.y, walk(f.body, False, flipped), f.u, f.v)
        if isinstance(f, (LFP, GFP)):
            if neg:
                # ¬[LFP φ(x,X)]y = [GFP ¬φ(x,¬X)]y; the inner complement of X
                # cancels against the pushed negation on X-atoms.
                cls = GFP if isinstance(f, LFP) else LFP
                body = walk(f.body, True, flipped | {f.setvar})
            else:
                cls = type(f)
                body = walk(f.body, False, flipped - {f.setvar})
            return cls(f.setvar, f.var, body, f.arg)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi, False, frozenset())


def exists_normal_form(phi: Formula) -> Formula:
    """Rewrite ∀x φ to ¬∃x¬φ and ∀X φ to ¬∃X¬φ (explicit normalizer)."""
    if isinstance(phi, (Top, RelAtom, Eq, SetAtom)):
        return phi
    if isinstance(phi, Not):
        return Not(exists_normal_form(phi.body))
    if isinstance(phi, BINARY):
        return type(phi)(exists_normal_form(phi.left), exists_normal_form(phi.right))
    if isinstance(phi, ExistsElem):
        return ExistsElem(phi.var, exists_normal_form(phi.body))
    if isinstance(phi, ForallElem):
        return Not(ExistsElem(phi.var, Not(exists_normal_form(phi.body))))
    if isinstance(phi, ExistsSet):
        return ExistsSet(phi.var, exists_normal_form(phi.body))
    if isinstance(phi, ForallSet):
        return Not(ExistsSet(phi.var, Not(exists_normal_form(phi.body))))
    if isinstance(phi, TC):
        return TC(phi.x, phi.y, exists_normal_form(phi.body), phi.u, phi.v)
    if isinstance(phi, (LFP, GFP)):
        return type(phi)(phi.setvar, phi.var, exists_normal_form(phi.body), phi.arg)
    raise TypeError(f"unknown formula node {phi!r}")


def forall_normal_form(phi: Formula) -> Formula:
    """Rewrite ∃x φ to ¬∀x¬φ and ∃X φ to ¬∀X¬φ; the proof checker compares
    lines and axiom templates in this form."""
    if isinstance(phi, (Top, RelAtom, Eq, SetAtom)):
        return phi
    if isinstance(phi, Not):
        return Not(forall_normal_form(phi.body))
    if isinstance(phi, BINARY):
        return type(phi)(forall_normal_form(phi.left), forall_normal_form(phi.right))
    if isinstance(phi, ForallElem):
        return ForallElem(phi.var, forall_normal_form(phi.body))
    if isinstance(phi, ExistsElem):
        return Not(ForallElem(phi.var, Not(forall_normal_form(phi.body))))
    if isinstance(phi, ForallSet):
        return ForallSet(phi.var, forall_normal_form(phi.body))
    if isinstance(phi, ExistsSet):
        return Not(ForallSet(phi.var, Not(forall_normal_form(phi.body))))
    if isinstance(phi, TC):
        return TC(phi.x, phi.y, forall_normal_form(phi.body), phi.u, phi.v)
    if isinstance(phi, (LFP, GFP)):
        return type(phi)(phi.setvar, phi.var, forall_normal_form(phi.body), phi.arg)
    raise TypeError(f"unknown formula node {phi!r}")


def admissible_in(phi: Formula, logic: Logic) -> bool:
    """Whether phi only uses the constructors of the given logic."""
    if isinstance(phi, (Top, RelAtom, Eq)):
        return True
    if isinstance(phi, SetAtom):
        return logic in (Logic.MSO, Logic.FOLFP1)
    if isinstance(phi, Not):
        return admissible_in(phi.body, logic)
    if isinstance(phi, BINARY):
        return admissible_in(phi.left, logic) and admissible_in(phi.right, logic)
    if isinstance(phi, ELEM_QUANT):
        return admissible_in(phi.body, logic)
    if isinstance(phi, SET_QUANT):
        return logic == Logic.MSO and admissible_in(phi.body, logic)
    if isinstance(phi, TC):
        return logic == Logic.FOTC1 and admissible_in(phi.body, logic)
    if isinstance(phi, (LFP, GFP)):
        return logic == Logic.FOLFP1 and admissible_in(phi.body, logic)
    raise TypeError(f"unknown formula node {phi!r}")


def require_logic(phi: Formula, logic: Logic) -> None:
    if not admissible_in(phi, logic):
        raise LogicMismatch(f"formula uses constructors outside {logic.value}")


# ---------------------------------------------------------------------------
# Grammar

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<punct>[()\[\],.=!&|])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
        if m.group("arrow"):
            tokens.append(("arrow", "->", m.start()))
        elif m.group("punct"):
            tokens.append(("punct", m.group("punct"), m.start("punct")))
        else:
            tokens.append(("name", m.group("name"), m.start("name")))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def _expand_ltch(x: str, y: str) -> Formula:
    # x <_ch y: x < y and nothing strictly between.
    z = next(n for n in ("z", "z0", "z1", "z2") if n not in (x, y))
    between = ExistsElem(z, And(RelAtom("lt", (z, y)), RelAtom("lt", (x, z))))
    return And(RelAtom("lt", (x, y)), Not(between))


def _expand_sltns(x: str, y: str) -> Formula:
    # x ≺_ns y: x ≺ y and no sibling strictly between.
    z = next(n for n in ("z", "z0", "z1", "z2") if n not in (x, y))
    between = ExistsElem(z, And(RelAtom("slt", (x, z)), RelAtom("slt", (z, y))))
    return And(RelAtom("slt", (x, y)), Not(between))


class _Parser:
    def __init__(self, text: str, vocab: Vocabulary):
        self.tokens = _tokenize(text)
        self.vocab = vocab
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def expect_name(self, what: str = "identifier") -> str:
        kind, val, pos = self.next()
        if kind != "name":
            raise ParseError(f"expected {what}, found {val or 'end of input'!r}", pos)
        return val

    def expect_elem_var(self) -> str:
        kind, val, pos = self.next()
        if kind != "name" or is_set_var(val) or val in self.vocab:
            raise ParseError(f"expected element variable, found {val!r}", pos)
        return val

    def expect_set_var(self) -> str:
        kind, val, pos = self.next()
        if kind != "name" or not is_set_var(val) or val in self.vocab:
            raise ParseError(f"expected set variable, found {val!r}", pos)
        return val

    def parse(self) -> Formula:
        phi = self.implies()
        kind, val, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return phi

    def implies(self) -> Formula:
        left = self.disjunct()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disjunct(self) -> Formula:
        out = self.conjunct()
        while self.peek()[1] == "|":
            self.next()
            out = Or(out, self.conjunct())
        return out

    def conjunct(self) -> Formula:
        out = self.unary()
        while self.peek()[1] == "&":
            self.next()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "!":
            self.next()
            return Not(self.unary())
        if val == "(":
            self.next()
            phi = self.implies()
            self.expect(")")
            return phi
        if kind == "name":
            if val in ("E", "A"):
                self.next()
                var = self.expect_elem_var()
                self.expect(".")
                body = self.implies()
                return ExistsElem(var, body) if val == "E" else ForallElem(var, body)
            if val in ("E2", "A2"):
                self.next()
                var = self.expect_set_var()
                self.expect(".")
                body = self.implies()
                return ExistsSet(var, body) if val == "E2" else ForallSet(var, body)
            if val == "tc" and self.tokens[self.i + 1][1] == "[":
                return self.tc()
            if val in ("lfp", "gfp") and self.tokens[self.i + 1][1] == "[":
                return self.fixpoint(val)
            return self.atom()
        raise ParseError(f"expected a formula, found {val or 'end of input'!r}", pos)

    def tc(self) -> Formula:
        self.next()  # 'tc'
        self.expect("[")
        x = self.expect_elem_var()
        self.expect(",")
        y = self.expect_elem_var()
        self.expect("]")
        self.expect("(")
        body = self.implies()
        self.expect(")")
        self.expect("(")
        u = self.expect_elem_var()
        self.expect(",")
        v = self.expect_elem_var()
        self.expect(")")
        return TC(x, y, body, u, v)

    def fixpoint(self, which: str) -> Formula:
        self.next()  # 'lfp' / 'gfp'
        self.expect("[")
        x_set = self.expect_set_var()
        self.expect(",")
        x = self.expect_elem_var()
        self.expect("]")
        self.expect("(")
        body = self.implies()
        self.expect(")")
        self.expect("(")
        y = self.expect_elem_var()
        self.expect(")")
        cls = LFP if which == "lfp" else GFP
        if not check_positive(body, x_set):
            raise ParseError(f"{x_set} not positive in {which} body")
        return cls(x_set, x, body, y)

    def atom(self) -> Formula:
        kind, name, pos = self.next()
        if name == "true":
            return Top()
        if self.peek()[1] == "(":
            self.next()
            if name in ("ltch", "sltns"):
                x = self.expect_elem_var()
                self.expect(",")
                y = self.expect_elem_var()
                self.expect(")")
                return _expand_ltch(x, y) if name == "ltch" else _expand_sltns(x, y)
            args = [self.expect_elem_var()]
            while self.peek()[1] == ",":
                self.next()
                args.append(self.expect_elem_var())
            self.expect(")")
            if name in self.vocab:
                arity = self.vocab.arity[name]
                if len(args) != arity:
                    raise ParseError(
                        f"{name} expects {arity} argument(s), got {len(args)}", pos)
                return RelAtom(name, tuple(args))
            if is_set_var(name):
                if len(args) != 1:
                    raise ParseError(f"set atom {name} takes one argument", pos)
                return SetAtom(name, args[0])
            raise ParseError(f"unknown symbol {name!r}", pos)
        if self.peek()[1] == "=":
            if is_set_var(name) or name in self.vocab:
                raise ParseError("equality operands must be element variables", pos)
            self.next()
            right = self.expect_elem_var()
            return Eq(name, right)
        if name in self.vocab:
            raise ParseError(f"relation {name!r} needs arguments", pos)
        raise ParseError(f"dangling identifier {name!r}", pos)


def parse_formula(text: str, vocab: Vocabulary | None = None) -> Formula:
    """Parse the ASCII grammar; defaults to the tree vocabulary."""
    if vocab is None:
        vocab = tree_vocabulary()
    return _Parser(text, vocab).parse()


# Rendering: precedence levels (higher binds tighter).
_LEVEL_IMPLIES = 1
_LEVEL_OR = 2
_LEVEL_AND = 3
_LEVEL_NOT = 4
_LEVEL_ATOM = 5


def _level(phi: Formula) -> int:
    if isinstance(phi, Implies):
        return _LEVEL_IMPLIES
    if isinstance(phi, Or):
        return _LEVEL_OR
    if isinstance(phi, And):
        return _LEVEL_AND
    if isinstance(phi, Not):
        return _LEVEL_NOT
    if isinstance(phi, ELEM_QUANT + SET_QUANT):
        return _LEVEL_IMPLIES  # quantifier body extends maximally
    return _LEVEL_ATOM


def _fold_macro(phi: Formula) -> str | None:
    """Recognize the ltch/sltns expansion shapes and print them folded."""
    if not isinstance(phi, And) or not isinstance(phi.left, RelAtom):
        return None
    head = phi.left
    if len(head.args) != 2:
        return None
    x, y = head.args
    if head.symbol == "lt" and phi == _expand_ltch(x, y):
        return f"ltch({x},{y})"
    if head.symbol == "slt" and phi == _expand_sltns(x, y):
        return f"sltns({x},{y})"
    return None


def render_formula(phi: Formula, fold_macros: bool = False) -> str:
    """Inverse of parse_formula up to whitespace and redundant parentheses."""

    def rend(f: Formula, min_level: int) -> str:
        if fold_macros:
            folded = _fold_macro(f)
            if folded is not None:
                return folded
        if isinstance(f, Top):
            return "true"
        if isinstance(f, RelAtom):
            return f"{f.symbol}({','.join(f.args)})"
        if isinstance(f, Eq):
            return f"{f.left} = {f.right}"
        if isinstance(f, SetAtom):
            return f"{f.setvar}({f.arg})"
        if isinstance(f, TC):
            return f"tc[{f.x},{f.y}]({rend(f.body, 0)})({f.u},{f.v})"
        if isinstance(f, LFP):
            return f"lfp[{f.setvar},{f.var}]({rend(f.body, 0)})({f.arg})"
        if isinstance(f, GFP):
            return f"gfp[{f.setvar},{f.var}]({rend(f.body, 0)})({f.arg})"
        lvl = _level(f)
        if isinstance(f, Not):
            out = "!" + rend(f.body, _LEVEL_NOT)
        elif isinstance(f, And):
            out = f"{rend(f.left, _LEVEL_AND)} & {rend(f.right, _LEVEL_AND + 1)}"
        elif isinstance(f, Or):
            out = f"{rend(f.left, _LEVEL_OR)} | {rend(f.right, _LEVEL_OR + 1)}"
        elif isinstance(f, Implies):
            out = f"{rend(f.left, _LEVEL_IMPLIES + 1)} -> {rend(f.right, _LEVEL_IMPLIES)}"
        elif isinstance(f, ExistsElem):
            out = f"E {f.var}. {rend(f.body, 0)}"
        elif isinstance(f, ForallElem):
            out = f"A {f.var}. {rend(f.body, 0)}"
        elif isinstance(f, ExistsSet):
            out = f"E2 {f.var}. {rend(f.body, 0)}"
        elif isinstance(f, ForallSet):
            out = f"A2 {f.var}. {rend(f.body, 0)}"
        else:
            raise TypeError(f"unknown formula node {f!r}")
        if lvl < min_level:
            return f"({out})"
        return out

    return rend(phi, 0)
