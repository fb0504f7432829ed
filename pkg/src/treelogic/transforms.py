"""Inter-logic translations, relativization, axiom-schema instantiation,
propositional-tautology checking, and the finiteness sentence chi.

Fresh variables are drawn deterministically (base name, then base1, base2,
...), so translated output is reproducible byte for byte.
"""

from __future__ import annotations

from .errors import NotSubstitutable, SchemaError
from .syntax import (
    GFP, LFP, TC, And, Eq, ExistsElem, ExistsSet, ForallElem, ForallSet,
    Formula, Implies, Not, Or, RelAtom, SetAtom, Top, Vocabulary,
    all_variables, check_positive, free_variables, freshen_bound, iff,
    parse_formula, substitute, substitute_set, tree_vocabulary,
)


def _fresh(taken: set[str], base: str) -> str:
    if base not in taken:
        taken.add(base)
        return base
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    taken.add(f"{base}{i}")
    return f"{base}{i}"


# ---------------------------------------------------------------------------
# Translations


def lfp_to_mso(phi: Formula) -> Formula:
    """Translate fixpoints to set quantification:
    [LFP_{Xx} b]y becomes ∀X(∀x(b' → Xx) → Xy), GFP dually."""

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq, SetAtom)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, (ExistsElem, ForallElem, ExistsSet, ForallSet)):
            return type(f)(f.var, walk(f.body))
        if isinstance(f, TC):
            raise SchemaError("translate TC via tc_to_lfp first")
        if isinstance(f, LFP):
            body = walk(f.body)
            closed = ForallElem(f.var, Implies(body, SetAtom(f.setvar, f.var)))
            return ForallSet(f.setvar, Implies(closed, SetAtom(f.setvar, f.arg)))
        if isinstance(f, GFP):
            body = walk(f.body)
            post = ForallElem(f.var, Implies(SetAtom(f.setvar, f.var), body))
            return ExistsSet(f.setvar, And(SetAtom(f.setvar, f.arg), post))
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi)


def tc_to_lfp(phi: Formula) -> Formula:
    """Translate transitive closures to least fixpoints:
    [TC_{xy} b](u,v) becomes [LFP_{Xy} y=u ∨ ∃x(Xx ∧ b'')](v), inside out."""
    taken = all_variables(phi)

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq, SetAtom)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, (ExistsElem, ForallElem, ExistsSet, ForallSet)):
            return type(f)(f.var, walk(f.body))
        if isinstance(f, (LFP, GFP)):
            return type(f)(f.setvar, f.var, walk(f.body), f.arg)
        if isinstance(f, TC):
            body = walk(f.body)
            x_set = _fresh(taken, "X")
            y = f.y
            if f.u == y:
                # y=u would capture the comparison variable; rebind the path var.
                y = _fresh(taken, "w")
                body = substitute(body, f.y, y)
            step = ExistsElem(f.x, And(SetAtom(x_set, f.x), body))
            return LFP(x_set, y, Or(Eq(y, f.u), step), f.v)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi)


# ---------------------------------------------------------------------------
# Relativization


def relativize(phi: Formula, psi: Formula, x: str) -> Formula:
    """REL(phi, psi, x): phi with every quantifier guarded by the predicate
    psi defines of its hole variable x.  phi and psi must share no variables;
    bound-variable collisions are repaired by renaming first."""
    psi_free_e, psi_free_s = free_variables(psi)
    if x not in psi_free_e:
        raise SchemaError(f"{x} must occur free in the guard")
    phi = freshen_bound(phi, psi_free_e | psi_free_s)
    psi = freshen_bound(psi, all_variables(phi))
    phi_e, phi_s = free_variables(phi)
    shared = (phi_e | phi_s) & (free_variables(psi)[0] | free_variables(psi)[1])
    if shared:
        raise SchemaError(f"phi and psi share variables: {sorted(shared)}")

    def guard_for(var: str) -> Formula:
        return substitute(psi, x, var)

    def set_guard(set_var: str) -> Formula:
        return ForallElem(x, Implies(SetAtom(set_var, x), psi))

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq, SetAtom)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, ExistsElem):
            return ExistsElem(f.var, And(guard_for(f.var), walk(f.body)))
        if isinstance(f, ForallElem):
            return ForallElem(f.var, Implies(guard_for(f.var), walk(f.body)))
        if isinstance(f, ExistsSet):
            return ExistsSet(f.var, And(set_guard(f.var), walk(f.body)))
        if isinstance(f, ForallSet):
            return ForallSet(f.var, Implies(set_guard(f.var), walk(f.body)))
        if isinstance(f, TC):
            body = And(And(walk(f.body), guard_for(f.x)), guard_for(f.y))
            return TC(f.x, f.y, body, f.u, f.v)
        if isinstance(f, (LFP, GFP)):
            body = And(walk(f.body), guard_for(f.var))
            return type(f)(f.setvar, f.var, body, f.arg)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi)


# ---------------------------------------------------------------------------
# Propositional tautologies


def propositional_skeleton(phi: Formula):
    """Abstract maximal non-propositional subformulas to letters; returns
    (skeleton tree, letter count).  Skeleton nodes: ("top",), ("letter", i),
    ("not", t), ("and"/"or"/"implies", l, r)."""
    letters: dict[Formula, int] = {}

    def walk(f: Formula):
        if isinstance(f, Top):
            return ("top",)
        if isinstance(f, Not):
            return ("not", walk(f.body))
        if isinstance(f, And):
            return ("and", walk(f.left), walk(f.right))
        if isinstance(f, Or):
            return ("or", walk(f.left), walk(f.right))
        if isinstance(f, Implies):
            return ("implies", walk(f.left), walk(f.right))
        if f not in letters:
            letters[f] = len(letters)
        return ("letter", letters[f])

    return walk(phi), len(letters)


def tautology_check(phi: Formula, max_letters: int = 20) -> bool:
    """Truth-table validity of the propositional skeleton."""
    skel, n = propositional_skeleton(phi)
    if n > max_letters:
        raise SchemaError(f"tautology check over {n} letters exceeds the {max_letters} cap")

    def value(node, bits: int) -> bool:
        tag = node[0]
        if tag == "top":
            return True
        if tag == "letter":
            return bool(bits >> node[1] & 1)
        if tag == "not":
            return not value(node[1], bits)
        if tag == "and":
            return value(node[1], bits) and value(node[2], bits)
        if tag == "or":
            return value(node[1], bits) or value(node[2], bits)
        return not value(node[1], bits) or value(node[2], bits)

    return all(value(skel, bits) for bits in range(1 << n))


# ---------------------------------------------------------------------------
# Axiom schemas

_TREE_AXIOM_TEXT = {
    "T1": "A x. A y. A z. (lt(x,y) & lt(y,z) -> lt(x,z))",
    "T2": "!(E x. lt(x,x))",
    "T3": "A x. A y. (lt(x,y) -> E w. (ltch(x,w) & (lt(w,y) | w = y)))",
    "T4": "E x. A y. (lt(x,y) | x = y)",
    "T5": "A x. A y. A z. (lt(x,z) & lt(y,z) -> lt(x,y) | x = y | lt(y,x) | y = x)",
    "T6": "A x. A y. A z. (slt(x,y) & slt(y,z) -> slt(x,z))",
    "T7": "!(E x. slt(x,x))",
    "T8": "A x. A y. (slt(x,y) -> E w. (sltns(x,w) & (slt(w,y) | w = y)))",
    "T9": "A x. E y. ((slt(y,x) | y = x) & !(E z. slt(z,y)))",
    "T10": ("A x. A y. ((slt(x,y) | slt(y,x) -> (E z. (ltch(z,x) & ltch(z,y))) & !(x = y))"
            " & ((E z. (ltch(z,x) & ltch(z,y))) & !(x = y) -> slt(x,y) | slt(y,x)))"),
}

_LINEAR_AXIOM_TEXT = {
    "L1": "A x. A y. A z. (lt(x,y) & lt(y,z) -> lt(x,z))",
    "L2": "!(E x. lt(x,x))",
    "L3": "A x. A y. (lt(x,y) -> E w. (ltch(x,w) & (lt(w,y) | w = y)))",
    "L4": "E x. A y. !lt(y,x)",
    "L5": "A x. A y. (x = y | lt(x,y) | lt(y,x))",
}

SCHEMA_IDS = frozenset(
    [f"FO{i}" for i in range(1, 7)]
    + ["COMP", "MSO1", "MSO2", "MSO3", "TCAX", "LFPAX", "IND", "LIND"]
    + list(_TREE_AXIOM_TEXT) + list(_LINEAR_AXIOM_TEXT)
)


def _as_formula(value, vocab: Vocabulary) -> Formula:
    if isinstance(value, Formula):
        return value
    return parse_formula(value, vocab)


def _need(bindings: dict, keys: list[str]) -> list:
    missing = [k for k in keys if k not in bindings]
    if missing:
        raise SchemaError(f"missing bindings: {', '.join(missing)}")
    return [bindings[k] for k in keys]


def _subst_or_fail(phi: Formula, x: str, t: str) -> Formula:
    try:
        return substitute(phi, x, t)
    except NotSubstitutable as exc:
        raise SchemaError(str(exc)) from exc


def _atomic(phi: Formula) -> bool:
    return isinstance(phi, (Top, RelAtom, Eq, SetAtom))


def _fo6_pattern(phi: Formula, psi: Formula, x: str, y: str) -> bool:
    """psi is phi with x replaced by y in zero or more argument places."""
    ok = lambda a, b: b == a or (a == x and b == y)  # noqa: E731
    if isinstance(phi, RelAtom) and isinstance(psi, RelAtom):
        return (phi.symbol == psi.symbol and len(phi.args) == len(psi.args)
                and all(ok(a, b) for a, b in zip(phi.args, psi.args)))
    if isinstance(phi, Eq) and isinstance(psi, Eq):
        return ok(phi.left, psi.left) and ok(phi.right, psi.right)
    if isinstance(phi, SetAtom) and isinstance(psi, SetAtom):
        return phi.setvar == psi.setvar and ok(phi.arg, psi.arg)
    return phi == psi


def substitute_set_formula(phi: Formula, x_set: str, psi: Formula, hole: str) -> Formula:
    """Replace every occurrence of the set variable X in phi by the formula
    psi(hole), renaming bound variables when needed."""
    psi_e, psi_s = free_variables(psi)
    phi = freshen_bound(phi, (psi_e - {hole}) | psi_s)

    def walk(f: Formula) -> Formula:
        if isinstance(f, (Top, RelAtom, Eq)):
            return f
        if isinstance(f, SetAtom):
            if f.setvar != x_set:
                return f
            try:
                return substitute(psi, hole, f.arg)
            except NotSubstitutable:
                return substitute(freshen_bound(psi, {f.arg}), hole, f.arg)
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, (And, Or, Implies)):
            return type(f)(walk(f.left), walk(f.right))
        if isinstance(f, (ExistsElem, ForallElem)):
            return type(f)(f.var, walk(f.body))
        if isinstance(f, (ExistsSet, ForallSet)):
            if f.var == x_set:
                return f
            return type(f)(f.var, walk(f.body))
        if isinstance(f, TC):
            return TC(f.x, f.y, walk(f.body), f.u, f.v)
        if isinstance(f, (LFP, GFP)):
            if f.setvar == x_set:
                return f
            return type(f)(f.setvar, f.var, walk(f.body), f.arg)
        raise TypeError(f"unknown formula node {f!r}")

    return walk(phi)


def axiom_instance(schema_id: str, bindings: dict, vocab: Vocabulary | None = None) -> Formula:
    """Instantiate an axiom schema, enforcing its side conditions.  Formula
    bindings may be Formula values or grammar strings."""
    if vocab is None:
        vocab = tree_vocabulary()
    if schema_id not in SCHEMA_IDS:
        raise SchemaError(f"unknown schema {schema_id!r}")

    if schema_id in _TREE_AXIOM_TEXT:
        return parse_formula(_TREE_AXIOM_TEXT[schema_id], vocab)
    if schema_id in _LINEAR_AXIOM_TEXT:
        return parse_formula(_LINEAR_AXIOM_TEXT[schema_id], vocab)

    if schema_id == "FO1":
        (phi,) = _need(bindings, ["phi"])
        phi = _as_formula(phi, vocab)
        if not tautology_check(phi):
            raise SchemaError("phi is not a propositional tautology")
        return phi
    if schema_id == "FO2":
        phi, x, t = _need(bindings, ["phi", "x", "t"])
        phi = _as_formula(phi, vocab)
        return Implies(ForallElem(x, phi), _subst_or_fail(phi, x, t))
    if schema_id == "FO3":
        phi, psi, x = _need(bindings, ["phi", "psi", "x"])
        phi, psi = _as_formula(phi, vocab), _as_formula(psi, vocab)
        return Implies(ForallElem(x, Implies(phi, psi)),
                       Implies(ForallElem(x, phi), ForallElem(x, psi)))
    if schema_id == "FO4":
        phi, x = _need(bindings, ["phi", "x"])
        phi = _as_formula(phi, vocab)
        if x in free_variables(phi)[0]:
            raise SchemaError(f"{x} occurs free in phi")
        return Implies(phi, ForallElem(x, phi))
    if schema_id == "FO5":
        (x,) = _need(bindings, ["x"])
        return Eq(x, x)
    if schema_id == "FO6":
        x, y, phi, psi = _need(bindings, ["x", "y", "phi", "psi"])
        phi, psi = _as_formula(phi, vocab), _as_formula(psi, vocab)
        if not _atomic(phi):
            raise SchemaError("phi is not atomic")
        if not _fo6_pattern(phi, psi, x, y):
            raise SchemaError(f"psi is not obtained from phi by replacing {x} by {y}")
        return Implies(Eq(x, y), Implies(phi, psi))
    if schema_id == "COMP":
        phi, x_set, x = _need(bindings, ["phi", "X", "x"])
        phi = _as_formula(phi, vocab)
        if x_set in free_variables(phi)[1]:
            raise SchemaError(f"{x_set} occurs free in phi")
        return ExistsSet(x_set, ForallElem(x, iff(SetAtom(x_set, x), phi)))
    if schema_id == "MSO1":
        phi, x_set, t_set = _need(bindings, ["phi", "X", "T"])
        phi = _as_formula(phi, vocab)
        try:
            inst = substitute_set(phi, x_set, t_set)
        except NotSubstitutable as exc:
            raise SchemaError(str(exc)) from exc
        return Implies(ForallSet(x_set, phi), inst)
    if schema_id == "MSO2":
        phi, psi, x_set = _need(bindings, ["phi", "psi", "X"])
        phi, psi = _as_formula(phi, vocab), _as_formula(psi, vocab)
        return Implies(ForallSet(x_set, Implies(phi, psi)),
                       Implies(ForallSet(x_set, phi), ForallSet(x_set, psi)))
    if schema_id == "MSO3":
        phi, x_set = _need(bindings, ["phi", "X"])
        phi = _as_formula(phi, vocab)
        if x_set in free_variables(phi)[1]:
            raise SchemaError(f"{x_set} occurs free in phi")
        return Implies(phi, ForallSet(x_set, phi))
    if schema_id == "TCAX":
        phi, x, y, u, v, psi, hole = _need(
            bindings, ["phi", "x", "y", "u", "v", "psi", "hole"])
        phi, psi = _as_formula(phi, vocab), _as_formula(psi, vocab)
        spare = free_variables(psi)[0] - {hole}
        if spare & {x, y}:
            raise SchemaError("psi's free variables would be captured by the closure quantifiers")
        psi_u = _subst_or_fail(psi, hole, u)
        psi_v = _subst_or_fail(psi, hole, v)
        psi_x = _subst_or_fail(psi, hole, x)
        psi_y = _subst_or_fail(psi, hole, y)
        closure = ForallElem(x, ForallElem(y, Implies(And(psi_x, phi), psi_y)))
        return Implies(TC(x, y, phi, u, v),
                       Implies(And(psi_u, closure), psi_v))
    if schema_id == "LFPAX":
        phi, x_set, x, y, psi, hole = _need(
            bindings, ["phi", "X", "x", "y", "psi", "hole"])
        phi, psi = _as_formula(phi, vocab), _as_formula(psi, vocab)
        if not check_positive(phi, x_set):
            raise SchemaError(f"phi not positive in {x_set}")
        spare = free_variables(psi)[0] - {hole}
        if x in spare:
            raise SchemaError("psi's free variables would be captured by the closure quantifier")
        phi_psi = substitute_set_formula(phi, x_set, psi, hole)
        psi_x = _subst_or_fail(psi, hole, x)
        psi_y = _subst_or_fail(psi, hole, y)
        closed = ForallElem(x, Implies(phi_psi, psi_x))
        return Implies(LFP(x_set, x, phi, y), Implies(closed, psi_y))
    if schema_id in ("IND", "LIND"):
        phi, x = _need(bindings, ["phi", "x"])
        phi = _as_formula(phi, vocab)
        fe, fs = free_variables(phi)
        if not fe <= {x} or fs:
            raise SchemaError(f"phi must have at most the one free variable {x}")
        y = bindings.get("y")
        if y is None:
            taken = all_variables(phi) | {x}
            y = _fresh(taken, "y")
        elif y in all_variables(phi) | {x}:
            raise SchemaError(f"{y} occurs in phi")
        phi_y = _subst_or_fail(phi, x, y)
        if schema_id == "IND":
            below = Or(RelAtom("lt", (x, y)), RelAtom("slt", (x, y)))
        else:
            below = RelAtom("lt", (x, y))
        step = ForallElem(x, Implies(ForallElem(y, Implies(below, phi_y)), phi))
        return Implies(step, ForallElem(x, phi))
    raise SchemaError(f"unhandled schema {schema_id!r}")


# ---------------------------------------------------------------------------
# The finiteness sentence


def _dfs_successor_text() -> str:
    """The depth-first left-to-right successor formula in x and y, with the
    leaf and root predicates unfolded."""
    not_leaf_x = "(E q. lt(x,q))"
    leaf_x = "!(E q. lt(x,q))"
    c1 = f"{not_leaf_x} & ltch(x,y) & !(E z. slt(z,y))"
    c2 = f"{leaf_x} & sltns(x,y)"
    c3 = (f"{leaf_x} & !(E z. slt(x,z)) & "
          f"(E z. (lt(z,x) & sltns(z,y) & "
          f"!(E w. (lt(w,x) & lt(z,w) & (E u2. sltns(w,u2))))))")
    return f"({c1}) | ({c2}) | ({c3})"


def chi_finiteness() -> Formula:
    """Closed FO(TC1) sentence over the tree vocabulary: the depth-first
    successor chain starting at the root reaches a node with no further
    successor.  On tree-shaped structures this pins finiteness."""
    step = _dfs_successor_text()
    text = (f"E u. E z. (!(E q. lt(q,z))"
            f" & tc[x,y]({step})(z,u)"
            f" & !(E u2. (!(u = u2) & tc[x,y]({step})(u,u2))))")
    return parse_formula(text, tree_vocabulary())
