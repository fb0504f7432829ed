"""Hilbert-style proof checking for the pure, tree and linear-order systems,
with full side-condition checking per rule.

Lines and axiom templates are compared in forall normal form (∃ rewritten to
¬∀¬ by the explicit normalizer), matching the calculus whose axioms are
stated with universal quantifiers.  Scratch unary predicates for the TC/LFP
generalization rules are declared per proof and extend the vocabulary for
its scope.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import ParseError, SchemaError, TreelogicError
from .syntax import (
    GFP, LFP, TC, And, Eq, ExistsElem, ExistsSet, Formula, ForallElem,
    ForallSet, Implies, Logic, Not, Or, RelAtom, SetAtom, Top, Vocabulary,
    admissible_in, check_positive, forall_normal_form, free_variables,
    parse_formula, tree_vocabulary,
)
from .transforms import SCHEMA_IDS, axiom_instance, tautology_check

THEORIES = ("pure", "tree", "linear")

_FO_SCHEMAS = frozenset(f"FO{i}" for i in range(1, 7))
_MSO_SCHEMAS = frozenset(("COMP", "MSO1", "MSO2", "MSO3"))
_TREE_SCHEMAS = frozenset([f"T{i}" for i in range(1, 11)] + ["IND"])
_LINEAR_SCHEMAS = frozenset([f"L{i}" for i in range(1, 6)] + ["LIND"])


@dataclass(frozen=True)
class Justification:
    kind: str
    refs: tuple[int, ...] = ()
    var: str = ""
    schema: str = ""
    bindings: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    just: Justification
    source: str = ""


@dataclass(frozen=True)
class Proof:
    logic: Logic
    theory: str
    premises: tuple[Formula, ...]
    lines: tuple[ProofLine, ...]
    vocab: Vocabulary


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    line: int | None = None
    reason: str | None = None

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        return f"rejected at line {self.line}: {self.reason}"


def proof_vocabulary(theory: str, extra_preds: Sequence[str] = ()) -> Vocabulary:
    if theory == "linear":
        base = Vocabulary((("lt", 2), ("P1", 1), ("P2", 1), ("P3", 1)))
    else:
        base = tree_vocabulary(3)
    return base.extend(tuple((p, 1) for p in extra_preds))


def load_proof(text: str) -> Proof:
    """Parse the JSON proof format."""
    doc = json.loads(text)
    logic = Logic(doc.get("logic", "fo"))
    theory = doc.get("theory", "pure")
    if theory not in THEORIES:
        raise ParseError(f"unknown theory {theory!r}")
    vocab = proof_vocabulary(theory, doc.get("extra_preds", ()))
    premises = tuple(parse_formula(p, vocab) for p in doc.get("premises", ()))
    lines = []
    for entry in doc.get("lines", ()):
        by = entry.get("by", {})
        kind = by.get("kind")
        if kind == "premise":
            just = Justification("premise", refs=(int(by["index"]),))
        elif kind == "axiom":
            bind = tuple(sorted((k, str(v)) for k, v in by.get("bind", {}).items()))
            just = Justification("axiom", schema=by["id"], bindings=bind)
        elif kind == "taut":
            just = Justification("taut")
        elif kind == "mp":
            just = Justification("mp", refs=tuple(int(i) for i in by["from"]))
        elif kind in ("gen", "setgen"):
            just = Justification(kind, refs=(int(by["from"]),), var=by["var"])
        elif kind in ("tcgen", "lfpgen"):
            bind = tuple(sorted((k, str(v)) for k, v in by.get("bind", {}).items()))
            just = Justification(kind, refs=(int(by["from"]),), bindings=bind)
        else:
            raise ParseError(f"unknown justification kind {kind!r}")
        lines.append(ProofLine(parse_formula(entry["formula"], vocab), just,
                               source=entry["formula"]))
    return Proof(logic, theory, premises, tuple(lines), vocab)


def _available_schemas(proof: Proof) -> frozenset[str]:
    pool = set(_FO_SCHEMAS)
    if proof.logic is Logic.MSO:
        pool |= _MSO_SCHEMAS
    if proof.logic is Logic.FOTC1:
        pool.add("TCAX")
    if proof.logic is Logic.FOLFP1:
        pool.add("LFPAX")
    if proof.theory == "tree":
        pool |= _TREE_SCHEMAS
    if proof.theory == "linear":
        pool |= _LINEAR_SCHEMAS
    return frozenset(pool)


def _relation_symbols(phi: Formula) -> set[str]:
    out: set[str] = set()

    def walk(f: Formula):
        if isinstance(f, RelAtom):
            out.add(f.symbol)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or, Implies)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, (ExistsElem, ForallElem, ExistsSet, ForallSet)):
            walk(f.body)
        elif isinstance(f, TC):
            walk(f.body)
        elif isinstance(f, (LFP, GFP)):
            walk(f.body)

    walk(phi)
    return out


def _set_var_to_pred(phi: Formula, x_set: str, pred: str) -> Formula:
    """Replace free occurrences of the set variable X by the unary predicate P."""
    if isinstance(phi, (Top, RelAtom, Eq)):
        return phi
    if isinstance(phi, SetAtom):
        if phi.setvar == x_set:
            return RelAtom(pred, (phi.arg,))
        return phi
    if isinstance(phi, Not):
        return Not(_set_var_to_pred(phi.body, x_set, pred))
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(_set_var_to_pred(phi.left, x_set, pred),
                         _set_var_to_pred(phi.right, x_set, pred))
    if isinstance(phi, (ExistsElem, ForallElem)):
        return type(phi)(phi.var, _set_var_to_pred(phi.body, x_set, pred))
    if isinstance(phi, (ExistsSet, ForallSet)):
        if phi.var == x_set:
            return phi
        return type(phi)(phi.var, _set_var_to_pred(phi.body, x_set, pred))
    if isinstance(phi, TC):
        return TC(phi.x, phi.y, _set_var_to_pred(phi.body, x_set, pred), phi.u, phi.v)
    if isinstance(phi, (LFP, GFP)):
        if phi.setvar == x_set:
            return phi
        return type(phi)(phi.setvar, phi.var,
                         _set_var_to_pred(phi.body, x_set, pred), phi.arg)
    raise TypeError(f"unknown formula node {phi!r}")


class _Reject(TreelogicError):
    pass


def check_proof(proof: Proof) -> CheckResult:
    """Accept iff every line is justified; Reject carries the first failing
    line and the violated condition."""
    pool = _available_schemas(proof)
    premises = [forall_normal_form(p) for p in proof.premises]
    checked: list[Formula] = []

    def fail(msg: str):
        raise _Reject(msg)

    def norm(phi: Formula) -> Formula:
        return forall_normal_form(phi)

    def earlier(idx: int, line_no: int) -> Formula:
        if not (0 <= idx < line_no):
            fail(f"reference to line {idx} is not an earlier line")
        return checked[idx]

    def bindings_dict(just: Justification) -> dict[str, str]:
        return dict(just.bindings)

    def check_line(line_no: int, line: ProofLine) -> None:
        formula = norm(line.formula)
        just = line.just
        if not admissible_in(line.formula, proof.logic):
            fail(f"formula uses constructors outside {proof.logic.value}")
        if just.kind == "premise":
            idx = just.refs[0]
            if not (0 <= idx < len(premises)):
                fail(f"premise index {idx} out of range")
            if premises[idx] != formula:
                fail("formula differs from the named premise")
        elif just.kind == "taut":
            if not tautology_check(formula):
                fail("not a propositional tautology")
        elif just.kind == "axiom":
            schema = just.schema
            if schema not in SCHEMA_IDS:
                fail(f"unknown schema {schema!r}")
            if schema not in pool:
                fail(f"axiom {schema} not available in this logic/theory")
            try:
                instance = axiom_instance(schema, bindings_dict(just), proof.vocab)
            except (SchemaError, ParseError) as exc:
                fail(str(exc))
            if not admissible_in(instance, proof.logic):
                fail(f"axiom instance uses constructors outside {proof.logic.value}")
            if norm(instance) != formula:
                fail("formula does not match the axiom instance")
        elif just.kind == "mp":
            i, j = just.refs
            fi, fj = earlier(i, line_no), earlier(j, line_no)
            if fj != Implies(fi, formula) and fi != Implies(fj, formula):
                fail("not a modus ponens of the referenced lines")
        elif just.kind in ("gen", "setgen"):
            prev = earlier(just.refs[0], line_no)
            var = just.var
            cls = ForallElem if just.kind == "gen" else ForallSet
            if formula != cls(var, prev):
                fail("formula is not the generalization of the referenced line")
            pos = 0 if just.kind == "gen" else 1
            if any(var in free_variables(p)[pos] for p in premises):
                fail(f"{var} occurs free in a premise")
        elif just.kind == "tcgen":
            _check_tcgen(line_no, formula, just)
        elif just.kind == "lfpgen":
            _check_lfpgen(line_no, formula, just)
        else:
            fail(f"unknown justification kind {just.kind!r}")

    def _parse_bind(bind: dict[str, str], key: str) -> Formula:
        try:
            return parse_formula(bind[key], proof.vocab)
        except KeyError:
            fail(f"missing binding {key!r}")
        except ParseError as exc:
            fail(str(exc))

    def _check_scratch(pred: str, xi: Formula, phi: Formula):
        if pred not in proof.vocab or proof.vocab.arity[pred] != 1:
            fail(f"{pred} must be a declared unary scratch predicate")
        if pred in _relation_symbols(xi):
            fail(f"{pred} does not occur in xi")
        if pred in _relation_symbols(phi):
            fail(f"{pred} does not occur in phi")
        if any(pred in _relation_symbols(p) for p in premises):
            fail(f"{pred} occurs in a premise")

    def _check_tcgen(line_no: int, formula: Formula, just: Justification):
        bind = bindings_dict(just)
        xi = _parse_bind(bind, "xi")
        phi = _parse_bind(bind, "phi")
        try:
            pred, x, y, u, v = (bind[k] for k in ("P", "x", "y", "u", "v"))
        except KeyError as exc:
            fail(f"missing binding {exc.args[0]!r}")
        _check_scratch(pred, xi, phi)
        closure = ForallElem(x, ForallElem(y, Implies(
            And(RelAtom(pred, (x,)), phi), RelAtom(pred, (y,)))))
        template = Implies(xi, Implies(
            And(RelAtom(pred, (u,)), closure), RelAtom(pred, (v,))))
        prev = earlier(just.refs[0], line_no)
        if prev != norm(template):
            fail("referenced line does not match the TC generalization premise")
        if formula != norm(Implies(xi, TC(x, y, phi, u, v))):
            fail("formula does not match the TC generalization conclusion")

    def _check_lfpgen(line_no: int, formula: Formula, just: Justification):
        bind = bindings_dict(just)
        xi = _parse_bind(bind, "xi")
        phi = _parse_bind(bind, "phi")
        try:
            pred, x_set, x, y = (bind[k] for k in ("P", "X", "x", "y"))
        except KeyError as exc:
            fail(f"missing binding {exc.args[0]!r}")
        if not check_positive(phi, x_set):
            fail(f"phi not positive in {x_set}")
        _check_scratch(pred, xi, phi)
        phi_p = _set_var_to_pred(phi, x_set, pred)
        template = Implies(xi, Implies(
            ForallElem(x, Implies(phi_p, RelAtom(pred, (x,)))),
            RelAtom(pred, (y,))))
        prev = earlier(just.refs[0], line_no)
        if prev != norm(template):
            fail("referenced line does not match the LFP generalization premise")
        if formula != norm(Implies(xi, LFP(x_set, x, phi, y))):
            fail("formula does not match the LFP generalization conclusion")

    for line_no, line in enumerate(proof.lines):
        try:
            check_line(line_no, line)
        except _Reject as exc:
            return CheckResult(False, line_no, str(exc))
        checked.append(forall_normal_form(line.formula))
    return CheckResult(True)
