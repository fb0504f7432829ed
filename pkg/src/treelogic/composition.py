"""Disjoint union, f-fusion, union closure of set parameters, and the
three-part forest composition.

Component domains are relabeled to consecutive ranges by offset; fusion
evaluates quantifier-free reinterpretation formulas on the tagged union and
drops the tag predicates from the result vocabulary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import SchemaError, StructureError
from .evaluate import Assignment, evaluate
from .structures import Frame, check_forest_shape
from .syntax import (And, Formula, Or, RelAtom, Vocabulary, free_variables,
                     parse_formula, quantifier_depth)


def component_offsets(frames: Sequence[Frame]) -> list[int]:
    offsets = [0]
    for frame in frames[:-1]:
        offsets.append(offsets[-1] + frame.size)
    return offsets


def _tag_names(k: int) -> list[str]:
    return [f"Q{i}" for i in range(1, k + 1)]


def _union_admissible(frames: Sequence[Frame], offsets: list[int]) -> tuple[int, ...] | None:
    if all(f.is_full for f in frames):
        return None
    families = [[m << off for m in f.family()] for f, off in zip(frames, offsets)]
    out = set()
    for choice in itertools.product(*families):
        mask = 0
        for m in choice:
            mask |= m
        out.add(mask)
    return tuple(sorted(out))


def disjoint_union(frames: Sequence[Frame]) -> Frame:
    """Tagged disjoint union: relations unioned under relabeling, fresh unary
    Q_i marking each component, admissible family = one-set-per-component
    unions."""
    if not frames:
        raise StructureError("disjoint union needs at least one frame")
    vocab = frames[0].vocab
    if any(f.vocab != vocab for f in frames):
        raise StructureError("all components must share one vocabulary")
    tags = _tag_names(len(frames))
    if any(t in vocab for t in tags):
        raise StructureError("vocabulary already uses tag predicate names")
    offsets = component_offsets(frames)
    size = offsets[-1] + frames[-1].size
    interp: dict[str, list[tuple[int, ...]]] = {name: [] for name, _ in vocab.relations}
    for frame, off in zip(frames, offsets):
        for name, tuples in frame.rel:
            interp[name] += [tuple(e + off for e in t) for t in tuples]
    for tag, frame, off in zip(tags, frames, offsets):
        interp[tag] = [(off + e,) for e in range(frame.size)]
    star = vocab.extend(tuple((t, 1) for t in tags))
    return Frame.make(star, size, interp, _union_admissible(frames, offsets))


@dataclass(frozen=True)
class FusionMap:
    """Quantifier-free reinterpretation formulas over sigma plus tags, one
    per relation symbol, in variables x1..xk."""

    formulas: tuple[tuple[str, Formula], ...]

    @staticmethod
    def make(mapping: Mapping[str, Formula | str], vocab: Vocabulary,
             components: int) -> "FusionMap":
        star = vocab.extend(tuple((t, 1) for t in _tag_names(components)))
        entries = []
        for name, arity in vocab.relations:
            if name not in mapping:
                raise SchemaError(f"fusion map misses symbol {name!r}")
            raw = mapping[name]
            formula = parse_formula(raw, star) if isinstance(raw, str) else raw
            if quantifier_depth(formula) != 0:
                raise SchemaError(f"fusion formula for {name!r} is not quantifier-free")
            allowed = {f"x{i}" for i in range(1, arity + 1)}
            fe, fs = free_variables(formula)
            if fs or not fe <= allowed:
                raise SchemaError(
                    f"fusion formula for {name!r} may only use x1..x{arity}")
            entries.append((name, formula))
        extra = set(mapping) - {name for name, _ in vocab.relations}
        if extra:
            raise SchemaError(f"fusion map names unknown symbols: {sorted(extra)}")
        return FusionMap(tuple(entries))

    @staticmethod
    def identity(vocab: Vocabulary) -> "FusionMap":
        entries = []
        for name, arity in vocab.relations:
            args = tuple(f"x{i}" for i in range(1, arity + 1))
            entries.append((name, RelAtom(name, args)))
        return FusionMap(tuple(entries))


def fuse(frames: Sequence[Frame], fusion: FusionMap) -> Frame:
    """f-fusion: the disjoint union's domain and admissible family, each
    sigma relation reinterpreted by its quantifier-free formula, tags
    dropped."""
    union = disjoint_union(frames)
    vocab = frames[0].vocab
    interp: dict[str, list[tuple[int, ...]]] = {}
    for name, formula in fusion.formulas:
        arity = vocab.arity[name]
        args = [f"x{i}" for i in range(1, arity + 1)]
        tuples = []
        for tup in itertools.product(range(union.size), repeat=arity):
            g = Assignment(elem=dict(zip(args, tup)))
            if evaluate(union, formula, g):
                tuples.append(tup)
        interp[name] = tuples
    return Frame.make(vocab, union.size, interp, union.admissible)


def union_closure(sets: Iterable[int]) -> list[int]:
    """All unions of subcollections, the empty union included, ordered by
    index subset (numeric bitmask order) with duplicates dropped."""
    items = list(sets)
    out: list[int] = []
    seen = set()
    for picks in range(1 << len(items)):
        mask = 0
        for i in range(len(items)):
            if picks >> i & 1:
                mask |= items[i]
        if mask not in seen:
            seen.add(mask)
            out.append(mask)
    return out


def forest_fusion_map(vocab: Vocabulary) -> FusionMap:
    """The three-component forest gluing map: component 1 is the single node,
    component 2 supplies its children, component 3 its right siblings."""
    star = vocab.extend(tuple((t, 1) for t in _tag_names(3)))
    mapping: dict[str, Formula] = {}
    for name, arity in vocab.relations:
        args = tuple(f"x{i}" for i in range(1, arity + 1))
        same = RelAtom(name, args)
        if name == "lt":
            mapping[name] = Or(same, And(RelAtom("Q1", ("x1",)),
                                         RelAtom("Q2", ("x2",))))
        elif name == "slt":
            mapping[name] = Or(same, And(And(RelAtom("Q1", ("x1",)),
                                             RelAtom("Q3", ("x2",))),
                                         RelAtom("R", ("x2",))))
        elif name == "R":
            mapping[name] = Or(And(RelAtom("Q3", ("x1",)), RelAtom("R", ("x1",))),
                               RelAtom("Q1", ("x1",)))
        else:
            mapping[name] = same
    return FusionMap.make(mapping, vocab, 3)


def forest_compose(single: Frame, below: Frame, right: Frame) -> Frame:
    """Glue a single node, a child forest and a right-sibling forest into one
    forest: the node becomes the leftmost root, below's roots its children,
    right's roots its next siblings."""
    if single.size != 1:
        raise StructureError("first component must be a single node")
    for name, part in (("child", below), ("sibling", right)):
        if not check_forest_shape(part, require_root_labels=True):
            raise StructureError(f"{name} component is not an R-labeled forest")
    vocab = single.vocab
    if below.vocab != vocab or right.vocab != vocab:
        raise StructureError("all components must share one vocabulary")
    if "R" not in vocab:
        raise StructureError("forest composition needs the root predicate R")
    return fuse([single, below, right], forest_fusion_map(vocab))
