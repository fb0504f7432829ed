"""Finite frames (relational structure + admissible-set family), finite
trees and forests, semantic tree-axiom checking, and substructure extraction.

Domains are dense integer ranges 0..n-1.  Admissible sets are bit masks over
the domain; `admissible is None` means the Full family (every subset).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import StructureError
from .syntax import Vocabulary, tree_vocabulary


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def mask_elems(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class Frame:
    """Immutable finite structure with an admissible-set family."""

    vocab: Vocabulary
    size: int
    rel: tuple[tuple[str, frozenset[tuple[int, ...]]], ...]
    admissible: tuple[int, ...] | None  # None = Full

    @staticmethod
    def make(vocab: Vocabulary,
             size: int,
             interp: Mapping[str, Iterable[tuple[int, ...]]],
             admissible: Iterable[int] | None = None) -> "Frame":
        if size < 1:
            raise StructureError("empty domain: frames need at least one element")
        rel = {}
        for name, _arity in vocab.relations:
            rel[name] = frozenset(tuple(t) for t in interp.get(name, ()))
        for name in interp:
            if name not in vocab:
                raise StructureError(f"unknown relation symbol {name!r}")
        for name, tuples in rel.items():
            arity = vocab.arity[name]
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} has wrong arity for {name}")
                if any(not (0 <= e < size) for e in t):
                    raise StructureError(f"tuple {t} out of range for domain size {size}")
        adm = None
        if admissible is not None:
            full = (1 << size) - 1
            masks = sorted(set(admissible))
            if any(m < 0 or m > full for m in masks):
                raise StructureError("admissible set out of range")
            adm = tuple(masks)
        return Frame(vocab, size,
                     tuple(sorted((k, v) for k, v in rel.items())), adm)

    @cached_property
    def interp(self) -> dict[str, frozenset[tuple[int, ...]]]:
        return dict(self.rel)

    def tuples(self, symbol: str) -> frozenset[tuple[int, ...]]:
        return self.interp[symbol]

    @property
    def is_full(self) -> bool:
        return self.admissible is None

    def family(self) -> Iterator[int]:
        if self.admissible is None:
            return iter(range(1 << self.size))
        return iter(self.admissible)

    def family_size(self) -> int:
        return (1 << self.size) if self.admissible is None else len(self.admissible)

    def in_family(self, mask: int) -> bool:
        if self.admissible is None:
            return 0 <= mask < (1 << self.size)
        return mask in self.admissible

    def with_admissible(self, admissible: Iterable[int] | None) -> "Frame":
        return Frame.make(self.vocab, self.size, self.interp, admissible)

    def to_json(self) -> dict:
        doc = {
            "vocab": [{"name": n, "arity": a} for n, a in self.vocab.relations],
            "n": self.size,
            "rel": {name: sorted(list(t) for t in tuples)
                    for name, tuples in self.rel if tuples},
            "admissible": "full" if self.admissible is None
            else [mask_elems(m) for m in self.admissible],
        }
        return doc


@dataclass(frozen=True)
class ParamFrame:
    """Frame expanded with ordered element and admissible-set parameters."""

    frame: Frame
    elems: tuple[int, ...] = ()
    sets: tuple[int, ...] = ()

    def __post_init__(self):
        for e in self.elems:
            if not (0 <= e < self.frame.size):
                raise StructureError(f"parameter element {e} out of range")
        for m in self.sets:
            if not self.frame.in_family(m):
                raise StructureError("set parameter is not admissible")


# ---------------------------------------------------------------------------
# Parsing structure documents


def parse_structure(text: str, vocab: Vocabulary | None = None) -> Frame:
    """Load a frame from the JSON structure format or the tree shorthand."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"malformed structure document: {exc}") from exc
    if not isinstance(doc, dict):
        raise StructureError("structure document must be a JSON object")
    if "tree" in doc:
        return _frame_from_tree_doc(doc["tree"], vocab)
    if vocab is None:
        if "vocab" in doc:
            try:
                vocab = Vocabulary(tuple((r["name"], int(r["arity"]))
                                         for r in doc["vocab"]))
            except (TypeError, KeyError, ValueError) as exc:
                raise StructureError(f"bad vocab section: {exc}") from exc
        else:
            vocab = tree_vocabulary()
    if "n" not in doc:
        raise StructureError("missing domain size 'n'")
    size = doc["n"]
    if not isinstance(size, int) or size < 1:
        raise StructureError("empty domain: 'n' must be a positive integer")
    rel = doc.get("rel", {})
    if not isinstance(rel, dict):
        raise StructureError("'rel' must map symbols to tuple lists")
    adm_doc = doc.get("admissible", "full")
    if adm_doc == "full":
        admissible = None
    else:
        if not isinstance(adm_doc, list):
            raise StructureError("'admissible' must be \"full\" or a list of element lists")
        admissible = []
        for entry in adm_doc:
            if not all(isinstance(e, int) and 0 <= e < size for e in entry):
                raise StructureError(f"admissible set {entry} out of range")
            admissible.append(mask_of(entry))
    return Frame.make(vocab, size, rel, admissible)


def _frame_from_tree_doc(node: dict, vocab: Vocabulary | None) -> Frame:
    """Tree shorthand: nested {"label": [...], "children": [...]} objects.

    Nodes are numbered in preorder; lt is the strict ancestor relation, slt
    the transitively closed sibling order, R marks the root.
    """
    labels: dict[int, list[str]] = {}
    children: dict[int, list[int]] = {}
    counter = [0]

    def walk(nd) -> int:
        if not isinstance(nd, dict):
            raise StructureError("tree nodes must be JSON objects")
        idx = counter[0]
        counter[0] += 1
        labels[idx] = list(nd.get("label", ()))
        children[idx] = [walk(c) for c in nd.get("children", ())]
        return idx

    root = walk(node)
    size = counter[0]
    lt: set[tuple[int, int]] = set()
    slt: set[tuple[int, int]] = set()

    def descendants(i: int) -> list[int]:
        out = []
        for c in children[i]:
            out.append(c)
            out.extend(descendants(c))
        return out

    for i in range(size):
        for d in descendants(i):
            lt.add((i, d))
        kids = children[i]
        for a in range(len(kids)):
            for b in range(a + 1, len(kids)):
                slt.add((kids[a], kids[b]))

    used = sorted({l for ls in labels.values() for l in ls},
                  key=lambda s: (len(s), s))
    if vocab is None:
        n_labels = 0
        for l in used:
            if l.startswith("P") and l[1:].isdigit():
                n_labels = max(n_labels, int(l[1:]))
            else:
                raise StructureError(f"unknown label {l!r} (expected P1..Pn)")
        vocab = tree_vocabulary(max(n_labels, 2))
    interp: dict[str, list[tuple[int, ...]]] = {
        "lt": [p for p in lt], "slt": [p for p in slt], "R": [(root,)]}
    for i, ls in labels.items():
        for l in ls:
            if l not in vocab:
                raise StructureError(f"unknown label {l!r}")
            interp.setdefault(l, []).append((i,))
    return Frame.make(vocab, size, interp)


# ---------------------------------------------------------------------------
# Shape checking (graph-theoretic, no formula evaluation)


def _strict_order_violation(pairs: set[tuple[int, int]]) -> bool:
    if any(a == b for a, b in pairs):
        return True
    for a, b in pairs:
        for c, d in pairs:
            if b == c and (a, d) not in pairs:
                return True
    return False


def _analyze_order(frame: Frame):
    lt = {tuple(t) for t in frame.tuples("lt")}
    n = frame.size
    if _strict_order_violation(lt):
        return None
    # Cover relation (immediate children) of a finite strict order.
    covers = {(a, b) for a, b in lt
              if not any((a, c) in lt and (c, b) in lt for c in range(n))}
    parent: dict[int, int] = {}
    for a, b in covers:
        if b in parent:
            return None  # two immediate predecessors
        parent[b] = a
    roots = [x for x in range(n) if not any((a, x) in lt for a in range(n))]
    return lt, covers, parent, roots


def _sibling_groups(parent: dict[int, int], roots: list[int], n: int) -> list[list[int]]:
    groups: dict[int | None, list[int]] = {}
    for x in range(n):
        groups.setdefault(parent.get(x), []).append(x)
    # Children of a common parent form a group; roots form their own group.
    return [sorted(g) for g in groups.values()]


def _check_sibling_order(frame: Frame, groups: list[list[int]]) -> bool:
    slt = {tuple(t) for t in frame.tuples("slt")}
    if _strict_order_violation(slt):
        return False
    group_of = {}
    for gi, g in enumerate(groups):
        for x in g:
            group_of[x] = gi
    for a, b in slt:
        if group_of.get(a) != group_of.get(b):
            return False  # relates non-siblings
    for g in groups:
        for i in g:
            for j in g:
                if i != j and (i, j) not in slt and (j, i) not in slt:
                    return False  # not total on the group
    return True


def check_tree_shape(frame: Frame) -> bool:
    """Purely graph-theoretic finite-tree test: lt is a strict order whose
    covers form a parent function with a unique root; slt totally orders each
    sibling set and relates only siblings."""
    _require_tree_vocab(frame)
    analysis = _analyze_order(frame)
    if analysis is None:
        return False
    lt, covers, parent, roots = analysis
    if len(roots) != 1:
        return False
    # The lone root forms a singleton sibling group, so slt may not touch it.
    return _check_sibling_order(frame, _sibling_groups(parent, roots, frame.size))


def check_forest_shape(frame: Frame, require_root_labels: bool = True) -> bool:
    """Forest variant: several roots allowed, linearly ordered by slt (the
    roots count as one sibling group); when `require_root_labels`, R must
    mark exactly the lt-minimal elements."""
    _require_tree_vocab(frame)
    analysis = _analyze_order(frame)
    if analysis is None:
        return False
    lt, covers, parent, roots = analysis
    if not _check_sibling_order(frame, _sibling_groups(parent, roots, frame.size)):
        return False
    if require_root_labels:
        r = {t[0] for t in frame.tuples("R")}
        if r != set(roots):
            return False
    return True


def _require_tree_vocab(frame: Frame) -> None:
    for sym in ("lt", "slt"):
        if sym not in frame.vocab:
            raise StructureError(f"frame vocabulary lacks {sym!r}; not a tree vocabulary")


def check_tree_axioms(frame: Frame) -> dict[str, bool]:
    """Evaluate the ten closed tree axioms on the frame, one verdict each."""
    _require_tree_vocab(frame)
    from .evaluate import evaluate
    from .transforms import axiom_instance
    report = {}
    for i in range(1, 11):
        name = f"T{i}"
        report[name] = evaluate(frame, axiom_instance(name, {}))
    return report


# ---------------------------------------------------------------------------
# Trees with cached indexes


@dataclass(frozen=True)
class TreeStructure:
    """A Full frame over the tree vocabulary that passes check_tree_shape,
    with parent/children/root indexes cached."""

    frame: Frame

    def __post_init__(self):
        if not self.frame.is_full:
            raise StructureError("trees use the Full admissible family")
        if not check_tree_shape(self.frame):
            raise StructureError("frame does not have tree shape")

    @property
    def size(self) -> int:
        return self.frame.size

    @cached_property
    def _indexes(self):
        lt = {tuple(t) for t in self.frame.tuples("lt")}
        slt = {tuple(t) for t in self.frame.tuples("slt")}
        n = self.frame.size
        covers = {(a, b) for a, b in lt
                  if not any((a, c) in lt and (c, b) in lt for c in range(n))}
        parent = {b: a for a, b in covers}
        root = next(x for x in range(n) if x not in parent)
        children = {x: sorted((c for c in range(n) if parent.get(c) == x),
                              key=lambda c: sum((d, c) in slt for d in range(n)))
                    for x in range(n)}
        return parent, children, root, lt, slt

    @property
    def parent(self) -> dict[int, int]:
        return self._indexes[0]

    @property
    def children(self) -> dict[int, list[int]]:
        return self._indexes[1]

    @property
    def root(self) -> int:
        return self._indexes[2]

    def first_child(self, a: int) -> int | None:
        kids = self.children[a]
        return kids[0] if kids else None

    def next_sibling(self, a: int) -> int | None:
        slt = self._indexes[4]
        after = [b for b in range(self.size)
                 if (a, b) in slt and not any((a, c) in slt and (c, b) in slt
                                              for c in range(self.size))]
        return after[0] if after else None


def labels_of(frame: Frame, elem: int) -> list[str]:
    out = []
    for name, arity in frame.vocab.relations:
        if arity == 1 and (elem,) in frame.tuples(name):
            out.append(name)
    return out


# ---------------------------------------------------------------------------
# Substructure and subforests


def substructure(frame: Frame, elems: Iterable[int]) -> Frame:
    """Induced substructure on `elems` (relabeled to 0..k-1 in element
    order); the admissible family becomes {X ∩ A} deduplicated."""
    keep = sorted(set(elems))
    if not keep:
        raise StructureError("substructure needs a nonempty element set")
    if any(not (0 <= e < frame.size) for e in keep):
        raise StructureError("substructure element out of range")
    index = {e: i for i, e in enumerate(keep)}
    interp = {}
    for name, tuples in frame.rel:
        interp[name] = [tuple(index[e] for e in t) for t in tuples
                        if all(e in index for e in t)]
    admissible = None
    if frame.admissible is not None:
        keep_mask = mask_of(keep)
        admissible = {mask_of(index[e] for e in mask_elems(m & keep_mask))
                      for m in frame.admissible}
    return Frame.make(frame.vocab, len(keep), interp, admissible)


def subforest_elements(tree: TreeStructure, a: int) -> list[int]:
    """Elements of the quasi-forest at a: the set {x | ∃z (a ⪯ z ∧ z ≤ x)},
    i.e. a, its right siblings, and all their descendants."""
    slt = tree._indexes[4]
    lt = tree._indexes[3]
    n = tree.size
    zs = [z for z in range(n) if z == a or (a, z) in slt]
    out = {x for x in range(n) if any(z == x or (z, x) in lt for z in zs)}
    return sorted(out)


def subforest_at(tree: TreeStructure, a: int) -> Frame:
    """Substructure over a, its right siblings and their descendants, with R
    reinterpreted to mark exactly the lt-minimal elements of the result."""
    if not (0 <= a < tree.size):
        raise StructureError(f"element {a} out of range")
    sub = substructure(tree.frame, subforest_elements(tree, a))
    lt = sub.tuples("lt")
    roots = [x for x in range(sub.size)
             if not any((p, x) in lt for p in range(sub.size))]
    interp = dict(sub.interp)
    interp["R"] = [(r,) for r in roots]
    return Frame.make(sub.vocab, sub.size, interp, sub.admissible)
