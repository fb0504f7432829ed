import json
import random

import pytest

from treelogic.errors import StructureError
from treelogic.evaluate import Assignment, evaluate
from treelogic.structures import (
    Frame, TreeStructure, check_forest_shape, check_tree_axioms,
    check_tree_shape, mask_of, parse_structure, subforest_at,
    subforest_elements, substructure,
)
from treelogic.syntax import parse_formula, tree_vocabulary
from treelogic.testkit import GenConfig, random_frame, random_near_tree, random_tree

V = tree_vocabulary(2)


def tree_doc(node):
    return json.dumps({"tree": node})


def chain_tree(n, labels=()):
    node = {"label": list(labels), "children": []}
    for _ in range(n - 1):
        node = {"label": [], "children": [node]}
    return parse_structure(tree_doc(node))


class TestParseStructure:
    def test_single_point(self):
        frame = parse_structure('{"n":1,"rel":{},"admissible":"full"}')
        assert frame.size == 1 and frame.is_full

    def test_chain_loader_closure(self):
        # the loader's lt equals the transitive closure of the child edges
        frame = chain_tree(3)
        edges = {(0, 1), (1, 2)}
        closure = set(edges)
        changed = True
        while changed:
            changed = False
            for a, b in list(closure):
                for c, d in list(closure):
                    if b == c and (a, d) not in closure:
                        closure.add((a, d))
                        changed = True
        assert set(frame.tuples("lt")) == closure

    def test_empty_domain_rejected(self):
        with pytest.raises(StructureError, match="empty domain"):
            parse_structure('{"n":0,"rel":{}}')

    def test_out_of_range_rejected(self):
        with pytest.raises(StructureError, match="range"):
            parse_structure('{"n":2,"rel":{"lt":[[0,5]]}}')

    def test_unknown_symbol_rejected(self):
        with pytest.raises(StructureError, match="unknown"):
            parse_structure('{"n":2,"rel":{"zz":[[0,1]]}}')

    def test_listed_admissible(self):
        frame = parse_structure('{"n":2,"rel":{},"admissible":[[0],[0,1],[0]]}')
        assert frame.admissible == (0b01, 0b11)


class TestTreeShape:
    def test_chain(self):
        assert check_tree_shape(chain_tree(3)) is True

    def test_cycle(self):
        frame = Frame.make(V, 2, {"lt": [(0, 1), (1, 0)]})
        assert check_tree_shape(frame) is False

    def test_two_ordered_children(self):
        doc = {"label": [], "children": [{"label": [], "children": []},
                                         {"label": [], "children": []}]}
        assert check_tree_shape(parse_structure(tree_doc(doc))) is True

    def test_unordered_children(self):
        frame = Frame.make(V, 3, {"lt": [(0, 1), (0, 2)]})
        assert check_tree_shape(frame) is False

    def test_slt_on_non_siblings(self):
        frame = Frame.make(V, 3, {"lt": [(0, 1), (0, 2)],
                                  "slt": [(1, 2), (0, 1)]})
        assert check_tree_shape(frame) is False


class TestTreeAxioms:
    def test_single_node_all_pass(self):
        report = check_tree_axioms(parse_structure('{"n":1,"rel":{}}'))
        assert all(report.values())

    def test_two_roots_fail_t4(self):
        frame = Frame.make(V, 2, {})
        report = check_tree_axioms(frame)
        assert report["T4"] is False

    def test_sample_equivalence_with_shape(self):
        # small slice of the define-finite acceptance criterion
        rng = random.Random(0)
        cfg = GenConfig(min_size=1, max_size=5)
        for seed in range(40):
            frame = random_frame(GenConfig(seed=seed, min_size=1, max_size=5), rng)
            report = check_tree_axioms(frame)
            assert all(report.values()) == check_tree_shape(frame)
        for seed in range(10):
            tree = random_tree(GenConfig(seed=seed, min_size=1, max_size=6), rng)
            assert all(check_tree_axioms(tree.frame).values())

    def test_t3_follows_from_t1_t2_t5(self):
        rng = random.Random(1)
        for seed in range(150):
            frame = random_frame(GenConfig(seed=seed, min_size=1, max_size=5), rng)
            report = check_tree_axioms(frame)
            if report["T1"] and report["T2"] and report["T5"]:
                assert report["T3"]
            if report["T6"] and report["T7"] and report["T10"]:
                assert report["T8"] and report["T9"]

    def test_t4_is_independent_of_t1_t2_t5(self):
        # The empty order on two points satisfies T1, T2, T5 vacuously but
        # has two roots; rootedness is not derivable from the other three.
        frame = Frame.make(V, 2, {"slt": []})
        report = check_tree_axioms(frame)
        assert report["T1"] and report["T2"] and report["T5"]
        assert report["T4"] is False


class TestSubstructure:
    def test_full_domain_identity(self):
        frame = chain_tree(4)
        assert substructure(frame, range(4)) == frame

    def test_listed_intersection(self):
        frame = Frame.make(V, 3, {}, admissible=[mask_of([0]), mask_of([1, 2])])
        sub = substructure(frame, [1])
        assert sub.admissible == (0b0, 0b1)

    def test_idempotent(self):
        frame = random_tree(GenConfig(seed=9, min_size=4, max_size=7)).frame
        sub = substructure(frame, [0, 2, 3])
        assert substructure(sub, range(sub.size)) == sub

    def test_empty_rejected(self):
        with pytest.raises(StructureError, match="nonempty"):
            substructure(chain_tree(2), [])

    def test_full_frames_altsub(self):
        # {X ∩ A} equals {X ⊆ A} when the family is the full powerset
        frame = random_tree(GenConfig(seed=3, min_size=4, max_size=5)).frame
        sub = substructure(frame, [0, 1, 2])
        assert sub.is_full  # Full stays Full, which is exactly {X ⊆ A}


class TestSubforest:
    def test_whole_tree(self):
        frame = chain_tree(3)
        tree = TreeStructure(frame)
        forest = subforest_at(tree, tree.root)
        assert forest.size == 3
        assert forest.tuples("R") == frozenset({(0,)})

    def test_leaf_single_node(self):
        tree = TreeStructure(chain_tree(3))
        leaf = max(range(3), key=lambda i: sum(1 for p in tree.frame.tuples("lt") if p[1] == i))
        forest = subforest_at(tree, leaf)
        assert forest.size == 1
        assert forest.tuples("R") == frozenset({(0,)})

    def test_elements_match_evaluator_comprehension(self):
        # domain = {x | ∃z (a ⪯ z ∧ z ≤ x)} computed through the evaluator
        phi = parse_formula("E z. ((slt(a,z) | a = z) & (lt(z,x) | z = x))", V)
        for seed in range(25):
            tree = random_tree(GenConfig(seed=seed, min_size=2, max_size=7))
            for a in range(tree.size):
                expected = sorted(
                    x for x in range(tree.size)
                    if evaluate(tree.frame, phi, Assignment(elem={"a": a, "x": x})))
                assert subforest_elements(tree, a) == expected

    def test_forest_shape_always(self):
        for seed in range(25):
            tree = random_tree(GenConfig(seed=seed, min_size=2, max_size=7))
            for a in range(tree.size):
                assert check_forest_shape(subforest_at(tree, a))


class TestNearTrees:
    def test_requested_axiom_fails(self):
        rng = random.Random(7)
        for i in range(1, 11):
            name = f"T{i}"
            frame = random_near_tree(GenConfig(seed=i), name, rng)
            report = check_tree_axioms(frame)
            assert report[name] is False, name
            assert check_tree_shape(frame) is False
