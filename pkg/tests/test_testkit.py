import random

import pytest

from treelogic.errors import EnumerationBudget, StructureError
from treelogic.structures import Frame, check_tree_axioms
from treelogic.syntax import (
    ExistsElem, ExistsSet, Logic, Top, Vocabulary, admissible_in,
    check_positive, parse_formula, quantifier_depth, render_formula,
    tree_vocabulary,
)
from treelogic.testkit import (
    GenConfig, canonical_tree_code, enumerate_formulas, frames_isomorphic,
    random_formula, random_frame, random_near_tree, random_tree,
    relabeled_copy,
)

UN = Vocabulary((("P1", 1),))


class TestReproducibility:
    def test_same_seed_same_frame(self):
        cfg = GenConfig(seed=99, min_size=2, max_size=6)
        assert random_frame(cfg) == random_frame(cfg)
        assert random_tree(cfg).frame == random_tree(cfg).frame

    def test_same_seed_same_formula(self):
        cfg = GenConfig(seed=77, logic=Logic.MSO, max_depth=3)
        assert random_formula(cfg) == random_formula(cfg)

    def test_different_seeds_vary(self):
        frames = {random_frame(GenConfig(seed=s, min_size=2, max_size=6))
                  for s in range(8)}
        assert len(frames) > 1


class TestRandomTree:
    def test_always_passes_axioms(self):
        for seed in range(20):
            tree = random_tree(GenConfig(seed=seed, min_size=1, max_size=7))
            assert all(check_tree_axioms(tree.frame).values())


class TestRandomFormula:
    def test_round_trip_and_admissible(self):
        for seed in range(120):
            logic = list(Logic)[seed % 4]
            cfg = GenConfig(seed=seed, logic=logic, max_depth=2)
            phi = random_formula(cfg, free_elem=("x",))
            assert admissible_in(phi, logic)
            assert parse_formula(render_formula(phi), cfg.vocab) == phi
            assert quantifier_depth(phi) <= cfg.max_depth

    def test_lfp_bodies_positive(self):
        from treelogic.syntax import LFP

        def collect(phi):
            found = []
            stack = [phi]
            while stack:
                node = stack.pop()
                if isinstance(node, LFP):
                    found.append(node)
                for attr in ("body", "left", "right"):
                    child = getattr(node, attr, None)
                    if child is not None:
                        stack.append(child)
            return found

        for seed in range(120):
            cfg = GenConfig(seed=seed, logic=Logic.FOLFP1, max_depth=3)
            phi = random_formula(cfg, free_elem=("x",))
            for node in collect(phi):
                assert check_positive(node.body, node.setvar)


class TestNearTrees:
    def test_unknown_axiom_rejected(self):
        with pytest.raises(ValueError):
            random_near_tree(GenConfig(), "T11")


class TestEnumeration:
    def test_depth_zero_includes_true_no_quantifiers(self):
        out = enumerate_formulas(UN, 0, ("x1",), 1, Logic.FO)
        assert Top() in out
        assert not any(isinstance(f, (ExistsElem, ExistsSet)) for f in out)

    def test_syntactically_duplicate_free(self):
        out = enumerate_formulas(UN, 1, ("x1", "x2"), 1, Logic.FO)
        assert len(out) == len(set(out))

    def test_budget_guard(self):
        with pytest.raises(EnumerationBudget):
            enumerate_formulas(tree_vocabulary(2), 2, ("x1", "x2", "x3"), 2,
                               Logic.MSO, max_count=50)

    def test_dedup_mode_small_and_complete_on_pool(self):
        frames = [Frame.make(UN, n, {"P1": [(i,) for i in range(k)]})
                  for n in (1, 2) for k in range(n + 1)]
        out = enumerate_formulas(UN, 1, ("x1",), 2, Logic.FO,
                                 dedup_frames=tuple(frames))
        # distinguishes the one- from the two-element frame
        from treelogic.evaluate import evaluate
        assert any(evaluate(frames[0], f) != evaluate(frames[1], f) for f in out)


class TestCanonicalCodes:
    def test_single_labeled_node(self):
        frame = Frame.make(tree_vocabulary(1), 1, {"P1": [(0,)], "R": [(0,)]})
        assert canonical_tree_code(frame) == "(P1,R)"

    def test_equal_trees_equal_codes(self):
        for seed in range(10):
            a = random_tree(GenConfig(seed=seed, min_size=2, max_size=6)).frame
            assert canonical_tree_code(a) == canonical_tree_code(a)
            rng = random.Random(seed)
            b = relabeled_copy(a, rng)
            assert canonical_tree_code(a) == canonical_tree_code(b)

    def test_distinct_orders_distinct_codes(self):
        v = tree_vocabulary(1)
        left = Frame.make(v, 3, {"lt": [(0, 1), (0, 2)], "slt": [(1, 2)],
                                 "R": [(0,)], "P1": [(1,)]})
        right = Frame.make(v, 3, {"lt": [(0, 1), (0, 2)], "slt": [(1, 2)],
                                  "R": [(0,)], "P1": [(2,)]})
        assert canonical_tree_code(left) != canonical_tree_code(right)

    def test_non_forest_rejected(self):
        frame = Frame.make(tree_vocabulary(1), 2, {"lt": [(0, 1), (1, 0)]})
        with pytest.raises(StructureError, match="forest"):
            canonical_tree_code(frame)


class TestIsomorphism:
    def test_relabeled_copies(self):
        rng = random.Random(55)
        for seed in range(10):
            frame = random_frame(GenConfig(seed=seed, min_size=1, max_size=4), rng)
            assert frames_isomorphic(frame, relabeled_copy(frame, rng))

    def test_label_count_difference(self):
        a = Frame.make(UN, 2, {"P1": [(0,)]})
        b = Frame.make(UN, 2, {"P1": [(0,), (1,)]})
        assert not frames_isomorphic(a, b)
