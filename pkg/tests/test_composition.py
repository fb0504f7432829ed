import random

import pytest

from treelogic.composition import (FusionMap, component_offsets,
                                   disjoint_union, forest_compose, fuse,
                                   union_closure)
from treelogic.errors import SchemaError, StructureError
from treelogic.structures import (Frame, check_forest_shape,
                                  check_tree_shape, mask_elems,
                                  substructure, subforest_at)
from treelogic.syntax import Vocabulary, tree_vocabulary
from treelogic.testkit import (
    GenConfig, canonical_tree_code, frames_isomorphic, random_tree,
    relabeled_copy,
)

LIN = Vocabulary((("lt", 2),))
V = tree_vocabulary(2)


def chain(n, vocab=LIN):
    return Frame.make(vocab, n,
                      {"lt": [(i, j) for i in range(n) for j in range(n) if i < j]})


class TestDisjointUnion:
    def test_single_component(self):
        out = disjoint_union([chain(2)])
        assert out.size == 2
        assert out.tuples("Q1") == frozenset({(0,), (1,)})
        assert out.tuples("lt") == frozenset({(0, 1)})

    def test_size_is_sum(self):
        out = disjoint_union([chain(2), chain(3), chain(1)])
        assert out.size == 6
        assert component_offsets([chain(2), chain(3), chain(1)]) == [0, 2, 5]

    def test_listed_families_pairwise_unions(self):
        a = Frame.make(LIN, 1, {}, admissible=[0b0, 0b1])
        b = Frame.make(LIN, 1, {}, admissible=[0b0, 0b1])
        out = disjoint_union([a, b])
        assert out.admissible == (0b00, 0b01, 0b10, 0b11)

    def test_full_stays_full(self):
        assert disjoint_union([chain(2), chain(2)]).is_full


class TestFuse:
    def test_identity_equals_union_without_tags(self):
        parts = [chain(2), chain(3)]
        fused = fuse(parts, FusionMap.identity(LIN))
        union = disjoint_union(parts)
        assert fused.vocab == LIN
        assert fused.tuples("lt") == union.tuples("lt")
        assert fused.size == union.size

    def test_ordered_sum_of_chains(self):
        fm = FusionMap.make({"lt": "lt(x1,x2) | (Q1(x1) & Q2(x2))"}, LIN, 2)
        out = fuse([chain(2), chain(3)], fm)
        assert out.tuples("lt") == frozenset(
            (i, j) for i in range(5) for j in range(5) if i < j)

    def test_ordered_sum_is_tree_shaped(self):
        # over the tree vocabulary a chain is a tree; the sum stays one
        fm = FusionMap.make({
            "lt": "lt(x1,x2) | (Q1(x1) & Q2(x2))",
            "slt": "slt(x1,x2)",
            "R": "R(x1) & Q1(x1)",
            "P1": "P1(x1)", "P2": "P2(x1)",
        }, V, 2)
        out = fuse([chain(2, V), chain(3, V)], fm)
        assert check_tree_shape(out)

    def test_isomorphic_components_isomorphic_fusions(self):
        rng = random.Random(41)
        fm = FusionMap.make({"lt": "lt(x1,x2) | (Q1(x1) & Q2(x2))"}, LIN, 2)
        for seed in range(10):
            a, b = chain(rng.randint(1, 3)), chain(rng.randint(1, 3))
            a2, b2 = relabeled_copy(a, rng), relabeled_copy(b, rng)
            assert frames_isomorphic(fuse([a, b], fm), fuse([a2, b2], fm))

    def test_quantifier_free_enforced(self):
        with pytest.raises(SchemaError, match="quantifier-free"):
            FusionMap.make({"lt": "E z. lt(x1,z)"}, LIN, 2)

    def test_equality_allowed_in_fusion_formulas(self):
        fm = FusionMap.make({"lt": "x1 = x2"}, LIN, 2)
        out = fuse([chain(1), chain(2)], fm)
        assert out.tuples("lt") == frozenset({(0, 0), (1, 1), (2, 2)})

    def test_unknown_symbol_rejected(self):
        with pytest.raises(SchemaError, match="unknown symbols"):
            FusionMap.make({"lt": "lt(x1,x2)", "zz": "true"}, LIN, 2)

    def test_needs_every_symbol(self):
        with pytest.raises(SchemaError, match="misses"):
            FusionMap.make({}, LIN, 2)


class TestUnionClosure:
    def test_empty(self):
        assert union_closure([]) == [0]

    def test_two_singletons(self):
        out = union_closure([0b01, 0b10])
        assert sorted(mask_elems(m) for m in out) == [[], [0], [0, 1], [1]]

    def test_idempotent(self):
        once = union_closure([0b011, 0b100, 0b010])
        assert sorted(union_closure(once)) == sorted(once)


def single(labels=(), vocab=V):
    return Frame.make(vocab, 1, {"R": [(0,)], **{l: [(0,)] for l in labels}})


class TestForestCompose:
    def test_three_single_nodes(self):
        out = forest_compose(single(("P1",)), single(), single(("P2",)))
        assert out.size == 3
        assert out.tuples("lt") == frozenset({(0, 1)})
        assert out.tuples("slt") == frozenset({(0, 2)})
        assert out.tuples("R") == frozenset({(0,), (2,)})
        assert check_forest_shape(out)

    def test_single_must_be_single(self):
        with pytest.raises(StructureError, match="single node"):
            forest_compose(chain(2, V), single(), single())

    def test_inputs_must_carry_root_labels(self):
        bare = Frame.make(V, 1, {})
        with pytest.raises(StructureError, match="R-labeled"):
            forest_compose(single(), bare, single())

    def test_result_is_forest(self):
        rng = random.Random(42)
        for seed in range(15):
            t1 = random_tree(GenConfig(seed=seed, min_size=2, max_size=5))
            t2 = random_tree(GenConfig(seed=seed + 50, min_size=2, max_size=5))
            below = subforest_at(t1, t1.root)
            right = subforest_at(t2, t2.root)
            out = forest_compose(single(), below, right)
            assert check_forest_shape(out)

    def test_subforest_identity(self):
        # forest_compose(T|{a}, T_b, T_c) is isomorphic to T_a whenever a has
        # a first child b and a next sibling c
        hits = 0
        for seed in range(60):
            tree = random_tree(GenConfig(seed=seed, min_size=4, max_size=8))
            for a in range(tree.size):
                b, c = tree.first_child(a), tree.next_sibling(a)
                if b is None or c is None:
                    continue
                composed = forest_compose(substructure(tree.frame, [a]),
                                          subforest_at(tree, b),
                                          subforest_at(tree, c))
                assert canonical_tree_code(composed) == \
                    canonical_tree_code(subforest_at(tree, a))
                hits += 1
        assert hits >= 20
