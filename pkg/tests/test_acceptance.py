"""Acceptance suite: one test per acceptance criterion, each printing a
PASS line with its sample counts and elapsed time.  Tolerances and counts
are pinned here; run with `pytest tests/test_acceptance.py -s -v`.
"""

import glob
import itertools
import json
import os
import random
import time

import pytest

from treelogic.composition import (FusionMap, component_offsets, fuse,
                                   union_closure)
from treelogic.evaluate import Assignment, eval_lfp_kleene, eval_tc_path, evaluate
from treelogic.games import GameConfig, Player, winner
from treelogic.proofs import check_proof, load_proof
from treelogic.structures import (Frame, ParamFrame, check_tree_axioms,
                                  check_tree_shape, subforest_at, substructure)
from treelogic.syntax import (LFP, TC, Logic, Vocabulary, check_positive,
                              free_variables, parse_formula, tree_vocabulary)
from treelogic.testkit import (GenConfig, canonical_tree_code,
                               enumerate_formulas, random_formula,
                               random_frame, random_near_tree, random_tree,
                               relabeled_copy_with_map)
from treelogic.transforms import chi_finiteness, lfp_to_mso, relativize, tc_to_lfp

V1 = tree_vocabulary(1)
V2 = tree_vocabulary(2)
UN = Vocabulary((("P1", 1),))
SIG = Vocabulary((("lt", 2), ("P1", 1)))

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")


def report(name, detail):
    print(f"\nPASS {name}: {detail}")


# ---------------------------------------------------------------------------


def test_tc_semantics_equivalence():
    """TC set-based clause vs finite-path reachability on Full frames:
    500 instances, |M| <= 6, qd <= 2, 0 mismatches, < 60 s."""
    rng = random.Random(101)
    t0 = time.time()
    checked = 0
    while checked < 500:
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=1, max_size=6,
                        logic=Logic.FOTC1, vocab=V1, max_depth=1)
        frame = random_frame(cfg, rng)
        body = random_formula(cfg, rng, free_elem=("x", "y", "u", "v"))
        tc = TC("x", "y", body, "u", "v")
        g = Assignment(elem={"u": rng.randrange(frame.size),
                             "v": rng.randrange(frame.size)})
        assert evaluate(frame, tc, g) == eval_tc_path(frame, g, tc)
        checked += 1
    elapsed = time.time() - t0
    assert elapsed < 60
    report("TC semantics equivalence", f"{checked} instances, {elapsed:.1f}s")


def test_lfp_definition_vs_kleene():
    """Intersection-of-prefixed-points clause vs Kleene iteration:
    500 instances, |M| <= 6, 0 mismatches, < 60 s."""
    rng = random.Random(102)
    t0 = time.time()
    checked = 0
    while checked < 500:
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=1, max_size=6,
                        logic=Logic.FOLFP1, vocab=V1, max_depth=1)
        frame = random_frame(cfg, rng)
        body = random_formula(cfg, rng, free_elem=("x",), free_sets=("X",))
        if not check_positive(body, "X"):
            continue
        lfp = LFP("X", "x", body, "y")
        g = Assignment(elem={"y": rng.randrange(frame.size)})
        assert evaluate(frame, lfp, g) == eval_lfp_kleene(frame, g, lfp)
        checked += 1
    elapsed = time.time() - t0
    assert elapsed < 60
    report("LFP definition vs Kleene", f"{checked} instances, {elapsed:.1f}s")


def test_translation_soundness():
    """eval(phi) = eval(phi') for the LFP->MSO translation and
    eval(phi) = eval(phi'' ) = eval(mso(phi'')) for TC->LFP, 500 pairs each."""
    rng = random.Random(103)
    t0 = time.time()
    for _ in range(500):
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=1, max_size=5,
                        logic=Logic.FOLFP1, vocab=V1, max_depth=2)
        frame = random_frame(cfg, rng)
        phi = random_formula(cfg, rng, free_elem=("y",))
        g = Assignment(elem={"y": rng.randrange(frame.size)})
        assert evaluate(frame, phi, g) == evaluate(frame, lfp_to_mso(phi), g)
    for _ in range(500):
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=1, max_size=5,
                        logic=Logic.FOTC1, vocab=V1, max_depth=2)
        frame = random_frame(cfg, rng)
        phi = random_formula(cfg, rng, free_elem=("u",))
        g = Assignment(elem={"u": rng.randrange(frame.size)})
        expected = evaluate(frame, phi, g)
        via_lfp = tc_to_lfp(phi)
        assert evaluate(frame, via_lfp, g) == expected
        assert evaluate(frame, lfp_to_mso(via_lfp), g) == expected
    report("translation soundness", f"500 + 500 pairs, {time.time()-t0:.1f}s")


def test_relativization_lemma():
    """M,g |= REL(phi,psi,x) iff M|A,g |= phi, 300 instances including
    explicit TC and LFP bodies."""
    rng = random.Random(104)
    t0 = time.time()
    guards = ["P1(x9)", "P1(x9) | P2(x9)", "!P2(x9)", "E z9. lt(z9,x9)"]
    logics = (Logic.FO, Logic.MSO, Logic.FOTC1, Logic.FOLFP1)
    done = tc_bodies = lfp_bodies = 0
    while done < 300:
        logic = logics[done % 4]
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=2, max_size=5,
                        logic=logic, vocab=V2, max_depth=2)
        frame = random_frame(cfg, rng)
        guard = parse_formula(guards[rng.randrange(4)], V2)
        domain = [a for a in range(frame.size)
                  if evaluate(frame, guard, Assignment(elem={"x9": a}))]
        if not domain:
            continue
        if logic is Logic.FOTC1 and done % 8 < 4:
            body = random_formula(cfg, rng, free_elem=("p", "q", "u", "v"))
            phi = TC("p", "q", body, "u", "v")
            tc_bodies += 1
        elif logic is Logic.FOLFP1 and done % 8 < 4:
            body = random_formula(cfg, rng, free_elem=("p", "u", "v"),
                                  free_sets=("W",))
            if not check_positive(body, "W"):
                continue
            phi = LFP("W", "p", body, "u")
            lfp_bodies += 1
        else:
            free_sets = ("Y",) if logic in (Logic.MSO, Logic.FOLFP1) else ()
            phi = random_formula(cfg, rng, free_elem=("u", "v"),
                                 free_sets=free_sets)
        rel = relativize(phi, guard, "x9")
        index = {e: i for i, e in enumerate(sorted(domain))}
        sub = substructure(frame, domain)
        fe, fs = free_variables(phi)
        g_big = Assignment(elem={v: rng.choice(domain) for v in fe})
        g_sub = Assignment(elem={v: index[e] for v, e in g_big.elem.items()})
        for s in fs:
            subset = [e for e in domain if rng.random() < 0.5]
            g_big.sets[s] = sum(1 << e for e in subset)
            g_sub.sets[s] = sum(1 << index[e] for e in subset)
        assert evaluate(frame, rel, g_big) == evaluate(sub, phi, g_sub)
        done += 1
    report("relativization lemma",
           f"{done} instances ({tc_bodies} TC, {lfp_bodies} LFP bodies), "
           f"{time.time()-t0:.1f}s")


def _colored_frames():
    return [Frame.make(UN, n, {"P1": [(i,) for i in range(k)]})
            for n in (1, 2, 3) for k in range(n + 1)]


def test_ef_adequacy_tiny_scale():
    """Game winner iff formula-distinguishability, exhaustive over all
    size<=3 frames over {P1} up to isomorphism, FO and MSO, n <= 2, < 5 min."""
    t0 = time.time()
    frames = _colored_frames()
    pairs = list(itertools.combinations_with_replacement(range(len(frames)), 2))
    checked = 0
    for logic in (Logic.FO, Logic.MSO):
        for n in (0, 1, 2):
            formulas = enumerate_formulas(UN, n, ("x1", "x2"), 2, logic,
                                          set_pool=("X", "Y"),
                                          dedup_frames=tuple(frames))
            vectors = [tuple(evaluate(f, phi) for f in frames)
                       for phi in formulas]
            for i, j in pairs:
                cfg = GameConfig(logic, n, ParamFrame(frames[i]),
                                 ParamFrame(frames[j]))
                dup_wins = winner(cfg) is Player.DUPLICATOR
                indistinguishable = all(v[i] == v[j] for v in vectors)
                assert dup_wins == indistinguishable, (logic, n, i, j)
                checked += 1
    elapsed = time.time() - t0
    assert elapsed < 300
    report("EF adequacy (FO, MSO)",
           f"{checked} (pair, n, logic) combinations, {elapsed:.1f}s")


def test_game_sanity():
    """Isomorphic frames are Duplicator-won for every logic (n <= 3);
    Duplicator wins are monotone downward in n; n-equivalence is an
    equivalence relation on a 30-frame pool per logic."""
    rng = random.Random(105)
    t0 = time.time()
    # isomorphic pairs, n up to 3
    for logic in Logic:
        for seed in range(3):
            frame = random_frame(GenConfig(seed=seed, min_size=1, max_size=3,
                                           vocab=UN), rng)
            copy, _ = relabeled_copy_with_map(frame, rng)
            for n in (1, 2, 3):
                cfg = GameConfig(logic, n, ParamFrame(frame), ParamFrame(copy))
                assert winner(cfg) is Player.DUPLICATOR, (logic, n)
    # monotonicity
    for seed in range(12):
        f = random_frame(GenConfig(seed=seed, min_size=1, max_size=3, vocab=UN), rng)
        g = random_frame(GenConfig(seed=seed + 999, min_size=1, max_size=3,
                                   vocab=UN), rng)
        for logic in Logic:
            wins = [winner(GameConfig(logic, n, ParamFrame(f), ParamFrame(g)))
                    is Player.DUPLICATOR for n in (0, 1, 2)]
            for lo, hi in zip(wins, wins[1:]):
                assert lo or not hi  # hi implies lo
    # equivalence relation on a 30-frame pool
    pool = [random_frame(GenConfig(seed=s, min_size=1, max_size=3, vocab=UN), rng)
            for s in range(30)]
    for logic in Logic:
        table = {}
        for i, j in itertools.product(range(30), repeat=2):
            if i <= j:
                cfg = GameConfig(logic, 1, ParamFrame(pool[i]), ParamFrame(pool[j]))
                table[i, j] = winner(cfg) is Player.DUPLICATOR
        eq = lambda i, j: table[min(i, j), max(i, j)]  # noqa: E731
        for i in range(30):
            assert eq(i, i)  # reflexive (also: symmetric by game symmetry)
        for i, j in itertools.combinations(range(30), 2):
            cfg = GameConfig(logic, 1, ParamFrame(pool[j]), ParamFrame(pool[i]))
            assert (winner(cfg) is Player.DUPLICATOR) == eq(i, j)  # symmetric
        for i, j, k in itertools.combinations(range(30), 3):
            if eq(i, j) and eq(j, k):
                assert eq(i, k)  # transitive
    report("game sanity", f"4 logics, 30-frame pool, {time.time()-t0:.1f}s")


ORDERED_SUM = {"lt": "lt(x1,x2) | (Q1(x1) & Q2(x2))", "P1": "P1(x1)"}


def _fusion_pair(rng, logic, size_of):
    """Two components per side; the right side is an isomorphic relabeling
    (mostly) or an independent sample."""
    comps = []
    for _ in range(2):
        size = size_of(rng)
        cfg = GenConfig(seed=rng.randrange(10 ** 9), min_size=size,
                        max_size=size, vocab=SIG)
        m = random_frame(cfg, rng)
        if rng.random() < 0.7:
            n, perm = relabeled_copy_with_map(m, rng)
        else:
            n, perm = random_frame(
                GenConfig(seed=rng.randrange(10 ** 9), min_size=size,
                          max_size=size, vocab=SIG), rng), None
        comps.append((m, n, perm))
    return comps


def _params_for(rng, logic, frame, perm):
    if logic is Logic.FO or logic is Logic.MSO:
        return ()
    count = 1 if logic is Logic.FOLFP1 else min(2, frame.size)
    picks = tuple(rng.sample(range(frame.size), count))
    return picks if perm is None else tuple(perm[p] for p in picks)


def _run_fusion(logic, wanted, size_of, rounds=2, with_sets=False):
    rng = random.Random(900 + len(logic.value))
    fm = FusionMap.make(ORDERED_SUM, SIG, 2)
    confirmed = 0
    tried = 0
    while confirmed < wanted:
        tried += 1
        assert tried < wanted * 20, f"cannot find equivalent pairs for {logic}"
        comps = _fusion_pair(rng, logic, size_of)
        sides = []
        ok = True
        for m, n, perm in comps:
            mp = _params_for(rng, logic, m, None)
            np_ = (tuple(perm[p] for p in mp) if perm is not None
                   else _params_for(rng, logic, n, None))
            ms, ns = (), ()
            if with_sets and rng.random() < 0.4:
                mask = rng.randrange(1 << m.size)
                ms = (mask,)
                if perm is not None:
                    ns = (sum(1 << perm[e] for e in range(m.size)
                              if mask >> e & 1),)
                else:
                    ns = (rng.randrange(1 << n.size),)
            if len(mp) != len(np_):
                ok = False
                break
            sides.append((m, n, mp, np_, ms, ns))
        if not ok:
            continue
        equivalent = all(
            winner(GameConfig(logic, rounds, ParamFrame(m, mp, ms),
                              ParamFrame(n, np_, ns))) is Player.DUPLICATOR
            for m, n, mp, np_, ms, ns in sides)
        if not equivalent:
            continue
        lefts = [s[0] for s in sides]
        rights = [s[1] for s in sides]
        off_l, off_r = component_offsets(lefts), component_offsets(rights)
        lp = tuple(p + off_l[i] for i, s in enumerate(sides) for p in s[2])
        rp = tuple(p + off_r[i] for i, s in enumerate(sides) for p in s[3])
        lsets = [m << off_l[i] for i, s in enumerate(sides) for m in s[4]]
        rsets = [m << off_r[i] for i, s in enumerate(sides) for m in s[5]]
        if logic in (Logic.MSO, Logic.FOLFP1):
            lsets, rsets = union_closure(lsets), union_closure(rsets)
        else:
            lsets = rsets = []
        fused_l, fused_r = fuse(lefts, fm), fuse(rights, fm)
        cfg = GameConfig(logic, rounds,
                         ParamFrame(fused_l, lp, tuple(lsets)),
                         ParamFrame(fused_r, rp, tuple(rsets)))
        assert winner(cfg, budget=30_000_000) is Player.DUPLICATOR, \
            (logic, [s[0].size for s in sides])
        confirmed += 1
    return confirmed, tried


def test_fusion_theorems():
    """Component-wise n-equivalence transfers to the fusion, 50 confirmed
    pairs per logic (n <= 2, component sizes <= 4), < 10 min."""
    t0 = time.time()
    stats = {}
    stats["fo"] = _run_fusion(Logic.FO, 50, lambda r: r.randint(1, 4))
    stats["mso"] = _run_fusion(Logic.MSO, 50, lambda r: r.randint(1, 3),
                               with_sets=True)
    stats["fotc1"] = _run_fusion(Logic.FOTC1, 50, lambda r: r.randint(1, 3))
    stats["folfp1"] = _run_fusion(Logic.FOLFP1, 50, lambda r: r.randint(1, 2))
    elapsed = time.time() - t0
    assert elapsed < 600
    detail = ", ".join(f"{k}: {c} confirmed/{t} sampled"
                       for k, (c, t) in stats.items())
    report("fusion theorems", f"{detail}, {elapsed:.1f}s")


def test_define_finite():
    """Conjunction of T1..T10 iff graph-theoretic tree shape: 500 random
    frames (arbitrary and tree-shaped) plus 50 adversarial near-trees."""
    rng = random.Random(106)
    t0 = time.time()
    frames = []
    for seed in range(300):
        frames.append(random_frame(
            GenConfig(seed=seed, min_size=1, max_size=6, vocab=V2), rng))
    for seed in range(200):
        frames.append(random_tree(
            GenConfig(seed=seed, min_size=1, max_size=7, vocab=V2), rng).frame)
    near = [random_near_tree(GenConfig(seed=s, vocab=V2), f"T{s % 10 + 1}", rng)
            for s in range(50)]
    for frame in frames + near:
        report_ = check_tree_axioms(frame)
        assert all(report_.values()) == check_tree_shape(frame)
    for frame, s in zip(near, range(50)):
        assert check_tree_axioms(frame)[f"T{s % 10 + 1}"] is False
    report("define-finite (T1-T10 iff tree shape)",
           f"{len(frames)} frames + {len(near)} near-trees, {time.time()-t0:.1f}s")


def test_forest_decomposition_identity():
    """forest_compose(T|{a}, T_b, T_c) is isomorphic to T_a (canonical code
    equality) for 200 random trees of size <= 8, every eligible node."""
    rng = random.Random(107)
    t0 = time.time()
    trees = nodes = 0
    while trees < 200:
        tree = random_tree(GenConfig(seed=rng.randrange(10 ** 9),
                                     min_size=4, max_size=8, vocab=V2), rng)
        trees += 1
        for a in range(tree.size):
            b, c = tree.first_child(a), tree.next_sibling(a)
            if b is None or c is None:
                continue
            from treelogic.composition import forest_compose
            composed = forest_compose(substructure(tree.frame, [a]),
                                      subforest_at(tree, b),
                                      subforest_at(tree, c))
            assert canonical_tree_code(composed) == \
                canonical_tree_code(subforest_at(tree, a))
            nodes += 1
    assert nodes >= 150
    report("forest decomposition identity",
           f"{trees} trees, {nodes} eligible nodes, {time.time()-t0:.1f}s")


def test_chi_finiteness_on_trees():
    """The finiteness sentence holds on 300 generated trees, sizes 1..12."""
    rng = random.Random(108)
    t0 = time.time()
    chi = chi_finiteness()
    sizes = []
    for i in range(300):
        size = i % 12 + 1
        tree = random_tree(GenConfig(seed=rng.randrange(10 ** 9),
                                     min_size=size, max_size=size, vocab=V2), rng)
        assert evaluate(tree.frame, chi) is True
        sizes.append(size)
    report("chi holds on finite trees",
           f"300 trees, sizes 1..{max(sizes)}, {time.time()-t0:.1f}s")


def _all_tree_shapes(n):
    """Every ordered rooted tree shape with n nodes, as nested child lists."""
    if n == 1:
        return [[]]
    shapes = []
    for first in range(1, n):
        for head in _all_tree_shapes(first):
            for rest in _forest_shapes(n - 1 - first):
                shapes.append([head] + rest)
    return shapes


def _forest_shapes(n):
    if n == 0:
        return [[]]
    out = []
    for first in range(1, n + 1):
        for head in _all_tree_shapes(first):
            for rest in _forest_shapes(n - first):
                out.append([head] + rest)
    return out


def _frame_from_shape(shape, labels):
    counter = [0]

    def build(children):
        idx = counter[0]
        counter[0] += 1
        return {"label": ["P1"] if labels >> idx & 1 else [],
                "children": [build(c) for c in children]}

    doc = {"tree": build(shape)}
    from treelogic.structures import parse_structure
    return parse_structure(json.dumps(doc))


def test_proof_corpus():
    """Valid corpus accepted; invalid corpus rejected at the intended line
    with the intended condition; closed lines of tree-theory proofs hold on
    every tree of size <= 6."""
    t0 = time.time()
    valid = sorted(glob.glob(os.path.join(CORPUS, "valid", "*.json")))
    invalid = sorted(glob.glob(os.path.join(CORPUS, "invalid", "*.json")))
    assert len(valid) >= 10 and len(invalid) >= 10
    tree_lines = []
    for path in valid:
        with open(path) as fh:
            text = fh.read()
        proof = load_proof(text)
        result = check_proof(proof)
        assert result.accepted, f"{path}: {result}"
        if proof.theory == "tree":
            for line in proof.lines:
                fe, fs = free_variables(line.formula)
                if not fe and not fs:
                    tree_lines.append(line.formula)
    for path in invalid:
        with open(path) as fh:
            doc = json.load(fh)
        result = check_proof(load_proof(json.dumps(doc)))
        assert not result.accepted
        assert result.line == doc["expect"]["line"], f"{path}: {result}"
        assert doc["expect"]["reason"] in result.reason, f"{path}: {result}"

    # soundness shadow: closed tree-theory lines hold on all trees size <= 6;
    # label-free lines only need one check per shape.
    from treelogic.proofs import _relation_symbols
    shapes = [s for n in range(1, 7) for s in _all_tree_shapes(n)]
    assert len(shapes) == 1 + 1 + 2 + 5 + 14 + 42
    label_free = [f for f in tree_lines
                  if not (_relation_symbols(f) & {"P1", "P2", "P3"})]
    labeled = [f for f in tree_lines if f not in label_free]
    checked = 0
    for shape in shapes:
        plain = _frame_from_shape(shape, 0)
        for formula in label_free:
            assert evaluate(plain, formula) is True
            checked += 1
        size = plain.size
        for labels in range(1 << size):
            frame = plain if labels == 0 else _frame_from_shape(shape, labels)
            for formula in labeled:
                assert evaluate(frame, formula) is True
                checked += 1
    report("proof corpus",
           f"{len(valid)} valid, {len(invalid)} invalid, "
           f"{len(tree_lines)} closed tree-theory lines x all trees <= 6 "
           f"({checked} evaluations), {time.time()-t0:.1f}s")
