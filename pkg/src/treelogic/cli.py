"""Command-line surface over the workbench: parsing, evaluation, game
equivalence, translations, relativization, fusion, axiom instantiation, the
finiteness sentence, proof checking, generators, an interactive terminal
game, and the HTTP service.

Exit codes: 0 success, 1 domain verdict against you (rejected proof, or a
false/spoiler verdict under --strict), 2 usage or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (GameBudgetExceeded, IllegalMove, ParseError, SchemaError,
                     StructureError, TreelogicError, UnboundVariable)
from .evaluate import Assignment, evaluate
from .games import GameConfig, Player, legal_moves, winner
from .proofs import check_proof, load_proof
from .structures import Frame, ParamFrame, check_tree_axioms, check_tree_shape, \
    labels_of, parse_structure
from .syntax import Logic, parse_formula, render_formula, require_logic, \
    tree_vocabulary
from .testkit import GenConfig, random_formula, random_frame, random_near_tree, \
    random_tree
from .transforms import axiom_instance, chi_finiteness, lfp_to_mso, relativize, \
    tc_to_lfp
from .composition import FusionMap, fuse


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        json.dump(payload, sys.stdout)
        sys.stdout.write("\n")
    else:
        print(text)


def _load_frame(path: str) -> Frame:
    with open(path) as fh:
        return parse_structure(fh.read())


def _vocab(args):
    return tree_vocabulary(getattr(args, "labels", 2) or 2)


def cmd_parse(args) -> int:
    phi = parse_formula(args.formula, _vocab(args))
    if args.logic:
        require_logic(phi, Logic(args.logic))
    rendered = render_formula(phi, fold_macros=args.fold)
    _emit(args, {"ok": True, "formula": rendered}, rendered)
    return 0


def cmd_eval(args) -> int:
    frame = _load_frame(args.structure)
    phi = parse_formula(args.formula, frame.vocab)
    if args.logic:
        require_logic(phi, Logic(args.logic))
    g = Assignment.parse(args.assign or "", frame)
    value = evaluate(frame, phi, g)
    _emit(args, {"ok": True, "value": value}, "true" if value else "false")
    return 0 if (value or not args.strict) else 1


def cmd_equiv(args) -> int:
    left, right = _load_frame(args.left), _load_frame(args.right)
    cfg = GameConfig(Logic(args.logic), args.rounds, ParamFrame(left), ParamFrame(right))
    result = winner(cfg)
    _emit(args, {"ok": True, "winner": result.value,
                 "equivalent": result is Player.DUPLICATOR}, result.value)
    return 0 if (result is Player.DUPLICATOR or not args.strict) else 1


def cmd_translate(args) -> int:
    phi = parse_formula(args.formula, _vocab(args))
    if args.to == "lfp":
        require_logic(phi, Logic.FOTC1)
        out = tc_to_lfp(phi)
    else:
        if args.fro == "tc":
            require_logic(phi, Logic.FOTC1)
            phi = tc_to_lfp(phi)
        out = lfp_to_mso(phi)
    rendered = render_formula(out)
    _emit(args, {"ok": True, "formula": rendered}, rendered)
    return 0


def cmd_rel(args) -> int:
    vocab = _vocab(args)
    phi = parse_formula(args.formula, vocab)
    guard = parse_formula(args.guard, vocab)
    out = relativize(phi, guard, args.var)
    rendered = render_formula(out)
    _emit(args, {"ok": True, "formula": rendered}, rendered)
    return 0


def cmd_fuse(args) -> int:
    frames = [_load_frame(p) for p in args.structures]
    with open(args.map) as fh:
        doc = json.load(fh)
    fusion = FusionMap.make(doc.get("f", {}), frames[0].vocab, len(frames))
    fused = fuse(frames, fusion)
    payload = fused.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
        _emit(args, {"ok": True, "out": args.out}, f"wrote {args.out}")
    else:
        _emit(args, {"ok": True, "structure": payload}, json.dumps(payload, indent=1))
    return 0


def cmd_axiom(args) -> int:
    bindings = {}
    for item in args.bind or ():
        key, _, value = item.partition("=")
        if not _:
            raise ParseError(f"--bind expects key=value, got {item!r}")
        bindings[key] = value
    phi = axiom_instance(args.id, bindings, _vocab(args))
    rendered = render_formula(phi)
    _emit(args, {"ok": True, "formula": rendered}, rendered)
    return 0


def cmd_chi(args) -> int:
    rendered = render_formula(chi_finiteness(), fold_macros=args.fold)
    _emit(args, {"ok": True, "formula": rendered}, rendered)
    return 0


def cmd_prove(args) -> int:
    with open(args.proof) as fh:
        proof = load_proof(fh.read())
    result = check_proof(proof)
    _emit(args, {"ok": True, "accepted": result.accepted,
                 "line": result.line, "reason": result.reason}, str(result))
    return 0 if result.accepted else 1


def cmd_check(args) -> int:
    frame = _load_frame(args.structure)
    report = check_tree_axioms(frame)
    shape = check_tree_shape(frame)
    text = " ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in report.items())
    _emit(args, {"ok": True, "axioms": report, "tree_shape": shape},
          f"{text} shape={'tree' if shape else 'not-a-tree'}")
    return 0 if (shape or not args.strict) else 1


def cmd_gen(args) -> int:
    cfg = GenConfig(seed=args.seed, min_size=args.size, max_size=args.size,
                    vocab=tree_vocabulary(args.labels),
                    logic=Logic(args.logic), max_depth=args.depth)
    if args.kind == "tree":
        payload = random_tree(cfg).frame.to_json()
    elif args.kind == "frame":
        payload = random_frame(cfg).to_json()
    elif args.kind == "near-tree":
        if not args.violate:
            raise ParseError("--violate T1..T10 required for near-tree")
        payload = random_near_tree(cfg, args.violate).to_json()
    else:
        phi = random_formula(cfg, free_elem=())
        rendered = render_formula(phi)
        _emit(args, {"ok": True, "formula": rendered}, rendered)
        return 0
    _emit(args, {"ok": True, "structure": payload}, json.dumps(payload, indent=1))
    return 0


def cmd_play(args) -> int:
    from .service import Session

    left, right = _load_frame(args.left), _load_frame(args.right)
    cfg = GameConfig(Logic(args.logic), args.rounds, ParamFrame(left), ParamFrame(right))
    session = Session("local", cfg, Player(args.role))

    def show():
        view = session.view()
        print(f"[{view['logic']} game] rounds left: {view['rounds_left']}  "
              f"phase: {view['phase']}")
        for side, frame in (("L", left), ("R", right)):
            labels = {i: ",".join(labels_of(frame, i)) for i in range(frame.size)}
            print(f"  {side}: " + "  ".join(f"{i}({labels[i]})" for i in sorted(labels)))
        print(f"  pebbles: {view['pebbles']}  sets: {view['set_pebbles']}")

    show()
    while session.verdict() is None:
        moves = [m.encode() for m in legal_moves(session.state)]
        print(f"your moves ({len(moves)}): {', '.join(moves[:12])}" +
              (" ..." if len(moves) > 12 else ""))
        line = input("move> ").strip()
        if line in ("q", "quit"):
            return 0
        if line == "hint":
            print(session.hint())
            continue
        try:
            session.play_human(line)
        except (IllegalMove, TreelogicError) as exc:
            print(f"rejected: {exc}")
            continue
        show()
    print(f"winner: {session.verdict().value}")
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("TREELOGIC_PORT", "8321"))
    uvicorn.run(create_app(), host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treelogic",
                                     description="workbench for MSO/TC/LFP on finite trees")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, logic=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--labels", type=int, default=2, help="tree vocabulary P1..Pn")
        if logic:
            p.add_argument("--logic", choices=[l.value for l in Logic], default=None)

    p = sub.add_parser("parse", help="parse and re-render a formula")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--fold", action="store_true", help="fold ltch/sltns macros")
    common(p, logic=True)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a formula on a structure")
    p.add_argument("-s", "--structure", required=True)
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("-g", "--assign", default="", help='e.g. "x=0,X={1,2}"')
    p.add_argument("--strict", action="store_true", help="exit 1 when false")
    common(p, logic=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("equiv", help="n-round game equivalence of two structures")
    p.add_argument("--logic", choices=[l.value for l in Logic], required=True)
    p.add_argument("-n", "--rounds", type=int, required=True)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--strict", action="store_true", help="exit 1 when spoiler wins")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("translate", help="translate between the logics")
    p.add_argument("--to", choices=["mso", "lfp"], required=True)
    p.add_argument("--from", dest="fro", choices=["tc", "lfp"], default=None,
                   help="source logic when translating to mso")
    p.add_argument("-f", "--formula", required=True)
    common(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("rel", help="relativize a formula to a guard")
    p.add_argument("-f", "--formula", required=True)
    p.add_argument("--guard", required=True)
    p.add_argument("--var", required=True)
    common(p)
    p.set_defaults(func=cmd_rel)

    p = sub.add_parser("fuse", help="fuse structures through a fusion map")
    p.add_argument("--map", required=True, help='JSON file { "f": {symbol: formula} }')
    p.add_argument("-o", "--out", default=None)
    p.add_argument("structures", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("axiom", help="instantiate an axiom schema")
    p.add_argument("--id", required=True)
    p.add_argument("--bind", action="append", help="key=value (repeatable)")
    common(p)
    p.set_defaults(func=cmd_axiom)

    p = sub.add_parser("chi", help="print the finiteness sentence")
    p.add_argument("--fold", action="store_true")
    common(p)
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("prove", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="tree axioms and shape report for a structure")
    p.add_argument("-s", "--structure", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate structures or formulas")
    p.add_argument("--kind", choices=["tree", "frame", "near-tree", "formula"],
                   default="tree")
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--violate", default=None)
    p.add_argument("--logic", choices=[l.value for l in Logic], default="fo")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("play", help="terminal EF game against the engine")
    p.add_argument("--logic", choices=[l.value for l in Logic], required=True)
    p.add_argument("-n", "--rounds", type=int, required=True)
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--as", dest="role", choices=["spoiler", "duplicator"],
                   default="spoiler")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (ParseError, StructureError, SchemaError, UnboundVariable,
            IllegalMove, GameBudgetExceeded, FileNotFoundError,
            json.JSONDecodeError) as exc:
        message = str(exc)
        if getattr(args, "json", False):
            json.dump({"ok": False, "error": message}, sys.stdout)
            sys.stdout.write("\n")
        else:
            print(f"error: {message}", file=sys.stderr)
        return 2
    except TreelogicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
