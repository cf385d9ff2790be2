"""Command-line front end for the verification and synthesis pipeline.

Exit code contract: 0 success (or opaque), 1 a checked property fails (or
not opaque), 2 input error, 3 the configuration is not enforceable.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .automata import (
    FiniteAutomaton,
    ModelError,
    ObservationProfile,
    ParseError,
    fmt_state_set,
    format_model,
    project,
)
from . import automata
from .dot import game_dot, mealy_dot, mechanism_dot, observer_dot, trimmed_dot
from .game import OPS_ALL, build_edit_game
from .harness import (
    EditUndefinedError,
    SimulationError,
    oracle_ic_enforcing,
    random_instance,
    simulate,
)
from .mechanism import POLICIES, format_mealy, parse_mealy, build_uem, refine_to_em, synthesize
from .observers import standard_observers
from .opacity import default_depth, verify_cso
from .trimming import trim_game

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_INPUT = 2
EXIT_UNENFORCEABLE = 3


@dataclass
class PipelineConfig:
    path: Path
    ops: frozenset[str]
    k: int
    depth: Optional[int]
    dot_dir: Optional[Path]
    policy: str
    seed: Optional[int]

    def __post_init__(self):
        if self.k < 0:
            raise ModelError("max insertion length must be nonnegative")
        if "insert" in self.ops and self.k < 1:
            raise ModelError("insertion requires a max insertion length of at least 1")
        if not self.ops:
            raise ModelError("at least one edit operation must be enabled")
        if self.policy not in POLICIES:
            raise ModelError(f"unknown policy {self.policy!r}; choose from {sorted(POLICIES)}")


def _load(path: Path) -> tuple[FiniteAutomaton, ObservationProfile]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc}") from exc
    return automata.parse_model(text)


def _config(args) -> PipelineConfig:
    if args.ops is None:
        ops = OPS_ALL if args.max_insert >= 1 else OPS_ALL - {"insert"}
    else:
        ops = frozenset(args.ops.split(","))
    if not ops <= OPS_ALL:
        raise ModelError(f"unknown edit operations: {sorted(ops - OPS_ALL)}")
    return PipelineConfig(
        path=Path(args.input),
        ops=ops,
        k=args.max_insert,
        depth=getattr(args, "depth", None),
        dot_dir=Path(args.dot) if getattr(args, "dot", None) else None,
        policy=getattr(args, "policy", "prefer-passthrough"),
        seed=getattr(args, "seed", None),
    )


def _write_dot(dot_dir: Path, name: str, text: str) -> None:
    dot_dir.mkdir(parents=True, exist_ok=True)
    (dot_dir / f"{name}.dot").write_text(text)


def _render_trace(trace) -> str:
    return " ".join(trace) if trace else "ε"


def cmd_verify(args) -> int:
    aut, profile = _load(Path(args.input))
    verdict = verify_cso(aut, profile)
    if verdict.opaque:
        print("OPAQUE")
        return EXIT_OK
    print("NOT OPAQUE")
    print(f"witness: {_render_trace(verdict.witness)}")
    print(f"intruder view: {_render_trace(project(verdict.witness, profile.intruder))}")
    return EXIT_PROPERTY


def cmd_observers(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    o_sys, o_intr, o_def = standard_observers(aut, profile)
    for name, obs in (("system", o_sys), ("intruder", o_intr), ("defender", o_def)):
        print(f"{name} observer: {len(obs.states)} states, "
              f"initial {fmt_state_set(aut, obs.initial)}")
        if config.dot_dir:
            _write_dot(config.dot_dir, f"observer_{name}",
                       observer_dot(obs, aut, name=f"observer_{name}",
                                    include_self_loops=not args.no_self_loops))
    return EXIT_OK


def _build_stages(aut, profile, config):
    observers = standard_observers(aut, profile)
    game = build_edit_game(aut, profile, k=config.k, ops=config.ops, observers=observers)
    tgs = trim_game(game)
    uem = build_uem(tgs) if tgs is not None else None
    em = refine_to_em(uem) if uem is not None else None
    return observers, game, tgs, uem, em


def cmd_game(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    game = build_edit_game(aut, profile, k=config.k, ops=config.ops)
    zero = sum(1 for v in list(game.a_states) + list(game.f_states) if game.utility[v] == 0)
    print(f"game: {len(game.a_states)} information states, "
          f"{len(game.f_states)} augmented states, {zero} utility-0")
    if config.dot_dir:
        _write_dot(config.dot_dir, "game", game_dot(game, aut))
    return EXIT_OK


def cmd_trim(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    game = build_edit_game(aut, profile, k=config.k, ops=config.ops)
    tgs = trim_game(game)
    if tgs is None:
        print("not enforceable: initial state pruned")
        return EXIT_UNENFORCEABLE
    ndis = sum(len(d) for d in tgs.disabled.values())
    print(f"trimmed game: {len(tgs.game.a_states)} information states, "
          f"{len(tgs.game.f_states)} augmented states, "
          f"{len(tgs.removed_a) + len(tgs.removed_f)} removed, {ndis} actions disabled")
    if config.dot_dir:
        _write_dot(config.dot_dir, "trimmed",
                   trimmed_dot(tgs, aut, include_disabled=args.show_disabled))
    return EXIT_OK


def cmd_mechanism(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    _, _, tgs, uem, em = _build_stages(aut, profile, config)
    if tgs is None:
        print("not enforceable: initial state pruned")
        return EXIT_UNENFORCEABLE
    print(f"merged mechanism: {len(uem.ua_states)} belief states, "
          f"{len(uem.uf_states)} observation states, {len(uem.partial)} partial actions")
    if em is None:
        print("not ic-enforceable at this configuration")
        return EXIT_UNENFORCEABLE
    print(f"edit mechanism: {len(em.ua_states)} belief states, "
          f"{len(em.uf_states)} observation states")
    if config.dot_dir:
        _write_dot(config.dot_dir, "mechanism_raw", mechanism_dot(uem, aut, name="raw"))
        _write_dot(config.dot_dir, "mechanism", mechanism_dot(em, aut))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    observers, game, tgs, uem, em = _build_stages(aut, profile, config)
    if config.dot_dir:
        o_sys, o_intr, o_def = observers
        _write_dot(config.dot_dir, "observer_system", observer_dot(o_sys, aut, name="observer_system"))
        _write_dot(config.dot_dir, "observer_intruder", observer_dot(o_intr, aut, name="observer_intruder"))
        _write_dot(config.dot_dir, "observer_defender", observer_dot(o_def, aut, name="observer_defender"))
        _write_dot(config.dot_dir, "game", game_dot(game, aut))
        if tgs is not None:
            _write_dot(config.dot_dir, "trimmed", trimmed_dot(tgs, aut))
        if uem is not None:
            _write_dot(config.dot_dir, "mechanism_raw", mechanism_dot(uem, aut, name="raw"))
        if em is not None:
            _write_dot(config.dot_dir, "mechanism", mechanism_dot(em, aut))
    if tgs is None or em is None:
        print("not ic-enforceable at this configuration")
        return EXIT_UNENFORCEABLE
    fe = synthesize(em, policy=config.policy)
    text = format_mealy(fe)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote transducer to {args.output}")
    else:
        sys.stdout.write(text)
    if config.dot_dir:
        _write_dot(config.dot_dir, "editor", mealy_dot(fe))
    return EXIT_OK


def cmd_simulate(args) -> int:
    aut, profile = _load(Path(args.input))
    fe = parse_mealy(Path(args.transducer).read_text())
    trace = tuple(args.events)
    try:
        steps = simulate(aut, profile, fe, trace)
    except (SimulationError, EditUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print("event\toutput\tintruder\tdefender\tleak")
    for step in steps:
        print("\t".join((
            step.plant_event,
            "·".join(step.editor_output) if step.editor_output else "-",
            fmt_state_set(aut, step.intruder_estimate),
            fmt_state_set(aut, step.defender_estimate),
            "yes" if step.leak else "no",
        )))
    return EXIT_OK


def cmd_check(args) -> int:
    config = _config(args)
    aut, profile = _load(config.path)
    fe = parse_mealy(Path(args.transducer).read_text())
    depth = config.depth if config.depth is not None else default_depth(aut, profile, config.k)
    verdict = oracle_ic_enforcing(aut, profile, fe, depth)
    if verdict.ok:
        print(f"PASS: ic-enforcing up to depth {depth}")
        return EXIT_OK
    record = {
        "property": verdict.failed_property,
        "trace": list(verdict.counterexample or ()),
        "depth": depth,
    }
    print(json.dumps(record, sort_keys=True))
    return EXIT_PROPERTY


def cmd_gen(args) -> int:
    aut, profile = random_instance(args.seed, args.max_states, args.max_events)
    text = format_model(aut, profile)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote instance to {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    config = _config(args)
    if config.dot_dir is None:
        raise ModelError("export-dot requires --dot DIR")
    return cmd_synthesize(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opacedit",
        description="Verify current-state opacity and synthesize enforcing edit functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pipeline_flags(p, dot=True):
        p.add_argument("--ops", default=None,
                       help="comma list from substitute,delete,insert "
                            "(default: all, without insert when K is 0)")
        p.add_argument("--max-insert", type=int, default=1, metavar="K",
                       help="upper bound on inserted prefix length (default 1)")
        if dot:
            p.add_argument("--dot", metavar="DIR", help="write stage DOT files to DIR")

    p = sub.add_parser("verify", help="report OPAQUE / NOT OPAQUE with a witness")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("observers", help="build the three observers")
    p.add_argument("input")
    p.add_argument("--no-self-loops", action="store_true",
                   help="suppress self-loop edges in DOT output")
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_observers)

    p = sub.add_parser("game", help="build the edit game structure")
    p.add_argument("input")
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("trim", help="prune the game structure")
    p.add_argument("input")
    p.add_argument("--show-disabled", action="store_true",
                   help="include disabled actions as dashed gray edges in DOT")
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_trim)

    p = sub.add_parser("mechanism", help="merge and refine into the edit mechanism")
    p.add_argument("input")
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_mechanism)

    p = sub.add_parser("synthesize", help="run the full pipeline and emit a transducer")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="transducer output path (default stdout)")
    p.add_argument("--policy", default="prefer-passthrough", choices=sorted(POLICIES))
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("simulate", help="step a plant trace through an editor")
    p.add_argument("input")
    p.add_argument("transducer")
    p.add_argument("events", nargs="*")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="check a transducer against the definitions")
    p.add_argument("input")
    p.add_argument("transducer")
    p.add_argument("--depth", type=int, default=None)
    add_pipeline_flags(p, dot=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-states", type=int, default=5)
    p.add_argument("--max-events", type=int, default=4)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("export-dot", help="write every pipeline stage as DOT")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="also write the transducer here")
    p.add_argument("--policy", default="prefer-passthrough", choices=sorted(POLICIES))
    add_pipeline_flags(p)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
