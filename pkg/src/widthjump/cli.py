"""Command-line front end: lookahead trees, graph encodings, greedy solving,
and branching-factor estimation over PDDL files.

Results are JSON records, one per line (pretty-printed behind --pretty).
Exit codes: 0 on success, 1 when parsing/search/solving fails, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, TextIO

from . import encode as enc
from .ground import grounder_for
from .lookahead import LookaheadConfig, jump_candidates, lookahead
from .pddl import PddlError, parse_domain, parse_instance
from .policy import (
    EpisodeLimits,
    JUMP_ENCODINGS,
    MODES,
    OracleScorer,
    SocketScorer,
    StateSpaceTooLargeError,
    SubprocessScorer,
    ZeroScorer,
    branching_factor,
    run_episode,
)
from .protocol import ProtocolError

USAGE_ERROR = 2
DOMAIN_ERROR = 1


class UsageError(Exception):
    pass


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"environment variable {name}={raw!r} is not a valid {cast.__name__}")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_instances(args) -> list:
    domain = parse_domain(_read(args.domain))
    return [parse_instance(_read(p), domain) for p in args.instance]


def _emit(records: Sequence[dict], out: TextIO, pretty: bool) -> None:
    for rec in records:
        if pretty:
            out.write(json.dumps(rec, indent=2, sort_keys=True) + "\n")
        else:
            out.write(json.dumps(rec, separators=(",", ":")) + "\n")


def _lookahead_cfg(args) -> LookaheadConfig:
    return LookaheadConfig(
        variant=args.variant,
        k=args.k,
        capacity=getattr(args, "capacity", None),
        max_states=args.max_states,
        max_depth=getattr(args, "max_depth", None),
    )


def cmd_lookahead(args, out: TextIO) -> int:
    cfg = _lookahead_cfg(args)
    records = []
    for inst in _load_instances(args):
        tree = lookahead(grounder_for(inst).initial_state, inst, cfg)
        records.append(
            {
                "instance": inst.name,
                "variant": cfg.variant,
                "k": cfg.k,
                "nodes": len(tree.nodes),
                "d_max": tree.d_max,
                "seen": tree.seen_size,
                "goal_found": tree.goal_found,
                "wall_time": round(tree.wall_time, 6),
            }
        )
    _emit(records, out, args.pretty)
    return 0


def cmd_encode(args, out: TextIO) -> int:
    records = []
    for inst in _load_instances(args):
        g = grounder_for(inst)
        s0 = g.initial_state
        if args.encoding == "state":
            records.append(enc.encode_state(s0, inst).to_record())
        elif args.encoding == "aa":
            records.append(enc.encode_aa(s0, g.applicable(s0), inst).to_record())
        else:
            tree = lookahead(s0, inst, _lookahead_cfg(args))
            if args.encoding == "ad":
                records.append(enc.encode_ad(tree, inst).to_record())
            else:
                encoder = {
                    "ext": enc.encode_external,
                    "int": enc.encode_internal,
                    "intd": enc.encode_internal_delta,
                }[args.encoding]
                for i in jump_candidates(tree):
                    records.append(encoder(s0, tree.nodes[i].state, inst).to_record())
    _emit(records, out, args.pretty)
    return 0


def _make_scorer(spec: str, inst):
    if spec == "oracle":
        return OracleScorer(inst)
    if spec == "zero":
        return ZeroScorer()
    if spec.startswith("cmd:"):
        return SubprocessScorer(spec[4:])
    if spec.startswith("tcp:"):
        hostport = spec[4:]
        host, _, port = hostport.rpartition(":")
        if not host or not port.isdigit():
            raise UsageError(f"bad scorer address '{spec}', expected tcp:HOST:PORT")
        return SocketScorer(host, int(port))
    raise UsageError(f"unknown scorer '{spec}' (use oracle, zero, cmd:..., tcp:host:port)")


def cmd_solve(args, out: TextIO) -> int:
    if args.mode == "flat_aa" and args.encoding not in (None, "aa"):
        raise UsageError("flat_aa fixes the encoding to aa")
    if args.mode == "flat_ad" and args.encoding not in (None, "ad"):
        raise UsageError("flat_ad fixes the encoding to ad")
    if args.mode == "iw_jump" and args.encoding not in (None, *JUMP_ENCODINGS):
        raise UsageError(f"iw_jump encodings: {', '.join(JUMP_ENCODINGS)}")
    instances = _load_instances(args)
    cfg = _lookahead_cfg(args)
    limits = EpisodeLimits(
        max_choices=args.max_choices,
        step_cap=args.step_cap,
        timeout=args.timeout,
    )

    def solve_one(inst):
        scorer = _make_scorer(args.scorer, inst)
        try:
            result = run_episode(
                inst,
                scorer,
                mode=args.mode,
                lookahead_cfg=cfg,
                limits=limits,
                encoding=args.encoding,
            )
        finally:
            if hasattr(scorer, "close"):
                scorer.close()
        return {
            "instance": inst.name,
            "mode": args.mode,
            "variant": cfg.variant,
            "encoding": args.encoding or ("aa" if args.mode == "flat_aa" else "ad"),
            "solved": result.solved,
            "choices": result.choices,
            "plan_length": len(result.plan),
            "wall_time": round(result.wall_time, 6),
            "failure_reason": result.failure_reason,
        }

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(solve_one, instances))
    else:
        records = [solve_one(inst) for inst in instances]
    _emit(records, out, args.pretty)
    return 0 if all(r["solved"] for r in records) else DOMAIN_ERROR


def cmd_branching(args, out: TextIO) -> int:
    records = []
    for inst in _load_instances(args):
        b = branching_factor(inst, walk_len=args.walk_len, seed=args.seed)
        records.append(
            {
                "instance": inst.name,
                "branching_factor": b,
                "walk_len": args.walk_len,
                "seed": args.seed,
            }
        )
    _emit(records, out, args.pretty)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="widthjump",
        description="Width-based lookahead search, graph encodings, and greedy solving",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, variants=True):
        p.add_argument("--domain", required=True, help="domain PDDL file")
        p.add_argument("--instance", required=True, nargs="+", help="instance PDDL file(s)")
        p.add_argument("--out", help="write records to this file instead of stdout")
        p.add_argument("--pretty", action="store_true", help="indent JSON output")
        if variants:
            p.add_argument("--variant", default="iw", choices=["iw", "aiw", "baiw", "caiw"])
            p.add_argument("--k", type=int, default=1, choices=[1, 2])
            p.add_argument("--capacity", type=int, default=None, help="caiw layer capacity")
            p.add_argument(
                "--max-states",
                type=int,
                default=_env_default("WIDTHJUMP_MAX_STATES", int, 100_000),
            )
            p.add_argument("--max-depth", type=int, default=None)

    p_look = sub.add_parser("lookahead", help="grow a lookahead tree and report its shape")
    common(p_look)

    p_enc = sub.add_parser("encode", help="emit graph records for an instance")
    common(p_enc)
    p_enc.add_argument(
        "--encoding",
        default="ad",
        choices=["state", "aa", "ad", "ext", "int", "intd"],
    )

    p_solve = sub.add_parser("solve", help="run the greedy policy executor")
    common(p_solve)
    p_solve.add_argument("--mode", default="iw_jump", choices=list(MODES))
    p_solve.add_argument("--encoding", default=None, choices=list(JUMP_ENCODINGS) + ["aa"])
    p_solve.add_argument("--scorer", default="zero", help="oracle | zero | cmd:... | tcp:host:port")
    p_solve.add_argument(
        "--max-choices",
        type=int,
        default=_env_default("WIDTHJUMP_MAX_CHOICES", int, 1000),
    )
    p_solve.add_argument(
        "--step-cap",
        type=int,
        default=_env_default("WIDTHJUMP_STEP_CAP", int, None),
    )
    p_solve.add_argument(
        "--timeout",
        type=float,
        default=_env_default("WIDTHJUMP_TIMEOUT", float, None),
    )
    p_solve.add_argument("--seed", type=int, default=0, help="reserved for stochastic scorers")
    p_solve.add_argument("--jobs", type=int, default=1, help="solve instances in parallel")

    p_branch = sub.add_parser("branching", help="random-walk branching factor")
    common(p_branch, variants=False)
    p_branch.add_argument("--walk-len", type=int, default=10)
    p_branch.add_argument("--seed", type=int, default=0)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE_ERROR
    args = parser.parse_args(argv)
    out = sys.stdout
    close = False
    try:
        if args.out:
            out = open(args.out, "w", encoding="utf-8")
            close = True
        handler = {
            "lookahead": cmd_lookahead,
            "encode": cmd_encode,
            "solve": cmd_solve,
            "branching": cmd_branching,
        }[args.command]
        return handler(args, out)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (PddlError, ProtocolError, StateSpaceTooLargeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return DOMAIN_ERROR
    finally:
        if close:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
