"""Command-line harness: ``kcenter run`` replays a stream, ``kcenter gen`` writes one.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 invariant or guarantee violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import IO

from .audit import audit_step
from .clusterer import Clusterer
from .errors import InputError, KCenterError, OracleCapacityError, StreamParseError
from .oracle import DEFAULT_ENUMERATION_CAP, brute_force_opt, gonzalez
from .ranks import opt_lower_bound
from .streams import MODES, GenerationError, generate_stream, read_stream, write_stream

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VIOLATION = 4

APPROX_FACTOR = 24


def oracle_entry(c: Clusterer, method: str, cost: float, cap: int = DEFAULT_ENUMERATION_CAP) -> tuple[dict, str]:
    """Oracle fields for one step and a violation message (empty if none).

    ``exact`` falls back to ``gonzalez`` when enumeration exceeds ``cap``.
    With Gonzalez the certified ratio bound is ``cost / (g / 2)``: it passes
    when at most 24, is a certified failure when ``cost > 24 g`` (since
    ``g >= OPT``), and is inconclusive in between.
    """
    pts = c.points
    k = c.k
    if not pts:
        return {"method": method, "opt": 0.0}, ""
    if method == "exact":
        try:
            res = brute_force_opt(pts, k, c.universe, cap=cap)
        except OracleCapacityError:
            method = "gonzalez"
    if method == "gonzalez":
        g = gonzalez(pts, k, c.universe).value
        entry = {"method": "gonzalez", "gonzalez": g}
        if len(pts) <= k:
            return entry, ""
        bound = cost / (g / 2)
        entry["ratio_bound"] = bound
        if bound <= APPROX_FACTOR:
            entry["verdict"] = "pass"
        elif cost > APPROX_FACTOR * g:
            entry["verdict"] = "fail"
        else:
            entry["verdict"] = "inconclusive"
        msg = f"cost {cost} > 24 * gonzalez {g}" if entry["verdict"] == "fail" else ""
        return entry, msg
    entry = {"method": "exact", "opt": res.value}
    if len(pts) <= k:
        return entry, ""
    entry["ratio"] = cost / res.value
    lb = opt_lower_bound(c.triple.xi_g, k)
    entry["lower_bound"] = lb
    msgs = []
    if cost > APPROX_FACTOR * res.value:
        msgs.append(f"cost {cost} > 24 * OPT {res.value}")
    if lb > res.value:
        msgs.append(f"separation lower bound {lb} > OPT {res.value}")
    entry["verdict"] = "fail" if msgs else "pass"
    return entry, "; ".join(msgs)


def run_stream(
    lines,
    out: IO[str],
    *,
    verify: bool = False,
    oracle: str = "none",
    audit_every: int = 1,
    err: IO[str] = sys.stderr,
) -> int:
    """Replay a stream given as an iterable of lines, writing one JSON report per event."""
    clusterer = None
    try:
        for lineno, item in read_stream(lines):
            if clusterer is None:
                try:
                    clusterer = Clusterer(item.universe(), item.k)
                except KCenterError as exc:
                    print(f"error: line {lineno}: {exc}", file=err)
                    return EXIT_PRECONDITION
                continue
            before = dict(clusterer.triple.xi_s)
            try:
                diff, report = clusterer.apply_update(item)
            except KCenterError as exc:
                print(f"error: line {lineno}: {exc}", file=err)
                return EXIT_PRECONDITION
            problems = []
            if oracle != "none":
                entry, msg = oracle_entry(clusterer, oracle, report.cost)
                report.oracle = entry
                if msg:
                    problems.append(msg)
            if verify:
                structural = report.step % audit_every == 0
                audit = audit_step(clusterer, item, diff, before, structural=structural)
                report.audit = audit.to_dict()
                problems.extend(audit.messages)
                if not audit.ok and not audit.messages:
                    problems.append("audit failed")
            out.write(json.dumps(report.to_dict()) + "\n")
            if verify and problems:
                print(f"violation: line {lineno} (step {report.step}): {'; '.join(problems)}", file=err)
                return EXIT_VIOLATION
    except StreamParseError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_PARSE
    return EXIT_OK


def _cmd_run(args) -> int:
    if args.audit_every < 1:
        print("error: --audit-every must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        src = open(args.stream, encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    with src:
        if args.report:
            with open(args.report, "w", encoding="utf-8") as out:
                return run_stream(src, out, verify=args.verify, oracle=args.oracle, audit_every=args.audit_every)
        return run_stream(src, sys.stdout, verify=args.verify, oracle=args.oracle, audit_every=args.audit_every)


def _cmd_gen(args) -> int:
    try:
        stream = generate_stream(
            args.n,
            args.k,
            args.delta,
            mode=args.mode,
            seed=args.seed,
            dim=args.dim,
            steps=args.steps,
            window=args.window,
            cycles=args.cycles,
            metric=args.metric,
        )
    except (GenerationError, InputError, ValueError) as exc:
        print(f"generation error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.out:
        write_stream(stream, Path(args.out))
    else:
        write_stream(stream, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcenter", description="Consistent dynamic k-center harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replay an update stream and emit per-step reports")
    run.add_argument("--stream", required=True, help="JSON Lines stream file")
    run.add_argument("--verify", action="store_true", help="audit every guarantee; exit 4 on violation")
    run.add_argument("--oracle", choices=("exact", "gonzalez", "none"), default="none")
    run.add_argument("--report", help="write reports here instead of stdout")
    run.add_argument("--audit-every", type=int, default=1, help="run structural audits every N steps")
    run.set_defaults(func=_cmd_run)

    gen = sub.add_parser("gen", help="generate a synthetic stream")
    gen.add_argument("--n", type=int, required=True, help="pool size (distinct points)")
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--delta", type=int, required=True)
    gen.add_argument("--mode", choices=MODES, default="random")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--steps", type=int, help="event count for random mode")
    gen.add_argument("--window", type=int, help="active-set size for sliding-window mode")
    gen.add_argument("--cycles", type=int, help="far-point toggles for adversarial-cycle mode")
    gen.add_argument("--metric", choices=("euclidean", "matrix"), default="euclidean")
    gen.add_argument("--out", help="output file (default stdout)")
    gen.set_defaults(func=_cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
