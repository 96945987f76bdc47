"""Command-line front end: ``ring-explorer {simulate,check,bounds,counterexample}``.

Exit codes: 0 success, 1 verification failure, 2 usage or precondition error,
3 resource bound hit.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from math import gcd
from pathlib import Path

from .checker import (
    BoundExceeded,
    Verdict,
    find_counterexample,
    jobs_from_env,
    linear_fit,
    measure_bounds,
    verify,
)
from .exceptions import ConfigFormatError, ProtocolPreconditionViolation, RingExplorerError
from .registry import PROTOCOL_IDS, default_semantics, get_protocol
from .ring_core import RingConfig
from .scheduler import Semantics, Strategy, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _n_range(args) -> list[int]:
    if args.n is not None:
        if args.n_min is not None or args.n_max is not None:
            raise UsageError("use either --n or --n-min/--n-max")
        return [args.n]
    if args.n_min is None or args.n_max is None:
        raise UsageError("give --n or both --n-min and --n-max")
    if args.n_min > args.n_max:
        raise UsageError("--n-min exceeds --n-max")
    return list(range(args.n_min, args.n_max + 1))


def _admissible(args, ns, accept) -> list[int]:
    """Drop ring sizes outside the protocol's domain from a range; a single --n is kept as given."""
    if args.n is not None:
        return ns
    kept = [n for n in ns if accept(n)]
    skipped = sorted(set(ns) - set(kept))
    if skipped:
        print(f"note: skipping n in {skipped} (outside the protocol's domain)", file=sys.stderr)
    if not kept:
        raise UsageError("no admissible ring size in the requested range")
    return kept


def _ring_ok(protocol):
    def accept(n):
        try:
            protocol.check_ring(n)
        except ProtocolPreconditionViolation:
            return False
        return True

    return accept


def _semantics(args) -> Semantics:
    return Semantics(args.semantics or default_semantics(args.protocol))


def _protocol(name):
    try:
        return get_protocol(name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def random_initial(n: int, k: int, seed: int) -> RingConfig:
    rng = random.Random(seed)
    return RingConfig.from_positions(n, rng.sample(range(n), k))


# -- simulate ------------------------------------------------------------------


def cmd_simulate(args, out) -> int:
    protocol = _protocol(args.protocol)
    semantics = _semantics(args)
    strategy = Strategy(args.strategy)
    if strategy is Strategy.RANDOM and args.seed is None:
        raise UsageError("--strategy random needs --seed")
    if args.initial and args.random_initial:
        raise UsageError("--initial and --random-initial are exclusive")
    if args.initial:
        initial = RingConfig.parse(args.initial)
        if args.n is not None and args.n != initial.n:
            raise UsageError(f"--n {args.n} disagrees with --initial ring size {initial.n}")
    else:
        if args.n is None:
            raise UsageError("--n is required without --initial")
        protocol.check_ring(args.n)
        if args.random_initial and args.seed is None:
            raise UsageError("--random-initial needs --seed")
        if protocol.k is None:
            raise UsageError("this protocol needs an explicit --initial")
        if protocol.k > args.n:
            raise UsageError(f"{protocol.k} robots do not fit on {args.n} nodes")
        if args.random_initial:
            initial = random_initial(args.n, protocol.k, args.seed)
        else:
            initial = RingConfig.from_positions(args.n, range(protocol.k))

    trace = run(protocol, initial, strategy, semantics, max_steps=args.max_steps, seed=args.seed)
    trace.header["protocol"] = args.protocol
    text = trace.to_jsonl(protocol)
    if args.output:
        Path(args.output).write_text(text)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "initial": initial.format(),
        "final": trace.final.config.format(),
        "explored": trace.explored,
        "terminated": trace.terminated,
        "moves": trace.move_count,
        "phase_moves": dict(sorted(trace.phase_moves.items())),
        "steps": len(trace.events),
        "max_steps_exceeded": trace.max_steps_exceeded,
        "error": trace.error,
    }
    if args.format == "json":
        print(_dump(summary), file=out)
    else:
        print(
            f"explored={str(trace.explored).lower()} terminated={str(trace.terminated).lower()} "
            f"moves={trace.move_count} final={summary['final']}"
            + (f" error={trace.error}" if trace.error else ""),
            file=out,
        )
        if not args.output:
            out.write(text)
    if trace.max_steps_exceeded:
        return EXIT_BOUND
    return EXIT_OK if trace.explored and trace.terminated else EXIT_FAIL


# -- check ----------------------------------------------------------------------


def cmd_check(args, out) -> int:
    protocol = _protocol(args.protocol)
    semantics = _semantics(args)
    jobs = args.jobs or jobs_from_env()
    ns = _n_range(args)
    if not args.expect_failure:
        ns = _admissible(args, ns, _ring_ok(protocol))
    reports = []
    for n in ns:
        if not args.expect_failure:
            protocol.check_ring(n)
        reports.append(
            verify(
                protocol,
                n,
                semantics,
                depth_bound=args.depth_bound,
                state_cap=args.state_cap,
                expect_failure=args.expect_failure,
                jobs=jobs,
            )
        )
    verdicts = [r.verdict for r in reports]

    if args.format == "json":
        print(_dump({"schema_version": SCHEMA_VERSION, "reports": [r.to_json() for r in reports]}), file=out)
    else:
        for r in reports:
            print(
                f"{r.protocol} n={r.n} {r.semantics}: {r.verdict.value} "
                f"initials={r.initial_config_count} states={r.states_explored} "
                f"max_moves={r.max_total_moves}"
                + (f" ({r.reason})" if r.reason else ""),
                file=out,
            )
            if r.counterexample is not None:
                print(f"  witness ({r.counterexample_kind}):", file=out)
                for rec in r.counterexample.records(protocol):
                    if "occupancy_after" in rec:
                        print(f"    step {rec['step']}: {rec['kind']} -> {rec['occupancy_after']}", file=out)
    if args.output:
        Path(args.output).write_text(_dump({"schema_version": SCHEMA_VERSION, "reports": [r.to_json() for r in reports]}))

    if args.expect_failure:
        # success means the protocol was shown broken for every n
        if all(v is Verdict.COUNTEREXAMPLE for v in verdicts):
            return EXIT_OK
        if any(v is Verdict.BOUND_EXCEEDED for v in verdicts):
            return EXIT_BOUND
        return EXIT_FAIL
    if any(v is Verdict.COUNTEREXAMPLE for v in verdicts):
        return EXIT_FAIL
    if any(v is Verdict.BOUND_EXCEEDED for v in verdicts):
        return EXIT_BOUND
    return EXIT_OK


# -- bounds ----------------------------------------------------------------------


def cmd_bounds(args, out) -> int:
    if args.protocol not in ("five-atom", "five-corda", "five"):
        raise UsageError("bounds are defined for the five-robot protocol only")
    ns = _admissible(args, _n_range(args), lambda n: n >= 6 and gcd(n, 5) == 1)
    for n in ns:
        if n < 6 or gcd(n, 5) != 1:
            raise ProtocolPreconditionViolation(f"gcd(n,5) must be 1 and n >= 6; got n={n}")
    results = [measure_bounds(n, state_cap=args.state_cap) for n in ns]
    payload = {"schema_version": SCHEMA_VERSION, "results": [b.to_json() for b in results]}
    if len(results) >= 2:
        ok = [b for b in results if b.check.verified]
        xs = [b.n for b in ok]
        ys = [b.max_total_moves for b in ok]
        slope, intercept = linear_fit(xs, ys)
        payload["fit"] = {
            "slope": round(slope, 4),
            "intercept": round(intercept, 4),
            "C": round(max(y / x for x, y in zip(xs, ys)), 4),
        }
    if args.format == "json":
        print(_dump(payload), file=out)
    else:
        for b in results:
            print(f"n={b.n} verdict={b.check.verdict.value} total_max={b.max_total_moves}", file=out)
            print(f"  {'row':<12}{'case':<12}{'d':>3}{'budget':>8}{'measured':>10}  ok", file=out)
            for c in b.comparisons:
                d = "-" if c.d is None else c.d
                print(
                    f"  {c.formula:<12}{c.case or '':<12}{d:>3}{c.budget:>8}{c.measured:>10}"
                    f"  {'yes' if c.satisfied else 'NO'}{'' if c.reached else ' (not reached)'}",
                    file=out,
                )
        if "fit" in payload:
            f = payload["fit"]
            print(f"fit: moves ~ {f['slope']}*n + {f['intercept']}; C = {f['C']}", file=out)
    if args.output:
        Path(args.output).write_text(_dump(payload))
    if any(b.check.verdict is Verdict.BOUND_EXCEEDED for b in results):
        return EXIT_BOUND
    return EXIT_OK if all(b.satisfied for b in results) else EXIT_FAIL


# -- counterexample -------------------------------------------------------------


def cmd_counterexample(args, out) -> int:
    protocol = _protocol(args.protocol)
    semantics = _semantics(args)
    kinds = tuple(args.kind) if args.kind else ("livelock", "bad-sink", "protocol-error")
    found = {}
    for n in _n_range(args):
        found[n] = find_counterexample(
            protocol, n, semantics=semantics, depth_bound=args.depth_bound,
            state_cap=args.state_cap, kinds=kinds,
        )
    if args.format == "json":
        payload = {"schema_version": SCHEMA_VERSION, "results": []}
        for n, c in found.items():
            payload["results"].append(
                {
                    "n": n,
                    "kind": c and c.kind,
                    "stem_length": c and c.stem_length,
                    "cycle_length": c and c.cycle_length,
                    "reason": c and c.reason,
                    "trace": c and list(c.trace.records(protocol)),
                }
            )
        print(_dump(payload), file=out)
    else:
        for n, c in found.items():
            if c is None:
                print(f"n={n}: no counterexample", file=out)
            else:
                print(f"n={n}: {c.kind} (stem {c.stem_length}, cycle {c.cycle_length}) {c.reason}", file=out)
                out.write(c.trace.to_jsonl(protocol))
    return EXIT_OK if all(c is not None for c in found.values()) else EXIT_FAIL


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ring-explorer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ranged=True):
        p.add_argument("--protocol", default="five-atom",
                       help=f"one of {', '.join(sorted(PROTOCOL_IDS))} or a JSON rule file")
        p.add_argument("--semantics", choices=[s.value for s in Semantics])
        p.add_argument("--n", type=int)
        if ranged:
            p.add_argument("--n-min", type=int)
            p.add_argument("--n-max", type=int)
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--output", "-o")

    p = sub.add_parser("simulate", help="run one execution and write a JSON-lines trace")
    common(p, ranged=False)
    p.add_argument("--initial", help='configuration "n=<int>;occ=<csv>"')
    p.add_argument("--random-initial", action="store_true")
    p.add_argument("--strategy", choices=[s.value for s in Strategy if s is not Strategy.SCRIPT], default="synchronous")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="exhaustively verify Safety and Termination")
    common(p)
    p.add_argument("--depth-bound", type=int)
    p.add_argument("--state-cap", type=int, default=2_000_000)
    p.add_argument("--expect-failure", action="store_true",
                   help="skip ring-size preconditions; success means a counterexample was found")
    p.add_argument("--jobs", type=int, help="worker processes (default: $RING_EXPLORER_JOBS or 1)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="measured move maxima against the per-case budgets")
    common(p)
    p.add_argument("--state-cap", type=int, default=3_000_000)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("counterexample", help="search for a livelock or a bad terminal state")
    common(p)
    p.add_argument("--kind", action="append", choices=["livelock", "bad-sink", "protocol-error"])
    p.add_argument("--depth-bound", type=int)
    p.add_argument("--state-cap", type=int, default=1_000_000)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "max_steps", 1) <= 0:
        print("error: --max-steps must be positive", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, ConfigFormatError, ProtocolPreconditionViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BoundExceeded as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except RingExplorerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
