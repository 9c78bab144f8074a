"""Command line front end.

Subcommands:

* ``decompose``: read a document (file or '-' for stdin), decompose,
  print systems pretty or as stable JSON, optionally verify over F_p.
* ``fuzz``: run seeded random algebraic systems through decompose and
  the finite-field checker, reporting a pass/fail line per seed.

Exit codes: 0 ok, 2 parse or usage error, 3 step budget exhausted
(diagnostic only, no partial output), 4 verification failed,
5 verification inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Tuple

from . import prs
from .algebraic import (DecomposeOptions, Decomposition, StepBudgetExceeded,
                        decompose)
from .differential import DiffSimpleSystem, diff_decompose
from .parsing import InputDocument, ParseError, parse
from .verify import DEFAULT_PRIMES, VerifyReport, check_decomposition, random_system

OK, USAGE, BUDGET, VERIFY_FAIL, INCONCLUSIVE = 0, 2, 3, 4, 5


def options_from_args(args) -> DecomposeOptions:
    return DecomposeOptions(strategy=args.strategy, factor=args.factor,
                            coeff_reduce=not args.no_coeff_reduce,
                            delay_squarefree=args.delay_squarefree,
                            step_budget=args.step_budget)


def run(document: InputDocument, options: DecomposeOptions) -> Decomposition:
    """Decompose a parsed document with the matching engine flavor."""
    if document.mode == "algebraic":
        return decompose(document.relations, document.ranking, options)
    return diff_decompose(document.relations, document.ranking, options)


def _relation_record(rel, ranking):
    return {"poly": str(rel.poly),
            "relation": "=0" if rel.is_eq else "<>0",
            "leader": (ranking.var_text(rel.poly.leader)
                       if rel.poly.leader is not None else None),
            "mdeg": rel.poly.mdeg if rel.poly.leader is not None else 0}


def _system_record(system, ranking):
    out = {"relations": [_relation_record(r, ranking)
                         for r in system.relations]}
    if isinstance(system, DiffSimpleSystem):
        out["janet"] = {
            ranking.var_text(ranking.key_of(w)):
                sorted(ranking.derivations[l] for l in red)
            for w, red in system.janet}
    return out


def serialize(document: InputDocument, dec: Decomposition,
              report: Optional[VerifyReport]) -> dict:
    out = {
        "mode": document.mode,
        "ranking": document.declarations(),
        "options": {
            "strategy": dec.options.strategy,
            "factor": dec.options.factor,
            "coeff_reduce": dec.options.coeff_reduce,
            "delay_squarefree": dec.options.delay_squarefree,
            "step_budget": dec.options.step_budget,
        },
        "input": [f"{r}" for r in dec.input],
        "systems": [_system_record(s, document.ranking) for s in dec.systems],
        "stats": dec.stats.to_dict(),
    }
    if report is not None:
        out["verify"] = report.to_dict()
    return out


def render_json(record: dict) -> str:
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


def render_pretty(dec: Decomposition) -> str:
    lines = []
    if not dec.systems:
        lines.append("inconsistent input: no simple systems")
    for i, system in enumerate(dec.systems):
        lines.append(f"System {i + 1}")
        for rel in system.relations:
            lines.append(f"  {rel}")
    s = dec.stats
    lines.append(f"# systems: {len(dec.systems)}  steps: {s.steps}  "
                 f"splits: {s.splits}  discarded: {s.discarded}")
    return "\n".join(lines) + "\n"


def _parse_primes(text: str) -> Tuple[int, ...]:
    try:
        primes = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")
    if not primes or any(p < 2 for p in primes):
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}")
    return primes


def _verdict_exit(report: VerifyReport) -> int:
    if report.verdict == "fail":
        return VERIFY_FAIL
    if report.verdict == "inconclusive":
        return INCONCLUSIVE
    return OK


def cmd_decompose(args) -> int:
    text = sys.stdin.read() if args.input == "-" else open(args.input).read()
    try:
        document = parse(text)
    except ParseError as bad:
        print(f"parse error: {bad}", file=sys.stderr)
        return USAGE
    if args.mode and args.mode != document.mode:
        print(f"--mode {args.mode} conflicts with the document "
              f"({document.mode})", file=sys.stderr)
        return USAGE
    if args.verify and document.mode == "differential":
        print("--verify checks algebraic solution sets only", file=sys.stderr)
        return USAGE

    options = options_from_args(args)
    try:
        dec = run(document, options)
    except StepBudgetExceeded as bad:
        print(f"step budget exhausted: {bad}", file=sys.stderr)
        return BUDGET

    report = None
    if args.verify:
        report = check_decomposition(document.relations, dec,
                                     primes=args.verify,
                                     simple_samples=args.simple_samples)

    if args.json:
        sys.stdout.write(render_json(serialize(document, dec, report)))
    else:
        sys.stdout.write(render_pretty(dec))
        if report is not None:
            print(f"verify: {report.verdict} "
                  f"(primes {[r.p for r in report.primes]}, "
                  f"skipped {[p for p, _ in report.skipped]})", file=sys.stderr)
    if args.report and report is not None:
        with open(args.report, "w") as fh:
            fh.write(render_json(report.to_dict()))
    return _verdict_exit(report) if report is not None else OK


def cmd_fuzz(args) -> int:
    options = DecomposeOptions(strategy=args.strategy, factor=args.factor,
                               coeff_reduce=not args.no_coeff_reduce,
                               delay_squarefree=args.delay_squarefree,
                               step_budget=args.step_budget)
    primes = args.verify or DEFAULT_PRIMES[:2]
    worst = OK
    records = []
    for seed in range(args.seed, args.seed + args.count):
        ranking, rels = random_system(seed, n_vars=args.n_vars,
                                      max_deg=args.max_deg,
                                      n_rels=args.n_rels,
                                      ineq_ratio=args.ineq_ratio)
        dec = decompose(rels, ranking, options)
        report = check_decomposition(rels, dec, primes=primes,
                                     simple_samples=args.simple_samples)
        records.append({"seed": seed, "systems": len(dec),
                        "verdict": report.verdict,
                        "verify": report.to_dict()})
        if not args.json:
            print(f"seed {seed}: {report.verdict} ({len(dec)} systems)")
        code = _verdict_exit(report)
        if code == VERIFY_FAIL or (code and worst != VERIFY_FAIL):
            worst = code
    if args.json:
        sys.stdout.write(render_json({"fuzz": records}))
    return worst


def _add_engine_flags(cmd):
    cmd.add_argument("--strategy", choices=("equations-first", "leader-first"),
                     default="equations-first")
    cmd.add_argument("--factor", dest="factor", action="store_true",
                     help="split relations into irreducible factors")
    cmd.add_argument("--no-factor", dest="factor", action="store_false",
                     help="keep relations unfactored (default)")
    cmd.set_defaults(factor=False)
    cmd.add_argument("--no-coeff-reduce", action="store_true",
                     help="skip coefficient reduction of candidates")
    cmd.add_argument("--delay-squarefree", action="store_true",
                     help="postpone square-free splits to a second phase "
                          "(algebraic mode only)")
    cmd.add_argument("--step-budget", type=int, default=0, metavar="N",
                     help="abort after N work-list steps (0 = unlimited)")
    cmd.add_argument("--verify", type=_parse_primes, metavar="P[,P...]",
                     help="check the decomposition over these primes")
    cmd.add_argument("--simple-samples", type=int, default=10, metavar="K",
                     help="fiber samples per relation during verification")
    cmd.add_argument("--json", action="store_true",
                     help="machine-readable output (byte-stable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="thomas",
        description="Thomas decomposition of algebraic and differential "
                    "polynomial systems")
    sub = ap.add_subparsers(dest="command", required=True)

    dc = sub.add_parser("decompose", help="decompose a system from a document")
    dc.add_argument("input", nargs="?", default="-",
                    help="input file, or '-' for stdin (default)")
    dc.add_argument("--mode", choices=("algebraic", "differential"),
                    help="assert the document mode")
    dc.add_argument("--report", metavar="PATH",
                    help="write the verification report to PATH as JSON")
    _add_engine_flags(dc)
    dc.set_defaults(func=cmd_decompose)

    fz = sub.add_parser("fuzz", help="random systems through engine and oracle")
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--count", type=int, default=20)
    fz.add_argument("--n-vars", type=int, default=3)
    fz.add_argument("--max-deg", type=int, default=3)
    fz.add_argument("--n-rels", type=int, default=3)
    fz.add_argument("--ineq-ratio", type=float, default=0.25)
    _add_engine_flags(fz)
    fz.set_defaults(func=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    prs.reset_cache()  # byte-stable stats across invocations
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
