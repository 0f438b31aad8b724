"""Command-line entry point: ``bosy [options] SPEC``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .emit import EMITTERS
from .external import ExternalToolError
from .search import (REALIZABLE, UNKNOWN, UNREALIZABLE, Options, SearchStrategy,
                     SynthesisError, run_dual, run_single)
from .specio import SpecError, dualize, load_spec, parse_spec

EXIT_REALIZABLE = 0
EXIT_UNREALIZABLE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_ERROR = 4

log = logging.getLogger("bosy")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("bounds must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bosy", description="Bounded synthesis for LTL specifications.")
    p.add_argument("spec", help="JSON specification file, or - for standard input")
    p.add_argument("--backend", choices=("sat", "qbf"), default="qbf",
                   help="encoding and internal solver (default: qbf)")
    p.add_argument("--strategy", choices=("linear", "exponential"), default="exponential",
                   help="bound growth: +1 or doubling (default: exponential)")
    p.add_argument("--player", choices=("system", "environment", "both"), default="both",
                   help="search for the system, the environment, or both alternately (default: both)")
    p.add_argument("--synthesize", action="store_true", help="print the implementation after the verdict")
    p.add_argument("--target", choices=tuple(EMITTERS), default="aiger",
                   help="implementation format for --synthesize (default: aiger)")
    p.add_argument("--min-bound", type=_positive, default=1, metavar="N", help="first bound tried (default: 1)")
    p.add_argument("--max-bound", type=_positive, default=None, metavar="N",
                   help="give up with UNKNOWN after this bound (default: no limit)")
    p.add_argument("--external-sat", metavar="CMD", default=os.environ.get("BOSY_SAT_CMD"),
                   help="DIMACS solver command; {file} is the instance path")
    p.add_argument("--external-qbf", metavar="CMD", default=os.environ.get("BOSY_QBF_CMD"),
                   help="QDIMACS solver command; {file} is the instance path")
    p.add_argument("--translator", metavar="CMD", default=os.environ.get("BOSY_TRANSLATOR_CMD"),
                   help="LTL to HOA command; {formula} is the formula text")
    p.add_argument("--optimize", choices=("none", "all"), default="all",
                   help="automaton simplifications before encoding (default: all)")
    p.add_argument("-v", "--verbose", action="count", default=0, help="log progress to standard error")
    return p


def _read_spec(path: str):
    if path == "-":
        return parse_spec(sys.stdin.read())
    return load_spec(path)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.max_bound is not None and args.max_bound < args.min_bound:
            raise UsageError("--max-bound is smaller than --min-bound")
    except UsageError as e:
        print(f"bosy: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(stream=sys.stderr, format="%(name)s: %(message)s",
                        level=logging.DEBUG if args.verbose > 1 else
                        logging.INFO if args.verbose else logging.WARNING)
    strategy = SearchStrategy(args.strategy, args.min_bound, args.max_bound)
    options = Options(
        backend=args.backend,
        synthesize=args.synthesize,
        optimize=args.optimize == "all",
        external_sat=args.external_sat,
        external_qbf=args.external_qbf,
        translator=args.translator,
    )
    try:
        problem = _read_spec(args.spec)
        if args.player == "both":
            verdict = run_dual(problem, strategy, options)
        elif args.player == "system":
            verdict = run_single(problem, strategy, options)
        else:
            verdict = run_single(dualize(problem), strategy, options)
        artifact = EMITTERS[args.target](verdict.machine) if verdict.machine is not None else None
    except (OSError, SpecError, SynthesisError, ExternalToolError, ValueError) as e:
        print(f"bosy: error: {e}", file=sys.stderr)
        return EXIT_ERROR

    if verdict.bound is not None:
        log.info("decided by the %s player at bound %d", verdict.player.value, verdict.bound)
    out = sys.stdout
    out.write(verdict.outcome.upper() + "\n")
    if args.synthesize and artifact is not None:
        out.write(artifact)
    out.flush()
    return {REALIZABLE: EXIT_REALIZABLE, UNREALIZABLE: EXIT_UNREALIZABLE, UNKNOWN: EXIT_UNKNOWN}[verdict.outcome]


if __name__ == "__main__":
    sys.exit(main())
