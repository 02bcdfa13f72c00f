"""Command-line interface: ``powertower <command> [options]``.

Exit codes are a stable contract:

    0  Equal (verify) or success
    1  NotEqual
    2  Unknown (including undecided family members / unsupported gamma shapes)
    3  usage, parse or lowering error
    4  magnitude cap exceeded
    5  I/O error
    6  corrupt checkpoint
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .equality_engine import Outcome, solve_gamma, verify_equation, verify_instance
from .errors import (
    CorruptCheckpoint,
    DomainError,
    LoweringError,
    MagnitudeError,
    ParseError,
    PowerTowerError,
    UnsupportedShape,
)
from .exact_core import as_rational, check_base, format_rational
from .expr_parser import EquationInstance, PowEquation, lower, parse, print_canonical
from .interval_eval import MIN_BITS, eval_pownum
from .search_engine import SearchConfig, family_scan, run_search
from .tower_algebra import PowNum

EXIT_EQUAL = 0
EXIT_OK = 0
EXIT_NOT_EQUAL = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_MAGNITUDE = 4
EXIT_IO = 5
EXIT_CHECKPOINT = 6

# applied after parsing, so the flags work before or after the command name
_GLOBAL_DEFAULTS = {"base": 2, "bits": 256, "format": "text"}

_VERDICT_EXIT = {Outcome.EQUAL: EXIT_EQUAL, Outcome.NOT_EQUAL: EXIT_NOT_EQUAL, Outcome.UNKNOWN: EXIT_UNKNOWN}

# options whose values may legitimately start with '-' (negative rationals)
_VALUE_FLAGS = {"--a", "--b", "--c"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 3 instead of 2.

    Abbreviations are off: ``--b`` must never be read as ``--base``.
    """

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _height(text: str) -> int:
    try:
        h = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if h < 2:
        raise argparse.ArgumentTypeError(f"tower height must be >= 2, got {h}")
    return h


def _heights(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--heights needs three comma-separated integers, e.g. 2,2,3")
    return tuple(_height(p.strip()) for p in parts)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _bits(text: str) -> int:
    v = _positive(text)
    if v < MIN_BITS:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_BITS} bits")
    return v


def _base(text: str) -> int:
    try:
        return check_base(int(text))
    except (ValueError, PowerTowerError):
        raise argparse.ArgumentTypeError(f"base must be a prime integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--base", type=_base, default=argparse.SUPPRESS, help="prime base B (default 2)")
    common.add_argument("--bits", type=_bits, default=argparse.SUPPRESS,
                        help="interval precision in bits (default 256)")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS,
                        help="output format (default text)")

    parser = _Parser(prog="powertower", parents=[common],
                     description="Exact verification and search for power-tower equations over B^(rational).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify", parents=[common], help="decide an equation, e.g. '2^^3 * 2^^3 = 4^^2'")
    p.add_argument("equation")

    p = sub.add_parser("eval", parents=[common], help="rigorous decimal enclosure of an expression")
    p.add_argument("expression")

    p = sub.add_parser("canonical", parents=[common], help="print the canonical exact form")
    p.add_argument("expression")

    p = sub.add_parser("search", parents=[common], help="exhaustive search over a rational grid")
    p.add_argument("--k", type=_height, required=True)
    p.add_argument("--m", type=_height, required=True)
    p.add_argument("--n", type=_height, required=True)
    p.add_argument("--max-num", type=_nonneg, required=True, help="bound on |numerator|")
    p.add_argument("--max-den", type=_positive, required=True, help="bound on the denominator")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--output", help="results JSONL path (unknowns and summary go next to it)")
    p.add_argument("--checkpoint", help="checkpoint file; requires --output")
    p.add_argument("--no-dedup", action="store_true", help="keep both (a, b) and (b, a) when k == m")

    p = sub.add_parser("family-scan", parents=[common], help="scan the (q, q, 2q) family")
    p.add_argument("--heights", type=_heights, required=True, help="k,m,n")
    p.add_argument("--max-num", type=_nonneg, required=True)
    p.add_argument("--max-den", type=_positive, required=True)

    p = sub.add_parser("solve-gamma", parents=[common], help="all c solving the equation for given a, b")
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--k", type=_height, required=True)
    p.add_argument("--m", type=_height, required=True)
    p.add_argument("--n", type=_height, required=True)
    return parser


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Turn ``--a -1/2`` into ``--a=-1/2`` so argparse does not see an option."""
    out = []
    it = iter(range(len(argv)))
    for i in it:
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            next(it, None)
        else:
            out.append(tok)
    return out


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _lower(text: str, base: int):
    return lower(parse(text), base)


def cmd_verify(args) -> int:
    target = _lower(args.equation, args.base)
    if isinstance(target, EquationInstance):
        verdict = verify_instance(target, args.bits)
    elif isinstance(target, PowEquation):
        verdict = verify_equation(target.lhs, target.rhs, args.bits)
    else:
        raise UsageError("verify needs an equation containing '='")
    code = _VERDICT_EXIT[verdict.outcome]
    _emit(args, {
        "command": "verify", "input": args.equation, "base": args.base,
        "verdict": verdict.outcome.value, "method": verdict.method.value,
        "exact": verdict.is_exact, "detail": verdict.detail, "exit_code": code,
    }, str(verdict))
    return code


def _as_value(text: str, base: int) -> PowNum:
    value = _lower(text, base)
    if not isinstance(value, PowNum):
        raise UsageError("expected an expression, got an equation")
    return value


def cmd_eval(args) -> int:
    value = _as_value(args.expression, args.base)
    iv = eval_pownum(value, args.bits)
    lo, hi = iv.to_decimal()
    canonical = print_canonical(value)
    _emit(args, {
        "command": "eval", "input": args.expression, "base": args.base, "bits": args.bits,
        "lo": lo, "hi": hi, "canonical": canonical,
    }, f"[{lo}, {hi}]\ncanonical: {canonical}")
    return EXIT_OK


def cmd_canonical(args) -> int:
    canonical = print_canonical(_as_value(args.expression, args.base))
    _emit(args, {"command": "canonical", "input": args.expression, "base": args.base,
                 "canonical": canonical}, canonical)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.checkpoint and not args.output:
        raise UsageError("--checkpoint requires --output")
    cfg = SearchConfig(args.k, args.m, args.n, args.max_num, args.max_den, base=args.base,
                       interval_bits=args.bits, dedup_symmetric=not args.no_dedup, output=args.output)
    report = run_search(cfg, workers=args.workers, checkpoint=args.checkpoint)
    _emit(args, {"command": "search", **report.summary()}, report.text())
    return EXIT_OK


def cmd_family_scan(args) -> int:
    try:
        hits = family_scan(args.heights, args.max_num, args.max_den, args.base, args.bits)
    except UnsupportedShape as exc:
        _emit(args, {"command": "family-scan", "error": "Unknown", "detail": str(exc)}, f"Unknown: {exc}")
        return EXIT_UNKNOWN
    text = "{" + ", ".join(format_rational(q) for q in hits) + "}"
    _emit(args, {"command": "family-scan", "heights": list(args.heights), "base": args.base,
                 "solutions": [format_rational(q) for q in hits]}, text)
    return EXIT_OK


def cmd_solve_gamma(args) -> int:
    try:
        cs = solve_gamma(args.a, args.b, args.k, args.m, args.n, args.base)
    except UnsupportedShape as exc:
        _emit(args, {"command": "solve-gamma", "error": "Unknown", "detail": str(exc)}, f"Unknown: {exc}")
        return EXIT_UNKNOWN
    text = "no solution" if not cs else "\n".join(f"c = {format_rational(c)}" for c in cs)
    _emit(args, {"command": "solve-gamma", "a": format_rational(args.a), "b": format_rational(args.b),
                 "heights": [args.k, args.m, args.n], "base": args.base,
                 "solutions": [format_rational(c) for c in cs]}, text)
    return EXIT_OK


_COMMANDS = {
    "verify": cmd_verify,
    "eval": cmd_eval,
    "canonical": cmd_canonical,
    "search": cmd_search,
    "family-scan": cmd_family_scan,
    "solve-gamma": cmd_solve_gamma,
}


def _fail(args, code: int, kind: str, message: str) -> int:
    if getattr(args, "format", "text") == "json":
        print(json.dumps({"error": kind, "message": message, "exit_code": code}, sort_keys=True))
    else:
        print(f"error: {kind}: {message}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        return _fail(args, EXIT_USAGE, type(exc).__name__, str(exc))
    except (LoweringError, DomainError, UsageError) as exc:
        return _fail(args, EXIT_USAGE, type(exc).__name__, str(exc))
    except MagnitudeError as exc:
        return _fail(args, EXIT_MAGNITUDE, "MagnitudeError", str(exc))
    except CorruptCheckpoint as exc:
        return _fail(args, EXIT_CHECKPOINT, "CorruptCheckpoint", str(exc))
    except OSError as exc:
        return _fail(args, EXIT_IO, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
