"""Bounded exhaustive search for (B^a, B^b, B^c) solving a^^k * b^^m = c^^n.

Each (a, b) cell of the grid is an independent work unit.  Gamma is solved
exactly where :func:`solve_gamma` supports the shape, otherwise every c of
the grid is checked with :func:`verify_instance`.  Results are written in
cell order, so the output is identical for any worker count, and a
checkpoint after every cell lets an interrupted run resume to the same
bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .equality_engine import (
    EquationInstance,
    Outcome,
    is_trivial_solution,
    solve_gamma,
    verify_instance,
)
from .errors import CorruptCheckpoint, DomainError, MagnitudeError, UnsupportedShape
from .exact_core import as_rational, check_base, format_rational
from .interval_eval import eval_expsum

log = logging.getLogger(__name__)

CHECKPOINT_HEADER = "powertower-search-checkpoint v1"


def enumerate_rationals(max_num: int, max_den: int) -> List[Fraction]:
    """Reduced p/q with |p| <= max_num, 1 <= q <= max_den.

    Ordered by denominator, then |numerator|, negatives first.
    """
    if max_num < 0 or max_den < 1:
        raise DomainError("need max_num >= 0 and max_den >= 1")
    out = [Fraction(0)]
    for q in range(1, max_den + 1):
        for p in range(1, max_num + 1):
            if gcd(p, q) == 1:
                out.extend((Fraction(-p, q), Fraction(p, q)))
    return out


def rational_str(x: Fraction) -> str:
    """Always ``"p/q"``, including integers (``"2/1"``)."""
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SearchConfig:
    k: int
    m: int
    n: int
    max_numerator: int
    max_denominator: int
    base: int = 2
    interval_bits: int = 256
    dedup_symmetric: bool = True
    output: Optional[str] = None

    def __post_init__(self):
        check_base(self.base)
        for name in ("k", "m", "n"):
            h = getattr(self, name)
            if not isinstance(h, int) or h < 2:
                raise DomainError(f"height {name} must be an integer >= 2, got {h!r}")
        if self.max_numerator < 0 or self.max_denominator < 1:
            raise DomainError("grid bounds need max_numerator >= 0 and max_denominator >= 1")
        if self.interval_bits < 16:
            raise DomainError("interval_bits must be >= 16")

    def fingerprint(self) -> str:
        data = asdict(self)
        data.pop("output")
        blob = json.dumps(data, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def header(self) -> dict:
        return {
            "base": self.base,
            "heights": [self.k, self.m, self.n],
            "grid": {"max_numerator": self.max_numerator, "max_denominator": self.max_denominator,
                     "metric": "|numerator| <= max_numerator, denominator <= max_denominator"},
            "interval_bits": self.interval_bits,
            "dedup_symmetric": self.dedup_symmetric,
        }


@dataclass(frozen=True)
class SolutionRecord:
    a: Fraction
    b: Fraction
    c: Fraction
    k: int
    m: int
    n: int
    base: int
    method: str
    trivial: bool
    timestamp: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "a": rational_str(self.a), "b": rational_str(self.b), "c": rational_str(self.c),
            "k": self.k, "m": self.m, "n": self.n, "base": self.base,
            "verdict": Outcome.EQUAL.value, "method": self.method, "trivial": self.trivial,
        }

    @classmethod
    def from_json(cls, d: dict) -> "SolutionRecord":
        return cls(Fraction(d["a"]), Fraction(d["b"]), Fraction(d["c"]), d["k"], d["m"], d["n"],
                   d["base"], d["method"], d["trivial"])


@dataclass(frozen=True)
class UnknownRecord:
    """A candidate the engine could neither prove nor refute; c is None for whole cells."""

    a: Fraction
    b: Fraction
    c: Optional[Fraction]
    k: int
    m: int
    n: int
    base: int
    method: str
    detail: str
    width: Optional[str]

    def to_json(self) -> dict:
        return {
            "a": rational_str(self.a), "b": rational_str(self.b),
            "c": None if self.c is None else rational_str(self.c),
            "k": self.k, "m": self.m, "n": self.n, "base": self.base,
            "verdict": Outcome.UNKNOWN.value, "method": self.method,
            "detail": self.detail, "width": self.width,
        }

    @classmethod
    def from_json(cls, d: dict) -> "UnknownRecord":
        c = None if d["c"] is None else Fraction(d["c"])
        return cls(Fraction(d["a"]), Fraction(d["b"]), c, d["k"], d["m"], d["n"], d["base"],
                   d["method"], d["detail"], d["width"])


def dumps(record) -> str:
    return json.dumps(record.to_json(), sort_keys=True, separators=(",", ":"))


_STAT_KEYS = ("cells", "exact_cells", "fallback_cells", "verify_calls", "unknown_cells")


@dataclass
class CellResult:
    solutions: List[SolutionRecord]
    unknowns: List[UnknownRecord]
    stats: Dict[str, int]


@lru_cache(maxsize=8)
def _grid(max_num: int, max_den: int) -> Tuple[Fraction, ...]:
    return tuple(enumerate_rationals(max_num, max_den))


def cell_pairs(cfg: SearchConfig) -> List[Tuple[int, int]]:
    grid = _grid(cfg.max_numerator, cfg.max_denominator)
    symmetric = cfg.dedup_symmetric and cfg.k == cfg.m
    return [(i, j) for i in range(len(grid)) for j in range(len(grid)) if not symmetric or i <= j]


def _width_text(inst: EquationInstance, bits: int) -> Optional[str]:
    try:
        iv = eval_expsum(inst.exponent(), bits)
    except MagnitudeError:
        return None
    return format(float(iv.width), ".3e")


def process_cell(cfg: SearchConfig, a: Fraction, b: Fraction) -> CellResult:
    grid = _grid(cfg.max_numerator, cfg.max_denominator)
    stats = dict.fromkeys(_STAT_KEYS, 0)
    stats["cells"] = 1
    solutions, unknowns = [], []

    def record(c, verdict):
        solutions.append(SolutionRecord(
            a, b, c, cfg.k, cfg.m, cfg.n, cfg.base, verdict.method.value,
            is_trivial_solution(a, b, c, cfg.k, cfg.m, cfg.n), time.time()))

    try:
        candidates = solve_gamma(a, b, cfg.k, cfg.m, cfg.n, cfg.base)
        stats["exact_cells"] = 1
        exhaustive = False
    except UnsupportedShape:
        candidates = grid
        stats["fallback_cells"] = 1
        exhaustive = True
    except MagnitudeError as exc:
        stats["unknown_cells"] = 1
        unknowns.append(UnknownRecord(a, b, None, cfg.k, cfg.m, cfg.n, cfg.base,
                                      "IntervalSeparation", f"magnitude: {exc}", None))
        return CellResult(solutions, unknowns, stats)

    for c in candidates:
        inst = EquationInstance(cfg.base, a, b, c, cfg.k, cfg.m, cfg.n)
        stats["verify_calls"] += 1
        try:
            verdict = verify_instance(inst, cfg.interval_bits)
        except MagnitudeError as exc:
            unknowns.append(UnknownRecord(a, b, c, cfg.k, cfg.m, cfg.n, cfg.base,
                                          "IntervalSeparation", f"magnitude: {exc}", None))
            continue
        if verdict.outcome is Outcome.EQUAL:
            if not verdict.is_exact:
                raise AssertionError(f"non-exact Equal for {inst}")
            record(c, verdict)
        elif verdict.outcome is Outcome.UNKNOWN:
            unknowns.append(UnknownRecord(a, b, c, cfg.k, cfg.m, cfg.n, cfg.base, verdict.method.value,
                                          verdict.detail, _width_text(inst, cfg.interval_bits)))
        elif not exhaustive:
            raise AssertionError(f"solve_gamma candidate refuted: {inst}: {verdict}")
    solutions.sort(key=lambda r: r.c)
    return CellResult(solutions, unknowns, stats)


def _process_index(args) -> CellResult:
    cfg, i, j = args
    grid = _grid(cfg.max_numerator, cfg.max_denominator)
    return process_cell(cfg, grid[i], grid[j])


# -- checkpointing ------------------------------------------------------------


@dataclass
class SearchState:
    next_cell: int = 0
    results_offset: int = 0
    unknowns_offset: int = 0
    stats: Dict[str, int] = field(default_factory=lambda: dict.fromkeys(_STAT_KEYS, 0))

    def dump(self, fingerprint: str) -> str:
        return "\n".join([
            CHECKPOINT_HEADER,
            f"config {fingerprint}",
            f"next_cell {self.next_cell}",
            f"results_offset {self.results_offset}",
            f"unknowns_offset {self.unknowns_offset}",
            f"stats {json.dumps(self.stats, sort_keys=True, separators=(',', ':'))}",
            "end",
        ]) + "\n"


def checkpoint_resume(path, fingerprint: Optional[str] = None) -> SearchState:
    """Load a checkpoint; a missing file means a fresh start at cell 0."""
    path = Path(path)
    if not path.exists():
        return SearchState()
    try:
        lines = path.read_text().split("\n")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorruptCheckpoint(f"{path}: unreadable ({exc})") from exc
    if len(lines) < 7 or lines[0] != CHECKPOINT_HEADER or lines[6] != "end":
        raise CorruptCheckpoint(f"{path}: missing header or truncated")
    fields = {}
    for line in lines[1:6]:
        key, _, value = line.partition(" ")
        fields[key] = value
    try:
        state = SearchState(
            next_cell=int(fields["next_cell"]),
            results_offset=int(fields["results_offset"]),
            unknowns_offset=int(fields["unknowns_offset"]),
            stats=json.loads(fields["stats"]),
        )
    except (KeyError, ValueError) as exc:
        raise CorruptCheckpoint(f"{path}: malformed field ({exc})") from exc
    if fingerprint is not None and fields.get("config") != fingerprint:
        raise CorruptCheckpoint(f"{path}: written for a different search configuration")
    if min(state.next_cell, state.results_offset, state.unknowns_offset) < 0:
        raise CorruptCheckpoint(f"{path}: negative counters")
    return state


def _write_checkpoint(path: Path, state: SearchState, fingerprint: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(state.dump(fingerprint))
    os.replace(tmp, path)


# -- reports ------------------------------------------------------------------


@dataclass
class SearchReport:
    config: SearchConfig
    solutions: List[SolutionRecord]
    unknowns: List[UnknownRecord]
    stats: Dict[str, int]
    complete: bool = True

    @property
    def nontrivial(self) -> List[SolutionRecord]:
        return [s for s in self.solutions if not s.trivial]

    @property
    def trivial(self) -> List[SolutionRecord]:
        return [s for s in self.solutions if s.trivial]

    def summary(self) -> dict:
        return {
            "header": self.config.header(),
            "complete": self.complete,
            "counts": {
                "solutions": len(self.solutions),
                "trivial": len(self.trivial),
                "nontrivial": len(self.nontrivial),
                "unknown": len(self.unknowns),
            },
            "nontrivial": [[rational_str(s.a), rational_str(s.b), rational_str(s.c)] for s in self.nontrivial],
            "stats": dict(sorted(self.stats.items())),
        }

    def text(self) -> str:
        h = self.config.header()
        lines = [
            f"search B={h['base']} (k,m,n)=({self.config.k},{self.config.m},{self.config.n}) "
            f"grid |p|<={self.config.max_numerator} q<={self.config.max_denominator}",
            f"cells: {self.stats.get('cells', 0)} (exact {self.stats.get('exact_cells', 0)}, "
            f"fallback {self.stats.get('fallback_cells', 0)})",
            f"trivial: {len(self.trivial)}  nontrivial: {len(self.nontrivial)}  unknown: {len(self.unknowns)}",
        ]
        for s in self.nontrivial:
            lines.append(f"  ({format_rational(s.a)}, {format_rational(s.b)}, {format_rational(s.c)})"
                         f"  [{s.method}]")
        if not self.complete:
            lines.append("(incomplete: resume from checkpoint)")
        return "\n".join(lines)


def output_paths(output) -> Tuple[Path, Path, Path]:
    out = Path(output)
    return out, out.with_name(out.name + ".unknown.jsonl"), out.with_name(out.name + ".summary.json")


def _read_records(path: Path, cls) -> list:
    if not path.exists():
        return []
    return [cls.from_json(json.loads(line)) for line in path.read_text().splitlines() if line]


def _truncate(path: Path, offset: int):
    if path.exists():
        with open(path, "r+b") as fh:
            fh.truncate(offset)
    elif offset:
        raise CorruptCheckpoint(f"{path} is missing but the checkpoint expects {offset} bytes")


def _iter_results(cfg: SearchConfig, pairs: Sequence[Tuple[int, int]], workers: int) -> Iterator[CellResult]:
    args = [(cfg, i, j) for i, j in pairs]
    if workers <= 1:
        for arg in args:
            yield _process_index(arg)
        return
    chunk = max(1, len(args) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_process_index, args, chunksize=chunk)


def run_search(cfg: SearchConfig, workers: int = 1, checkpoint=None,
               stop_after: Optional[int] = None) -> SearchReport:
    """Run (or resume) a grid search.

    With ``cfg.output`` set, solutions go to that JSONL file, Unknowns to
    ``<output>.unknown.jsonl`` and the summary to ``<output>.summary.json``.
    ``checkpoint`` (requires ``output``) enables resuming; ``stop_after``
    limits how many cells this call processes.
    """
    pairs = cell_pairs(cfg)
    fingerprint = cfg.fingerprint()
    if checkpoint is not None and cfg.output is None:
        raise ValueError("checkpointing requires an output path")
    state = checkpoint_resume(checkpoint, fingerprint) if checkpoint is not None else SearchState()
    if state.next_cell > len(pairs):
        raise CorruptCheckpoint(f"checkpoint cell {state.next_cell} beyond grid of {len(pairs)} cells")
    ckpt_path = Path(checkpoint) if checkpoint is not None else None

    solutions: List[SolutionRecord] = []
    unknowns: List[UnknownRecord] = []
    stats = dict(state.stats)
    todo = pairs[state.next_cell:]
    if stop_after is not None:
        todo = todo[:stop_after]

    if cfg.output is not None:
        results_path, unknown_path, summary_path = output_paths(cfg.output)
        results_path.parent.mkdir(parents=True, exist_ok=True)
        if state.next_cell == 0 and ckpt_path is None:
            results_path.write_text("")
            unknown_path.write_text("")
        else:
            _truncate(results_path, state.results_offset)
            _truncate(unknown_path, state.unknowns_offset)
        res_fh = open(results_path, "ab")
        unk_fh = open(unknown_path, "ab")
    else:
        res_fh = unk_fh = None

    try:
        for result in _iter_results(cfg, todo, workers):
            for key, value in result.stats.items():
                stats[key] = stats.get(key, 0) + value
            state.next_cell += 1
            if res_fh is None:
                solutions.extend(result.solutions)
                unknowns.extend(result.unknowns)
                continue
            for rec in result.solutions:
                res_fh.write((dumps(rec) + "\n").encode())
            for rec in result.unknowns:
                unk_fh.write((dumps(rec) + "\n").encode())
            res_fh.flush()
            unk_fh.flush()
            state.results_offset = res_fh.tell()
            state.unknowns_offset = unk_fh.tell()
            state.stats = stats
            if ckpt_path is not None:
                _write_checkpoint(ckpt_path, state, fingerprint)
    finally:
        if res_fh is not None:
            res_fh.close()
            unk_fh.close()

    done = state.next_cell >= len(pairs)
    if cfg.output is not None:
        solutions = _read_records(results_path, SolutionRecord)
        unknowns = _read_records(unknown_path, UnknownRecord)
    report = SearchReport(cfg, solutions, unknowns, stats, complete=done)
    if cfg.output is not None and done:
        summary_path.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    log.info("search finished %d/%d cells", state.next_cell, len(pairs))
    return report


def family_scan(heights: Tuple[int, int, int], max_num: int, max_den: int, base: int = 2,
                max_bits: int = 256) -> List[Fraction]:
    """q on the grid for which (B^q, B^q, B^(2q)) solves the equation at the given heights."""
    k, m, n = heights
    hits = []
    for q in enumerate_rationals(max_num, max_den):
        verdict = verify_instance(EquationInstance(base, q, q, 2 * q, k, m, n), max_bits)
        if verdict.outcome is Outcome.EQUAL:
            hits.append(q)
        elif verdict.outcome is Outcome.UNKNOWN:
            raise UnsupportedShape(f"family member q={q} undecided: {verdict}")
    return sorted(hits)
