"""Exact arithmetic, decision procedures and search for power-tower equations.

Values are restricted to powers ``B**q`` of a fixed prime base with rational
``q``; every tower product then has an exact symbolic exponent, and equality
is decided by field arithmetic, a transcendence rule, or rigorous intervals.
"""

__version__ = "0.1.0"

from .errors import (
    ArityError,
    AtomNotPowerOfBase,
    BaseMismatch,
    BaseNotSupported,
    CorruptCheckpoint,
    DepthError,
    DomainError,
    HeightError,
    LoweringError,
    MagnitudeError,
    ParseError,
    PowerTowerError,
    PromotionError,
    UnsupportedShape,
)
from .exact_core import FieldElement, Rational, as_rational, base_power, format_rational
from .tower_algebra import ExpChain, ExpSum, PowNum, atom, canonicalize, chain, const, depth, mul, power, tower
from .interval_eval import Interval, Sign, eval_expsum, eval_pownum, sign_of
from .equality_engine import (
    EquationInstance,
    Method,
    Outcome,
    Verdict,
    decide_zero,
    is_trivial_solution,
    recognize_monomial,
    solve_gamma,
    verify_equation,
    verify_instance,
)
from .expr_parser import PowEquation, lower, parse, parse_value, print_canonical
from .search_engine import SearchConfig, SearchReport, enumerate_rationals, family_scan, run_search

__all__ = [name for name in dir() if not name.startswith("_")]
