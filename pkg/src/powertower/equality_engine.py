"""Three-valued decision of ``ExpSum == 0`` and exact solving for gamma.

The decision ladder, for a canonical exponent ``e``:

1. depth <= 1: ``e`` is an element of K_N and the coordinate test is exact.
2. deeper: chains are grouped into classes whose inners differ by a
   rational, giving ``e = A_0 + sum(A_s * B**E_s)`` with every ``A`` in K_N.
   All ``A`` zero proves equality; a single nonzero term refutes it; with
   exactly two terms and field-element inners, Gelfond-Schneider refutes it.
3. otherwise rigorous intervals may refute it (precision doubling from 64
   bits); when they cannot, the answer is Unknown.

Nothing beyond Gelfond-Schneider and irreducibility of ``x**N - B`` is ever
assumed, so Equal and NotEqual are always proofs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import DepthError, DomainError, MagnitudeError, UnsupportedShape
from .exact_core import FieldElement, as_rational, base_power, check_base, fe_is_rational, format_rational, monomial_decompose
from .interval_eval import dominant_sign, eval_expsum, eval_field_element, precision_ladder
from .tower_algebra import (
    ExpChain,
    ExpSum,
    PowNum,
    atom,
    depth,
    equation_exponent,
    format_expsum,
    mul,
    to_field_element,
    tower,
)

DEFAULT_MAX_BITS = 256


class Outcome(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    UNKNOWN = "Unknown"


class Method(enum.Enum):
    EXACT_FIELD = "ExactField"
    MONOMIAL_NORMAL_FORM = "MonomialNormalForm"
    TRANSCENDENCE_RULE = "TranscendenceRule"
    INTERVAL_SEPARATION = "IntervalSeparation"
    STRUCTURAL = "Structural"


EXACT_METHODS = frozenset(
    {Method.EXACT_FIELD, Method.MONOMIAL_NORMAL_FORM, Method.TRANSCENDENCE_RULE, Method.STRUCTURAL}
)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    method: Method
    detail: str = ""

    def __post_init__(self):
        if self.outcome is Outcome.UNKNOWN and self.method is Method.EXACT_FIELD:
            raise ValueError("Unknown verdicts never carry ExactField")
        if self.outcome is Outcome.EQUAL and self.method is Method.INTERVAL_SEPARATION:
            raise ValueError("intervals cannot prove equality")

    @property
    def is_exact(self) -> bool:
        return self.outcome is not Outcome.UNKNOWN and self.method in EXACT_METHODS

    def __str__(self):
        text = f"{self.outcome.value} [{self.method.value}]"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True)
class EquationInstance:
    """alpha^^k * beta^^m = gamma^^n with alpha = B^a, beta = B^b, gamma = B^c."""

    base: int
    a: Fraction
    b: Fraction
    c: Fraction
    k: int
    m: int
    n: int

    def __post_init__(self):
        check_base(self.base)
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        for name in ("k", "m", "n"):
            h = getattr(self, name)
            if not isinstance(h, int) or h < 2:
                raise DomainError(f"height {name} must be an integer >= 2, got {h!r}")

    def sides(self) -> Tuple[PowNum, PowNum]:
        lhs = mul(tower(atom(self.base, self.a), self.k), tower(atom(self.base, self.b), self.m))
        return lhs, tower(atom(self.base, self.c), self.n)

    def exponent(self) -> ExpSum:
        return equation_exponent(
            atom(self.base, self.a), atom(self.base, self.b), atom(self.base, self.c),
            self.k, self.m, self.n,
        )


# -- class decomposition ------------------------------------------------------


@dataclass
class _Class:
    rep: ExpSum
    rep_field: Optional[FieldElement]  # set when the inner has depth <= 1
    coeff: FieldElement


@dataclass
class Decomposition:
    """``algebraic + sum(cls.coeff * B**cls.rep)`` with pairwise non-rational rep differences.

    ``exact`` is True when every rep is a field element, so reps are known
    to be irrational and pairwise differences irrational.
    """

    algebraic: FieldElement
    classes: List[_Class] = field(default_factory=list)

    @property
    def nonzero_classes(self) -> List[_Class]:
        return [c for c in self.classes if not c.coeff.is_zero()]

    @property
    def exact(self) -> bool:
        return all(c.rep_field is not None for c in self.nonzero_classes)

    @property
    def term_count(self) -> int:
        return (not self.algebraic.is_zero()) + len(self.nonzero_classes)


def _field_or_none(inner: ExpSum) -> Optional[FieldElement]:
    """The inner as a field element, or None when too deep or too large."""
    if depth(inner) > 1:
        return None
    try:
        return to_field_element(inner)
    except MagnitudeError:
        return None


def _base_power_or_none(base: int, r: Fraction) -> Optional[FieldElement]:
    try:
        return base_power(base, r)
    except MagnitudeError:
        return None


def decompose(e: ExpSum) -> Decomposition:
    base = e.base
    out = Decomposition(FieldElement.rational(base, e.constant))
    for c in e.chains:
        inner = c.inner
        inner_fe = _field_or_none(inner)
        if inner_fe is not None:
            r = fe_is_rational(inner_fe)
            if r is not None:
                p = _base_power_or_none(base, r)
                if p is not None:
                    out.algebraic = out.algebraic + p.scale(c.coeff)
                    continue
                inner_fe = None  # huge rational power: keep it as its own class
        if inner_fe is not None:
            for cls in out.classes:
                if cls.rep_field is None:
                    continue
                shift = fe_is_rational(inner_fe - cls.rep_field)
                if shift is not None:
                    p = _base_power_or_none(base, shift)
                    if p is not None:
                        cls.coeff = cls.coeff + p.scale(c.coeff)
                        break
            else:
                out.classes.append(_Class(inner, inner_fe, FieldElement.rational(base, c.coeff)))
            continue
        for cls in out.classes:
            if cls.rep_field is not None:
                continue
            diff = inner - cls.rep
            if diff.is_rational:
                p = _base_power_or_none(base, diff.constant)
                if p is not None:
                    cls.coeff = cls.coeff + p.scale(c.coeff)
                    break
        else:
            out.classes.append(_Class(inner, None, FieldElement.rational(base, c.coeff)))
    return out


# -- decisions -----------------------------------------------------------------


def _separate(e: ExpSum, max_bits: int) -> Tuple[Optional[int], int, Optional[Fraction]]:
    """(sign, bits, width): sign is +1/-1 once an enclosure excludes 0."""
    width = None
    bits = 0
    for bits in precision_ladder(max_bits):
        try:
            iv = eval_expsum(e, bits)
        except MagnitudeError:
            return None, bits, None
        width = iv.width
        if iv.lo > 0:
            return 1, bits, width
        if iv.hi < 0:
            return -1, bits, width
    return None, bits, width


def decide_zero(e: ExpSum, max_bits: int = DEFAULT_MAX_BITS) -> Verdict:
    """Decide whether the canonical exponent ``e`` is exactly zero."""
    d = depth(e)
    fe = _field_or_none(e)
    if fe is not None:
        if fe.is_zero():
            return Verdict(Outcome.EQUAL, Method.EXACT_FIELD, "zero in K_%d" % fe.degree)
        return Verdict(Outcome.NOT_EQUAL, Method.EXACT_FIELD, f"nonzero element of K_{fe.degree}")

    parts = decompose(e)
    terms = parts.term_count
    if terms == 0:
        method = Method.EXACT_FIELD if d <= 2 else Method.STRUCTURAL
        return Verdict(Outcome.EQUAL, method, f"all {len(parts.classes)} exponent classes cancel")
    if terms == 1:
        return Verdict(Outcome.NOT_EQUAL, Method.EXACT_FIELD, "single nonzero term A*B^E with A != 0")
    if terms == 2 and parts.exact:
        if parts.algebraic.is_zero():
            why = "B^(E1-E2) would be algebraic with E1-E2 irrational algebraic"
        else:
            why = "B^E would be algebraic with E irrational algebraic"
        return Verdict(Outcome.NOT_EQUAL, Method.TRANSCENDENCE_RULE, f"Gelfond-Schneider: {why}")

    sign, bits, width = _separate(e, max_bits)
    if sign is not None:
        return Verdict(Outcome.NOT_EQUAL, Method.INTERVAL_SEPARATION,
                       f"{'positive' if sign > 0 else 'negative'} enclosure at {bits} bits")
    if width is None:
        dom = dominant_sign(e)
        if dom is not None:
            return Verdict(Outcome.NOT_EQUAL, Method.INTERVAL_SEPARATION,
                           f"one {'positive' if dom > 0 else 'negative'} term dominates in log magnitude")
        detail = "magnitude cap reached during interval evaluation"
    else:
        detail = f"enclosure straddles 0 up to {bits} bits (width ~2^{_log2(width)})"
    return Verdict(Outcome.UNKNOWN, Method.INTERVAL_SEPARATION, detail)


def _log2(x: Fraction) -> int:
    if x <= 0:
        return -10 ** 9
    return x.numerator.bit_length() - x.denominator.bit_length()


def decide_chain_pair(x: ExpChain, y: ExpChain) -> Verdict:
    """Decide ``x.coeff * B**x.inner == y.coeff * B**y.inner`` for depth <= 1 inners."""
    if depth(x.inner) > 1 or depth(y.inner) > 1:
        raise DepthError("decide_chain_pair needs field-element inners")
    base = x.inner.base
    d = to_field_element(x.inner) - to_field_element(y.inner)
    r = fe_is_rational(d)
    if r is None:
        return Verdict(Outcome.NOT_EQUAL, Method.TRANSCENDENCE_RULE,
                       "Gelfond-Schneider: B^d is transcendental for irrational algebraic d")
    if r == 0:
        outcome = Outcome.EQUAL if x.coeff == y.coeff else Outcome.NOT_EQUAL
        return Verdict(outcome, Method.MONOMIAL_NORMAL_FORM, "identical exponents")
    if r.denominator == 1:
        equal = x.coeff * Fraction(base) ** r.numerator == y.coeff
        return Verdict(Outcome.EQUAL if equal else Outcome.NOT_EQUAL, Method.EXACT_FIELD,
                       f"integer exponent difference {r}")
    return Verdict(Outcome.NOT_EQUAL, Method.EXACT_FIELD,
                   f"B^{format_rational(r)} is irrational while the coefficient ratio is rational")


# -- monomial recognition and gamma --------------------------------------------


def recognize_monomial(x: FieldElement) -> List[Fraction]:
    """All rationals c with c * B**c == x (exactly)."""
    mono = monomial_decompose(x)
    if mono is None:
        return []
    j, u = mono
    offset = Fraction(j, x.degree)
    base = Fraction(x.base)

    def f(z: int) -> Fraction:
        return (offset + z) * base ** z

    found = []
    if u > 0:
        # (offset + z) * B^z is positive and increasing for z >= 0 (z >= 1 if offset = 0)
        lo = 0 if offset else 1
        z = _first_at_least(f, u, lo)
        if f(z) == u:
            found.append(offset + z)
    else:
        # negative for z <= -1; |f| decreases as z falls from -2
        if f(-1) == u:
            found.append(offset - 1)
        z = -_first_at_least(lambda t: -abs(f(-t)), -abs(u), 2)
        if f(z) == u:
            found.append(offset + z)
    return sorted(found)


def _first_at_least(f, target, lo: int) -> int:
    """Smallest integer z >= lo with f(z) >= target, for increasing f."""
    step = 1
    hi = lo
    while f(hi) < target:
        lo = hi + 1
        hi += step
        step *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if f(mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _lhs_exponent(a, b, k, m, base) -> ExpSum:
    return tower(atom(base, a), k).exponent + tower(atom(base, b), m).exponent


_SCAN_LIMIT = 100_000


def _gamma3_integer_candidates(target: FieldElement) -> List[Fraction]:
    """Integers c != 0 whose height-3 tower exponent c*B^(c*B^c) lies in K and equals target."""
    base = target.base
    for bits in precision_ladder(4096):
        iv = eval_field_element(target, bits)
        if iv.excludes_zero():
            break
    else:
        raise UnsupportedShape("could not determine the sign of the left exponent")
    if iv.lo > 0:
        log2_hi = _log2(iv.hi) + 2
        out, c = [], 1
        while True:
            w = c * base ** c
            if w > log2_hi:
                break
            if target == FieldElement.rational(base, c * Fraction(base) ** w):
                out.append(Fraction(c))
            c += 1
        return out
    if iv.hi < 0:
        # |c*B^(c*B^c)| >= |c| * exp(-1/e) for c <= -1
        limit = int(abs(iv.lo) / Fraction(69, 100)) + 2
        if limit > _SCAN_LIMIT:
            raise UnsupportedShape(f"integer scan bound {limit} too large")
        out = []
        for c in range(-1, -limit - 1, -1):
            value = tower(atom(base, c), 3).exponent
            if depth(value) <= 1 and to_field_element(value) == target:
                out.append(Fraction(c))
        return sorted(out)
    raise AssertionError("unreachable")


def solve_gamma(a, b, k: int, m: int, n: int, base: int = 2) -> List[Fraction]:
    """Exact list of c with (B^a)^^k * (B^b)^^m == (B^c)^^n, for n in {2, 3}.

    Raises UnsupportedShape when the left-hand exponent falls outside the
    shapes this solver decides completely.
    """
    a, b = as_rational(a), as_rational(b)
    if k < 2 or m < 2:
        raise DomainError("heights k and m must be >= 2")
    if n not in (2, 3):
        raise UnsupportedShape(f"exact gamma solving supports n in (2, 3), got {n}")
    lhs = _lhs_exponent(a, b, k, m, base)
    lhs_fe = _field_or_none(lhs)
    if lhs_fe is not None:
        parts = Decomposition(lhs_fe)
    elif depth(lhs) <= 1:
        raise UnsupportedShape("left exponent is too large to expand")
    elif depth(lhs) == 2:
        parts = decompose(lhs)
    else:
        raise UnsupportedShape(f"left exponent has depth {depth(lhs)}")
    classes = parts.nonzero_classes
    alg = parts.algebraic
    if not parts.exact:
        raise UnsupportedShape("left exponent has non-field inner exponents")

    if n == 2:
        # gamma^^2 has exponent c*B^c, an element of K
        if not classes:
            candidates = [Fraction(0)] if alg.is_zero() else recognize_monomial(alg)
        elif len(classes) == 1:
            candidates = []
        else:
            raise UnsupportedShape(f"{len(classes)} transcendental exponent classes")
    else:
        # gamma^^3 has exponent c*B^(c*B^c): in K for integer c, one
        # transcendental class with inner c*B^c otherwise
        if not classes:
            candidates = [Fraction(0)] if alg.is_zero() else _gamma3_integer_candidates(alg)
        elif len(classes) == 1 and alg.is_zero():
            cls = classes[0]
            shift = dict(cls.rep_field.sparse).get(0, Fraction(0))
            scale = _base_power_or_none(base, shift)
            candidates = [
                c for c in recognize_monomial(cls.rep_field - shift)
                if c.denominator != 1 and scale is not None and cls.coeff * scale == c
            ]
        elif len(classes) == 1:
            raise UnsupportedShape("algebraic part plus one transcendental class")
        else:
            raise UnsupportedShape(f"{len(classes)} transcendental exponent classes")

    confirmed = []
    for c in candidates:
        if decide_zero(lhs - tower(atom(base, c), n).exponent).outcome is Outcome.EQUAL:
            confirmed.append(c)
    return sorted(confirmed)


def is_trivial_solution(a, b, c, k: int, m: int, n: int) -> bool:
    """alpha = 1 with beta^^m = gamma^^n literally, or symmetrically.

    "Literally" means same atom and same height, except that 1^^h = 1 for
    every h, so the all-ones triple is trivial at any heights.
    """
    a, b, c = as_rational(a), as_rational(b), as_rational(c)
    if a == 0 and b == c and (m == n or b == 0):
        return True
    return b == 0 and a == c and (k == n or a == 0)


def verify_equation(lhs: PowNum, rhs: PowNum, max_bits: int = DEFAULT_MAX_BITS) -> Verdict:
    """Decide lhs == rhs for two PowNums over one base, with a reduction trace."""
    le, re_ = lhs.exponent, rhs.exponent
    trace = f"lhs exponent {format_expsum(le, short=True)}; rhs exponent {format_expsum(re_, short=True)}"
    fl, fr = _field_or_none(le), _field_or_none(re_)
    if fl is not None and fr is not None:
        ml, mr = monomial_decompose(fl), monomial_decompose(fr)
        if ml is not None and mr is not None and fl == fr:
            return Verdict(Outcome.EQUAL, Method.MONOMIAL_NORMAL_FORM,
                           f"both sides reduce to the same monomial exponent; {trace}")
    v = decide_zero(le - re_, max_bits)
    return Verdict(v.outcome, v.method, f"{v.detail}; {trace}")


def verify_instance(inst: EquationInstance, max_bits: int = DEFAULT_MAX_BITS) -> Verdict:
    lhs, rhs = inst.sides()
    return verify_equation(lhs, rhs, max_bits)
