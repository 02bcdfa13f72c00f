"""Rigorous interval evaluation of exponent sums and powers of the base.

Endpoints are dyadic rationals (``Fraction`` with a power-of-two
denominator) rounded outward to ``bits`` significant bits after every
operation.  Transcendental steps (``ln B`` and ``exp``) use fixed-point
integer series with explicit tail bounds, so the true value is always
contained in the returned interval.  Intervals can refute an equality but
never prove one.
"""

from __future__ import annotations

import decimal
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import MagnitudeError
from .exact_core import FieldElement, as_rational

DEFAULT_MAGNITUDE_CAP = 2 ** 20
GUARD_BITS = 24
MIN_BITS = 16


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic with ``bits`` significant bits that is <= x."""
    if x == 0:
        return Fraction(0)
    n, d = x.numerator, x.denominator
    if d & (d - 1) == 0 and abs(n).bit_length() <= bits:
        return x
    shift = bits - 1 - (abs(n).bit_length() - d.bit_length())
    if shift >= 0:
        m = (n << shift) // d
        return Fraction(m, 1 << shift)
    m = n // (d << -shift)
    return Fraction(m << -shift)


def round_up(x: Fraction, bits: int) -> Fraction:
    return -round_down(-x, bits)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    precision: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x, bits: int) -> "Interval":
        x = as_rational(x)
        return cls(round_down(x, bits), round_up(x, bits), bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= as_rational(x) <= self.hi

    __contains__ = contains

    def excludes_zero(self) -> bool:
        return self.lo > 0 or self.hi < 0

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __add__(self, other: "Interval") -> "Interval":
        p = min(self.precision, other.precision)
        return Interval(round_down(self.lo + other.lo, p), round_up(self.hi + other.hi, p), p)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def __mul__(self, other: "Interval") -> "Interval":
        p = min(self.precision, other.precision)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(round_down(min(products), p), round_up(max(products), p), p)

    def scale(self, q) -> "Interval":
        """Multiply by an exact rational (no rounding of q itself)."""
        q = as_rational(q)
        a, b = self.lo * q, self.hi * q
        if q < 0:
            a, b = b, a
        p = self.precision
        return Interval(round_down(a, p), round_up(b, p), p)

    def to_decimal(self, digits: int = None) -> tuple:
        """Outward-rounded decimal strings (lo, hi)."""
        if digits is None:
            digits = max(6, int(self.precision * math.log10(2)) + 1)
        out = []
        for value, rounding in ((self.lo, decimal.ROUND_FLOOR), (self.hi, decimal.ROUND_CEILING)):
            ctx = decimal.Context(prec=digits, rounding=rounding, Emax=decimal.MAX_EMAX, Emin=decimal.MIN_EMIN)
            d = ctx.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
            out.append(_format_decimal(d))
        return tuple(out)

    def __repr__(self):
        lo, hi = self.to_decimal(12)
        return f"Interval([{lo}, {hi}], {self.precision} bits)"


def _format_decimal(d: decimal.Decimal) -> str:
    exponent = d.adjusted()
    if -6 <= exponent <= 40:
        text = format(d, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    return format(d, "e")


# ---------------------------------------------------------------------------
# fixed-point series


def _atanh_inv_bounds(p: int, q: int, w: int) -> tuple:
    """Integer bounds (lo, hi) on atanh(p/q) * 2**w for 0 <= p/q <= 1/3."""
    if p == 0:
        return 0, 0
    pp, qq = p * p, q * q
    lo = 0
    term = (p << w) // q
    k = 1
    while term:
        lo += term // k
        term = term * pp // qq
        k += 2
    hi = 0
    term = -((-p << w) // q)
    k = 1
    while term > 1:
        hi += -(-term // k)
        term = -((-term * pp) // qq)
        k += 2
    # tail <= term / (1 - x^2) <= 9/8 * term for x <= 1/3
    hi += 2 * term + 1
    return lo, hi


@lru_cache(maxsize=None)
def ln_base_bounds(base: int, w: int) -> tuple:
    """Integer bounds (lo, hi) with lo <= ln(base) * 2**w <= hi.

    Splits base = 2**s * m with 1 <= m < 2 and uses
    ln 2 = 2 atanh(1/3), ln m = 2 atanh((m-1)/(m+1)).  lru_cache makes
    concurrent first use safe: a race only repeats identical work.
    """
    s = base.bit_length() - 1
    two_s = 1 << s
    l2_lo, l2_hi = _atanh_inv_bounds(1, 3, w)
    lm_lo, lm_hi = _atanh_inv_bounds(base - two_s, base + two_s, w)
    return 2 * (s * l2_lo + lm_lo), 2 * (s * l2_hi + lm_hi)


def _exp_fixed(y: int, w: int, upward: bool) -> int:
    """Bound on exp(y / 2**w) * 2**w for 0 <= y; floor sum or ceil sum + tail."""
    one = 1 << w
    total = 0
    term = one
    k = 0
    if not upward:
        while term:
            total += term
            k += 1
            term = term * y // (k << w)
        return total
    ratio_limit = 2 * y  # need y/(k+1) <= 1/2 before truncating
    while True:
        total += term
        k += 1
        term = -((-term * y) // (k << w))
        if term <= 1 and (k << w) > ratio_limit:
            return total + 2 * term + 1


def _pow_bound(t: Fraction, base: int, bits: int, upward: bool, cap: int) -> Fraction:
    z = math.floor(t)
    f = t - z
    if z > cap:
        raise MagnitudeError(f"value exceeds {base}^{cap}: exponent has {z.bit_length()} bits")
    if z < -cap:
        # 0 < B^t < 2^(-cap)
        return Fraction(1, 1 << cap) if upward else Fraction(0)
    scale = Fraction(base) ** z
    if f == 0:
        exact = scale
    else:
        w = bits + GUARD_BITS
        l_lo, l_hi = ln_base_bounds(base, w)
        if upward:
            y = -((-f.numerator * l_hi) // f.denominator)
            exact = Fraction(_exp_fixed(y, w, True), 1 << w) * scale
        else:
            y = (f.numerator * l_lo) // f.denominator
            exact = Fraction(_exp_fixed(y, w, False), 1 << w) * scale
    return round_up(exact, bits) if upward else round_down(exact, bits)


def eval_pow2(x: Union[Interval, Fraction, int], base: int, bits: int,
              cap: int = DEFAULT_MAGNITUDE_CAP) -> Interval:
    """Enclosure of base**x.  Monotone: x.lo maps to lo and x.hi to hi."""
    bits = max(bits, MIN_BITS)
    if not isinstance(x, Interval):
        x = Interval.point(x, bits)
    lo = _pow_bound(x.lo, base, bits, False, cap)
    hi = _pow_bound(x.hi, base, bits, True, cap)
    return Interval(lo, hi, bits)


def eval_expsum(e, bits: int, cap: int = DEFAULT_MAGNITUDE_CAP) -> Interval:
    """Enclosure of the real value of an ExpSum (the exponent itself, not B^e)."""
    bits = max(bits, MIN_BITS)
    acc = Interval.point(e.constant, bits)
    for chain in e.chains:
        inner = eval_expsum(chain.inner, bits, cap)
        acc = acc + eval_pow2(inner, e.base, bits, cap).scale(chain.coeff)
    return acc


def eval_pownum(x, bits: int, cap: int = DEFAULT_MAGNITUDE_CAP) -> Interval:
    """Enclosure of the positive real B^(exponent)."""
    bits = max(bits, MIN_BITS)
    return eval_pow2(eval_expsum(x.exponent, bits, cap), x.base, bits, cap)


def eval_field_element(x: FieldElement, bits: int) -> Interval:
    bits = max(bits, MIN_BITS)
    acc = Interval.point(0, bits)
    for coeff, exponent in x.terms():
        acc = acc + eval_pow2(exponent, x.base, bits).scale(coeff)
    return acc


def _log2_rational_bounds(q: Fraction) -> tuple:
    """Integers (lo, hi) with lo < log2|q| < hi for q != 0."""
    n, d = abs(q.numerator).bit_length(), q.denominator.bit_length()
    return n - d - 1, n - d + 1


def log2_base_bounds(base: int, w: int = 64) -> tuple:
    """Rationals (lo, hi) enclosing log2(base)."""
    if base == 2:
        return Fraction(1), Fraction(1)
    b_lo, b_hi = ln_base_bounds(base, w)
    t_lo, t_hi = ln_base_bounds(2, w)
    return Fraction(b_lo, t_hi), Fraction(b_hi, t_lo)


def dominant_sign(e, bits: int = 64):
    """Sign of an ExpSum decided by one term outweighing all others, or None.

    Works in log2-magnitude space, so terms like ``q * B**(40 * B**40)``
    whose values are far beyond the interval cap still compare: if one term's
    magnitude provably exceeds ``count`` times every other term's, it fixes
    the sign.  Returns None when no single term dominates or an inner
    exponent cannot be enclosed.
    """
    l2_lo, l2_hi = log2_base_bounds(e.base)
    ranges = []
    if e.constant:
        lo, hi = _log2_rational_bounds(e.constant)
        ranges.append((Fraction(lo), Fraction(hi), e.constant))
    for chain in e.chains:
        try:
            inner = eval_expsum(chain.inner, bits)
        except MagnitudeError:
            return None
        lo, hi = _log2_rational_bounds(chain.coeff)
        scaled = [inner.lo * l2_lo, inner.lo * l2_hi, inner.hi * l2_lo, inner.hi * l2_hi]
        ranges.append((lo + min(scaled), hi + max(scaled), chain.coeff))
    if not ranges:
        return None
    top = max(range(len(ranges)), key=lambda i: ranges[i][0])
    others = [r[1] for i, r in enumerate(ranges) if i != top]
    if not others:
        return 1 if ranges[top][2] > 0 else -1
    if ranges[top][0] > max(others) + len(others).bit_length():
        return 1 if ranges[top][2] > 0 else -1
    return None


class Sign(enum.Enum):
    NEGATIVE = "Negative"
    POSITIVE = "Positive"
    UNDETERMINED = "Undetermined"


def precision_ladder(max_bits: int, start: int = 64):
    bits = min(start, max_bits)
    while True:
        yield bits
        if bits >= max_bits:
            return
        bits = min(2 * bits, max_bits)


def sign_of(e, max_bits: int = 256) -> Sign:
    """Sign of an ExpSum's value, escalating precision from 64 bits by doubling."""
    for bits in precision_ladder(max(max_bits, MIN_BITS)):
        try:
            iv = eval_expsum(e, bits)
        except MagnitudeError:
            sign = dominant_sign(e)
            if sign is None:
                return Sign.UNDETERMINED
            return Sign.POSITIVE if sign > 0 else Sign.NEGATIVE
        if iv.lo > 0:
            return Sign.POSITIVE
        if iv.hi < 0:
            return Sign.NEGATIVE
    return Sign.UNDETERMINED
