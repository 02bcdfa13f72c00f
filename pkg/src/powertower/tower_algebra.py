"""Symbolic exponents of a fixed prime base and right-associated power towers.

Every value is kept as ``B**E`` where ``E`` is an :class:`ExpSum`: a rational
constant plus a sum of chains ``q * B**inner`` whose inners are again
ExpSums.  Products of values add exponents, and a tower level multiplies the
atom's exponent by ``B**(previous exponent)``, so the family B^(rational) is
closed under both operations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from .errors import BaseMismatch, DepthError, DomainError, MagnitudeError, PromotionError
from .exact_core import FOLD_LIMIT, FieldElement, as_rational, check_base, fe_theta_power, format_rational, lcm


@dataclass(frozen=True)
class ExpChain:
    """The term ``coeff * B**inner``."""

    coeff: Fraction
    inner: "ExpSum"


@dataclass(frozen=True)
class ExpSum:
    """``constant + sum(chain.coeff * B**chain.inner)`` for one base B.

    Build values through :func:`const`, :func:`chain` and the arithmetic
    operators; they return canonical forms.  The raw constructor does not
    canonicalize.
    """

    base: int
    constant: Fraction = Fraction(0)
    chains: Tuple[ExpChain, ...] = ()

    @property
    def is_rational(self) -> bool:
        return not self.chains

    @property
    def is_zero(self) -> bool:
        return not self.chains and self.constant == 0

    def _lift(self, other) -> "ExpSum":
        if isinstance(other, ExpSum):
            if other.base != self.base:
                raise BaseMismatch(f"exponents over bases {self.base} and {other.base}")
            return other
        return ExpSum(self.base, as_rational(other))

    def __add__(self, other) -> "ExpSum":
        other = self._lift(other)
        return canonicalize(ExpSum(self.base, self.constant + other.constant, self.chains + other.chains))

    __radd__ = __add__

    def __neg__(self) -> "ExpSum":
        return self.scale(-1)

    def __sub__(self, other) -> "ExpSum":
        return self + (-self._lift(other))

    def scale(self, q) -> "ExpSum":
        q = as_rational(q)
        if q == 0:
            return ExpSum(self.base)
        return ExpSum(self.base, self.constant * q, tuple(ExpChain(c.coeff * q, c.inner) for c in self.chains))

    def times_power(self, exponent: "ExpSum") -> "ExpSum":
        """``self * B**exponent``, distributed over the terms."""
        exponent = self._lift(exponent)
        chains = []
        if self.constant:
            chains.append(ExpChain(self.constant, exponent))
        for c in self.chains:
            chains.append(ExpChain(c.coeff, c.inner + exponent))
        return canonicalize(ExpSum(self.base, Fraction(0), tuple(chains)))

    def __repr__(self):
        return f"ExpSum[{self.base}]({format_expsum(self)})"


def const(base: int, q) -> ExpSum:
    return ExpSum(check_base(base), as_rational(q))


def chain(base: int, coeff, inner) -> ExpSum:
    """Canonical ExpSum of the single term ``coeff * B**inner``."""
    if not isinstance(inner, ExpSum):
        inner = const(base, inner)
    return canonicalize(ExpSum(check_base(base), Fraction(0), (ExpChain(as_rational(coeff), inner),)))


def depth(e: ExpSum) -> int:
    """0 for rationals, 1 for field elements of some K_N, more when nested."""
    if not e.chains:
        return 0
    return 1 + max(depth(c.inner) for c in e.chains)


def sort_key(e: ExpSum):
    return (depth(e), e.constant, tuple(_chain_key(c) for c in e.chains))


def _chain_key(c: ExpChain):
    return (sort_key(c.inner), c.coeff)


def fold_integer_power(coeff: Fraction, z: int, base: int) -> Fraction:
    if abs(z) > FOLD_LIMIT:
        raise MagnitudeError(f"integer exponent with {abs(z).bit_length()} bits exceeds fold limit {FOLD_LIMIT}")
    return coeff * Fraction(base) ** z


def is_huge_integer(e: ExpSum) -> bool:
    """True for an integer constant too large to expand as ``B**e``."""
    return e.is_rational and e.constant.denominator == 1 and abs(e.constant) > FOLD_LIMIT


def canonicalize(e: ExpSum) -> ExpSum:
    """Canonical inners, integer inners folded, like chains merged and sorted.

    Idempotent.  A chain ``q*B**z`` whose inner is an integer becomes the
    rational ``q*B**z``; a non-integer rational inner stays a chain because
    ``B**inner`` is irrational there.  Integers beyond ``FOLD_LIMIT`` are
    left unfolded (the explicit rational would have over a million bits).
    """
    base = e.base
    constant = e.constant
    merged: Dict[ExpSum, Fraction] = {}
    for c in e.chains:
        if c.coeff == 0:
            continue
        inner = canonicalize(c.inner)
        if inner.is_rational and inner.constant.denominator == 1 and not is_huge_integer(inner):
            constant += fold_integer_power(c.coeff, inner.constant.numerator, base)
            continue
        merged[inner] = merged.get(inner, Fraction(0)) + c.coeff
    chains = [ExpChain(q, inner) for inner, q in merged.items() if q != 0]
    chains.sort(key=_chain_key)
    return ExpSum(base, constant, tuple(chains))


@dataclass(frozen=True)
class PowNum:
    """The positive real ``base ** exponent``."""

    base: int
    exponent: ExpSum

    def __post_init__(self):
        check_base(self.base)
        if self.exponent.base != self.base:
            raise BaseMismatch(f"exponent over base {self.exponent.base} for value over {self.base}")

    @property
    def is_one(self) -> bool:
        return self.exponent.is_zero

    def __mul__(self, other: "PowNum") -> "PowNum":
        return mul(self, other)

    def __pow__(self, other: "PowNum") -> "PowNum":
        return power(self, other)

    def __repr__(self):
        return f"PowNum({format_pownum(self)})"


def atom(base: int, q) -> PowNum:
    """The number ``base ** q`` for a rational q."""
    return PowNum(check_base(base), const(base, q))


def one(base: int) -> PowNum:
    return atom(base, 0)


def power(x: PowNum, y: PowNum, scale=1) -> PowNum:
    """``x ** (scale * y)``: exponent E_x * scale * B**E_y."""
    if x.base != y.base:
        raise BaseMismatch(f"cannot raise base-{x.base} value to base-{y.base} value")
    return PowNum(x.base, x.exponent.scale(scale).times_power(y.exponent))


def tower(x: PowNum, h: int) -> PowNum:
    """Right-associated tower ``x^(x^(...^x))`` with h copies of x."""
    if not isinstance(h, int) or h < 1:
        raise DomainError(f"tower height must be a positive integer, got {h!r}")
    ex = x.exponent
    e = ex
    for _ in range(h - 1):
        e = ex.times_power(e)
    return PowNum(x.base, e)


def left_tower(x: PowNum, h: int) -> PowNum:
    """Left-associated ``((x^x)^x)...`` -- only for contrast with :func:`tower`."""
    if h < 1:
        raise DomainError(f"tower height must be a positive integer, got {h!r}")
    e = x.exponent
    for _ in range(h - 1):
        e = e.times_power(x.exponent)
    return PowNum(x.base, e)


def mul(x: PowNum, y: PowNum) -> PowNum:
    if x.base != y.base:
        raise BaseMismatch(f"cannot multiply base-{x.base} and base-{y.base} values")
    return PowNum(x.base, x.exponent + y.exponent)


def required_degree(e: ExpSum) -> int:
    """Smallest N with e in K_N (e must have depth <= 1)."""
    if depth(e) > 1:
        raise DepthError(f"exponent of depth {depth(e)} is not a field element")
    return lcm(*(c.inner.constant.denominator for c in e.chains))


def to_field_element(e: ExpSum, n: Optional[int] = None) -> FieldElement:
    """Exact element of K_N with the same real value as a depth <= 1 ExpSum."""
    need = required_degree(e)
    if n is None:
        n = need
    elif n % need:
        raise PromotionError(f"exponent needs degree divisible by {need}, got {n}")
    out = FieldElement.rational(e.base, e.constant, n)
    for c in e.chains:
        r = c.inner.constant
        out = out + fe_theta_power(r.numerator * (n // r.denominator), e.base, n).scale(c.coeff)
    return out


def from_field_element(x: FieldElement) -> ExpSum:
    """Inverse of :func:`to_field_element`."""
    constant = Fraction(0)
    chains = []
    for c, r in x.terms():
        if r == 0:
            constant = c
        else:
            chains.append(ExpChain(c, const(x.base, r)))
    return canonicalize(ExpSum(x.base, constant, tuple(chains)))


def equation_exponent(alpha: PowNum, beta: PowNum, gamma: PowNum, k: int, m: int, n: int) -> ExpSum:
    """log_B(alpha^^k * beta^^m) - log_B(gamma^^n); zero exactly when the equation holds."""
    for name, h in (("k", k), ("m", m), ("n", n)):
        if not isinstance(h, int) or h < 2:
            raise DomainError(f"height {name} must be an integer >= 2, got {h!r}")
    lhs = mul(tower(alpha, k), tower(beta, m))
    rhs = tower(gamma, n)
    if lhs.base != rhs.base:
        raise BaseMismatch("all three atoms must share one base")
    return lhs.exponent - rhs.exponent


# -- formatting -------------------------------------------------------------

# Rationals with a power-of-base factor this large are printed factored.
_FACTOR_MIN = 64


def _valuation(n: int, base: int) -> int:
    v = 0
    while n and n % base == 0:
        n //= base
        v += 1
    return v


def _exponent_literal(r: Fraction, base: int) -> str:
    """Text for a rational in exponent position, wrapped so it parses as one atom."""
    v = _valuation(r.numerator, base) - _valuation(r.denominator, base)
    if abs(v) >= _FACTOR_MIN:
        u = r / Fraction(base) ** v
        power = f"{base}^{v}" if v > 0 else f"{base}^({v})"
        return f"({power})" if u == 1 else f"({format_rational(u)}*{power})"
    if r.denominator == 1 and r >= 0:
        return format_rational(r)
    return f"({format_rational(r)})"


def format_pownum_exponent(e: ExpSum) -> str:
    """DSL text whose value is ``B**e``: a product of base powers, or ``1``."""
    factors = []
    if e.constant:
        factors.append(f"{e.base}^{_exponent_literal(e.constant, e.base)}")
    for c in e.chains:
        factors.append(f"{e.base}^({_format_scaled(c)})")
    return "*".join(factors) or "1"


def _format_scaled(c: ExpChain, short: bool = False) -> str:
    if short:
        body = "1" if c.inner.is_zero else f"{c.inner.base}^({format_expsum(c.inner, short=True)})"
        return body if c.coeff == 1 else f"{_short_rational(c.coeff)}*{body}"
    body = format_pownum_exponent(c.inner)
    if c.coeff == 1:
        return body
    return f"{format_rational(c.coeff)}*{body}"


def format_pownum(x: PowNum) -> str:
    return format_pownum_exponent(x.exponent)


_SHORT_BITS = 128


def _short_rational(r: Fraction) -> str:
    if max(r.numerator.bit_length(), r.denominator.bit_length()) <= _SHORT_BITS:
        return format_rational(r)
    log2 = abs(r.numerator).bit_length() - r.denominator.bit_length()
    return f"{'-' if r < 0 else ''}~2^{log2}"


def format_expsum(e: ExpSum, short: bool = False) -> str:
    """Readable text for the exponent value itself, e.g. ``-1*2^(-1/2)``.

    ``short`` abbreviates rationals over 128 bits as ``~2^k`` (for traces).
    """
    fmt = _short_rational if short else format_rational
    terms = []
    if e.constant or not e.chains:
        terms.append(fmt(e.constant))
    terms.extend(_format_scaled(c, short) for c in e.chains)
    return " + ".join(terms)
