"""Exact rational arithmetic and arithmetic in the radical field Q(B^(1/N)).

Elements of ``K_N = Q(theta)``, ``theta = B**(1/N)``, are stored as the
coefficient vector of ``1, theta, ..., theta**(N-1)``.  For a prime base the
polynomial ``x**N - B`` is Eisenstein at ``B`` and therefore irreducible, so
the coordinates are unique and coordinate equality is real-number equality.
"""

from __future__ import annotations

import math
import operator
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple, Union

from .errors import ArityError, BaseNotSupported, MagnitudeError, PromotionError

Rational = Fraction
RationalLike = Union[Fraction, int]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a reduced Fraction.

    Floats are rejected: they would silently introduce binary rounding.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        num, _, den = x.strip().partition("/")
        if den:
            return Fraction(str_to_int(num), str_to_int(den))
        return Fraction(str_to_int(num))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def int_to_str(n: int) -> str:
    """Decimal text of any int, bypassing the interpreter's digit limit."""
    if n < 0:
        return "-" + int_to_str(-n)
    if n.bit_length() <= 8000:
        return str(n)
    k = n.bit_length() * 3 // 20  # about half the decimal digits
    hi, lo = divmod(n, 10 ** k)
    return int_to_str(hi) + int_to_str(lo).rjust(k, "0")


def str_to_int(text: str) -> int:
    """Inverse of :func:`int_to_str` for an optionally signed digit string."""
    text = text.strip()
    if text[:1] in "+-":
        sign, text = (-1 if text[0] == "-" else 1), text[1:]
    else:
        sign = 1
    if len(text) <= 2000:
        return sign * int(text)
    k = len(text) // 2
    return sign * (str_to_int(text[:-k]) * 10 ** k + str_to_int(text[-k:]))


def format_rational(x: Fraction) -> str:
    """Locale-independent ``"p/q"`` (or ``"p"`` for integers)."""
    x = as_rational(x)
    if x.denominator == 1:
        return int_to_str(x.numerator)
    return f"{int_to_str(x.numerator)}/{int_to_str(x.denominator)}"


_RATIONAL_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def rational_arith(op: str, x, y=None):
    """Dispatch a named rational operation.

    ``cmp`` returns -1, 0 or 1.  ``div`` by zero raises ZeroDivisionError.
    """
    x = as_rational(x)
    if op == "neg":
        return -x
    if op == "pow_int":
        if not isinstance(y, int):
            raise TypeError("pow_int needs an integer exponent")
        return x ** y
    y = as_rational(y)
    if op == "cmp":
        return (x > y) - (x < y)
    if op == "div" and y == 0:
        raise ZeroDivisionError(f"division of {x} by zero")
    try:
        return _RATIONAL_OPS[op](x, y)
    except KeyError:
        raise ValueError(f"unknown rational operation {op!r}") from None


@lru_cache(maxsize=256)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def check_base(base: int) -> int:
    if not isinstance(base, int) or isinstance(base, bool) or not is_prime(base):
        raise BaseNotSupported(f"base must be a prime integer, got {base!r}")
    return base


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


# Exponents of B beyond this are never expanded into explicit rationals.
FOLD_LIMIT = 2 ** 20


def _big_power(base: int, z: int) -> Fraction:
    if abs(z) > FOLD_LIMIT:
        raise MagnitudeError(f"power of {base} with a {abs(z).bit_length()}-bit exponent exceeds fold limit {FOLD_LIMIT}")
    return Fraction(base) ** z


class FieldElement:
    """An element of Q(B^(1/N)) with exact rational coordinates.

    Storage is sparse (only nonzero coordinates), so elements of very large
    degree such as K_(2^18) stay cheap as long as they have few terms.
    Arithmetic operators promote both operands to the lcm of their degrees,
    so elements of different degrees (same base) interoperate freely.
    """

    __slots__ = ("base", "degree", "_terms")

    def __init__(self, base: int, degree: int, coords: Sequence[RationalLike] = None, *, terms=None):
        check_base(base)
        if not isinstance(degree, int) or isinstance(degree, bool) or degree < 1:
            raise ArityError(f"degree must be a positive integer, got {degree!r}")
        if terms is None:
            coords = tuple(coords)
            if len(coords) != degree:
                raise ArityError(f"expected {degree} coordinates, got {len(coords)}")
            items = {}
            for i, c in enumerate(coords):
                c = as_rational(c)
                if c:
                    items[i] = c
        else:
            items = {}
            for i, c in (terms.items() if isinstance(terms, dict) else terms):
                if not 0 <= i < degree:
                    raise ArityError(f"coordinate index {i} outside degree {degree}")
                c = as_rational(c)
                if c:
                    items[i] = c
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_terms", tuple(sorted(items.items())))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (_rebuild, (self.base, self.degree, self._terms))

    # -- constructors -----------------------------------------------------

    @classmethod
    def rational(cls, base: int, value, degree: int = 1) -> "FieldElement":
        return cls(base, degree, terms=((0, as_rational(value)),))

    @classmethod
    def zero(cls, base: int, degree: int = 1) -> "FieldElement":
        return cls(base, degree, terms=())

    # -- structure ----------------------------------------------------------

    @property
    def coords(self) -> Tuple[Fraction, ...]:
        """Dense coordinate vector of ``1, theta, ..., theta**(N-1)``."""
        out = [Fraction(0)] * self.degree
        for i, c in self._terms:
            out[i] = c
        return tuple(out)

    @property
    def sparse(self) -> Tuple[Tuple[int, Fraction], ...]:
        """Nonzero coordinates as sorted ``(index, value)`` pairs."""
        return self._terms

    def promote(self, new_degree: int) -> "FieldElement":
        return fe_promote(self, new_degree)

    def reduced(self) -> "FieldElement":
        """The same number expressed in the smallest subfield K_d holding it."""
        n = self.degree
        step = n
        for i, _ in self._terms:
            step = math.gcd(step, i)
        return FieldElement(self.base, n // step, terms=((i // step, c) for i, c in self._terms))

    def is_zero(self) -> bool:
        return not self._terms

    def as_rational(self) -> Optional[Fraction]:
        return fe_is_rational(self)

    def monomial(self) -> Optional[Tuple[int, Fraction]]:
        return monomial_decompose(self)

    def terms(self) -> Iterable[Tuple[Fraction, Fraction]]:
        """Pairs (coefficient, exponent) with value = sum coefficient*B^exponent."""
        for i, c in self._terms:
            yield c, Fraction(i, self.degree)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.base != self.base:
                raise PromotionError(
                    f"cannot combine elements over bases {self.base} and {other.base}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return FieldElement.rational(self.base, other, self.degree)
        return NotImplemented

    def _common(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented, NotImplemented
        n = lcm(self.degree, other.degree)
        return self.promote(n), other.promote(n)

    def _combine(self, other, sign: int):
        x, y = self._common(other)
        if x is NotImplemented:
            return NotImplemented
        out = dict(x._terms)
        for i, c in y._terms:
            out[i] = out.get(i, 0) + sign * c
        return FieldElement(x.base, x.degree, terms=out)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.base, self.degree, terms=((i, -c) for i, c in self._terms))

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        x, y = self._common(other)
        if x is NotImplemented:
            return NotImplemented
        n, b = x.degree, x.base
        out = {}
        for i, a in x._terms:
            for j, c in y._terms:
                k = i + j
                if k >= n:
                    out[k - n] = out.get(k - n, 0) + a * c * b
                else:
                    out[k] = out.get(k, 0) + a * c
        return FieldElement(b, n, terms=out)

    __rmul__ = __mul__

    def scale(self, q) -> "FieldElement":
        q = as_rational(q)
        return FieldElement(self.base, self.degree, terms=((i, q * c) for i, c in self._terms))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            r = fe_is_rational(self)
            return r is not None and r == other
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.base != self.base:
            return False
        x, y = self._common(other)
        return x._terms == y._terms

    def __hash__(self):
        r = self.reduced()
        if r.degree == 1:
            return hash(r._terms[0][1] if r._terms else Fraction(0))
        return hash((r.base, r.degree, r._terms))

    def __float__(self):
        return float(sum((float(c) * self.base ** float(e) for c, e in self.terms()), 0.0))

    def __repr__(self):
        terms = []
        for c, e in self.terms():
            if e == 0:
                terms.append(format_rational(c))
            else:
                terms.append(f"{format_rational(c)}*{self.base}^({format_rational(e)})")
        return f"FieldElement({' + '.join(terms) or '0'})"


def _rebuild(base, degree, terms):
    return FieldElement(base, degree, terms=terms)


def fe_make(base: int, degree: int, coords: Sequence[RationalLike]) -> FieldElement:
    return FieldElement(base, degree, tuple(coords))


def fe_arith(op: str, x: FieldElement, y):
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "scalar_mul":
        return x.scale(y)
    if op == "eq":
        return x == y
    raise ValueError(f"unknown field operation {op!r}")


def fe_promote(x: FieldElement, new_degree: int) -> FieldElement:
    """Embed K_N into K_N' (N | N') via theta_N = theta_N'^(N'/N)."""
    if not isinstance(new_degree, int) or new_degree < 1 or new_degree % x.degree:
        raise PromotionError(f"cannot promote degree {x.degree} to {new_degree}")
    if new_degree == x.degree:
        return x
    step = new_degree // x.degree
    return FieldElement(x.base, new_degree, terms=((i * step, c) for i, c in x.sparse))


def fe_theta_power(p: int, base: int, degree: int) -> FieldElement:
    """theta**p reduced by theta**N = B (negative p allowed).

    Raises MagnitudeError when the rational factor B**(p // N) is too large
    to expand.
    """
    q, r = divmod(p, degree)
    return FieldElement(base, degree, terms=((r, _big_power(base, q)),))


def base_power(base: int, exponent) -> FieldElement:
    """B**exponent for a rational exponent, in K_(denominator)."""
    e = as_rational(exponent)
    return fe_theta_power(e.numerator, base, e.denominator)


def fe_is_rational(x: FieldElement) -> Optional[Fraction]:
    t = x.sparse
    if not t:
        return Fraction(0)
    if len(t) == 1 and t[0][0] == 0:
        return t[0][1]
    return None


def monomial_decompose(x: FieldElement) -> Optional[Tuple[int, Fraction]]:
    """(j, u) with x = u*theta^j when exactly one coordinate is nonzero."""
    t = x.sparse
    if len(t) != 1:
        return None
    return t[0]
