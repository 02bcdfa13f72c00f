"""Text DSL for tower expressions and equations.

Grammar::

    equation := product ('=' product)?
    product  := expr ('*' expr)*
    expr     := atom '^^' nat | atom ('^' expr)?
    atom     := rational | '(' product ')'
    rational := int ('/' int)?          int may carry a leading '-'

``^`` is right-associative and binds tighter than ``*``: ``2^2^3`` is
``2^(2^3) = 2^8``.  Radicals are written as fractional exponents, so
``1/sqrt(2)`` is ``2^(-1/2)``.

Base positions must lower to positive integer powers of the configured
base.  Exponent positions may be any rational multiple of such a power,
e.g. ``2^(-1*2^(-1/2))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from .equality_engine import EquationInstance
from .errors import AtomNotPowerOfBase, HeightError, LoweringError, ParseError
from .exact_core import check_base, format_rational, str_to_int
from .tower_algebra import ExpSum, PowNum, const, format_pownum, mul, power, tower


@dataclass(frozen=True)
class RationalLiteral:
    value: Fraction


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Tower:
    base: "Node"
    height: int


@dataclass(frozen=True)
class Product:
    factors: Tuple["Node", ...]


@dataclass(frozen=True)
class Equation:
    lhs: "Node"
    rhs: "Node"


Node = Union[RationalLiteral, Power, Tower, Product, Equation]


@dataclass(frozen=True)
class PowEquation:
    """An equation between two arbitrary PowNums (not in instance shape)."""

    lhs: PowNum
    rhs: PowNum


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<op>\^\^|[\^*/=()])|(?P<bad>\S))")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'int', an operator string, or 'end'
    text: str
    line: int
    column: int


def _position(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def tokenize(text: str) -> List[_Token]:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group("bad") is not None:
            line, col = _position(text, m.start("bad"))
            raise ParseError(f"unexpected character {m.group('bad')!r}", line, col)
        kind = "int" if m.group("int") is not None else m.group("op")
        start = m.start("int") if kind == "int" else m.start("op")
        line, col = _position(text, start)
        tokens.append(_Token(kind, m.group(kind if kind == "int" else "op"), line, col))
        pos = m.end()
    line, col = _position(text, len(text.rstrip()))
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Optional[_Token] = None, cls=ParseError):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        return cls(f"{message}, found {found}", tok.line, tok.column)

    def accept(self, kind: str) -> Optional[_Token]:
        if self.tok.kind == kind:
            tok = self.tok
            self.i += 1
            return tok
        return None

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.accept(kind)
        if tok is None:
            raise self.error(f"expected {what}")
        return tok

    def equation(self) -> Node:
        lhs = self.product()
        if self.accept("="):
            rhs = self.product()
            node = Equation(lhs, rhs)
        else:
            node = lhs
        if self.tok.kind != "end":
            raise self.error("expected end of input")
        return node

    def product(self) -> Node:
        factors = [self.expr()]
        while self.accept("*"):
            factors.append(self.expr())
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def expr(self) -> Node:
        base = self.atom()
        if self.accept("^^"):
            tok = self.tok
            if tok.kind == "int":
                self.i += 1
                height = int(tok.text)
                if height < 1 or (self.tok.kind == "/"):
                    raise self.error("tower height must be a natural number >= 1", tok, HeightError)
                return Tower(base, height)
            if tok.kind == "(":
                raise self.error("tower height must be a literal natural number", tok, HeightError)
            raise self.error("expected tower height after '^^'")
        if self.accept("^"):
            return Power(base, self.expr())
        return base

    def atom(self) -> Node:
        if self.accept("("):
            inner = self.product()
            self.expect(")", "')'")
            return inner
        tok = self.accept("int")
        if tok is None:
            raise self.error("expected a number or '('")
        value = Fraction(str_to_int(tok.text))
        if self.accept("/"):
            den_tok = self.expect("int", "denominator")
            den = str_to_int(den_tok.text)
            if den <= 0:
                raise self.error("denominator must be a positive integer", den_tok)
            value = Fraction(str_to_int(tok.text), den)
        return RationalLiteral(value)


def parse(text: str) -> Node:
    """Parse DSL text into a syntax tree (base-independent)."""
    return _Parser(text).equation()


# -- lowering -----------------------------------------------------------------


def power_of_base(r: Fraction, base: int) -> Optional[int]:
    """z with r == base**z, or None."""
    if r <= 0:
        return None
    num, den = r.numerator, r.denominator
    if den == 1:
        top, sign = num, 1
    elif num == 1:
        top, sign = den, -1
    else:
        return None
    z = 0
    while top % base == 0:
        top //= base
        z += 1
    return sign * z if top == 1 else None


def _value(node: Node, base: int) -> Tuple[Fraction, ExpSum]:
    """(r, E) with the node's real value equal to r * B**E."""
    if isinstance(node, RationalLiteral):
        return node.value, const(base, 0)
    if isinstance(node, Power):
        b = _as_pownum(node.base, base)
        r, e = _value(node.exponent, base)
        return Fraction(1), power(b, PowNum(base, e), r).exponent
    if isinstance(node, Tower):
        return Fraction(1), tower(_as_pownum(node.base, base), node.height).exponent
    if isinstance(node, Product):
        r, e = Fraction(1), const(base, 0)
        for f in node.factors:
            fr, fe = _value(f, base)
            r, e = r * fr, e + fe
        return r, e
    raise LoweringError(f"cannot lower {type(node).__name__} as a value")


def _as_pownum(node: Node, base: int) -> PowNum:
    r, e = _value(node, base)
    z = power_of_base(r, base)
    if z is None:
        raise AtomNotPowerOfBase(format_rational(r), base)
    return PowNum(base, e + z)


def _instance_side(node: Node, base: int):
    """(exponent, height) pairs for a product of towers over rational atoms."""
    factors = node.factors if isinstance(node, Product) else (node,)
    out = []
    for f in factors:
        if not isinstance(f, Tower) or f.height < 2:
            return None
        atom = _as_pownum(f.base, base)
        if not atom.exponent.is_rational:
            return None
        out.append((atom.exponent.constant, f.height))
    return out


def lower(tree: Node, base: int = 2) -> Union[PowNum, EquationInstance, PowEquation]:
    """Lower a syntax tree over the given prime base.

    Equations of the form ``x^^k * y^^m = z^^n`` (heights >= 2, atoms
    rational powers of the base) become an :class:`EquationInstance`; other
    equations become a :class:`PowEquation`.
    """
    check_base(base)
    if isinstance(tree, Equation):
        lhs, rhs = _instance_side(tree.lhs, base), _instance_side(tree.rhs, base)
        if lhs is not None and rhs is not None and len(lhs) == 2 and len(rhs) == 1:
            (a, k), (b, m), (c, n) = lhs[0], lhs[1], rhs[0]
            return EquationInstance(base, a, b, c, k, m, n)
        return PowEquation(_as_pownum(tree.lhs, base), _as_pownum(tree.rhs, base))
    return _as_pownum(tree, base)


def parse_value(text: str, base: int = 2) -> PowNum:
    out = lower(parse(text), base)
    if not isinstance(out, PowNum):
        raise LoweringError("expected an expression, got an equation")
    return out


def print_canonical(x: PowNum) -> str:
    """DSL text that parses and lowers back to exactly ``x``."""
    return format_pownum(x)
