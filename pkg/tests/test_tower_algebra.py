from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from powertower.errors import BaseMismatch, DepthError, DomainError
from powertower.exact_core import fe_make
from powertower.tower_algebra import (
    ExpChain,
    ExpSum,
    atom,
    canonicalize,
    chain,
    const,
    depth,
    equation_exponent,
    left_tower,
    mul,
    one,
    power,
    to_field_element,
    tower,
)


def tower_value(q, h, dps=40):
    """Direct floating tower of 2^q, right-associated."""
    with mpmath.workdps(dps):
        x = mpmath.power(2, mpmath.mpf(q.numerator) / q.denominator)
        out = x
        for _ in range(h - 1):
            out = mpmath.power(x, out)
        return out


def exp_value(e: ExpSum, dps=40):
    with mpmath.workdps(dps):
        total = mpmath.mpf(e.constant.numerator) / e.constant.denominator
        for c in e.chains:
            total += mpmath.mpf(c.coeff.numerator) / c.coeff.denominator * mpmath.power(e.base, exp_value(c.inner, dps))
        return total


def test_atom_examples():
    assert atom(2, 2).exponent == const(2, 2)
    assert atom(2, 0).is_one
    assert atom(2, 0) == one(2)
    assert atom(2, F(-1, 2)).exponent.constant == F(-1, 2)


def test_tower_examples():
    assert tower(atom(2, 1), 3).exponent == const(2, 4)
    x = atom(2, F(1, 3))
    assert tower(x, 1) == x
    t = tower(atom(2, -1), 3)
    assert t.exponent == chain(2, -1, F(-1, 2))
    with pytest.raises(DomainError):
        tower(x, 0)


def test_mul_examples():
    half3 = tower(atom(2, -1), 3)
    assert mul(half3, half3).exponent == chain(2, -2, F(-1, 2))
    assert to_field_element(mul(half3, half3).exponent) == fe_make(2, 2, [0, -1])
    x = tower(atom(2, F(2, 3)), 3)
    assert mul(x, atom(2, 0)) == x
    assert mul(tower(atom(2, 1), 3), tower(atom(2, 1), 3)).exponent == const(2, 8)
    with pytest.raises(BaseMismatch):
        mul(atom(2, 1), atom(3, 1))


def test_canonicalize_examples():
    # chain(1, 1*B^1) folds to B^2 = 4
    raw = ExpSum(2, F(0), (ExpChain(F(1), ExpSum(2, F(0), (ExpChain(F(1), const(2, 1)),))),))
    assert canonicalize(raw) == const(2, 4)
    raw = ExpSum(2, F(0), (ExpChain(F(-2), ExpSum(2, F(0), (ExpChain(F(-2), const(2, -2)),))),))
    assert canonicalize(raw) == chain(2, -2, F(-1, 2))


def test_depth_examples():
    assert depth(const(2, 4)) == 0
    assert depth(chain(2, -1, F(-1, 2))) == 1
    assert depth(tower(atom(2, F(1, 3)), 4).exponent) == 3


def test_to_field_element_examples():
    assert to_field_element(chain(2, -2, F(-1, 2)), 2) == fe_make(2, 2, [0, -1])
    assert to_field_element(const(2, F(3, 4)), 1).coords == (F(3, 4),)
    assert to_field_element(chain(2, -1, F(-1, 2)) + chain(2, 1, F(-1, 2))).is_zero()
    with pytest.raises(DepthError):
        to_field_element(tower(atom(2, F(1, 3)), 3).exponent)


def test_equation_exponent_examples():
    two, four, half, quarter = atom(2, 1), atom(2, 2), atom(2, -1), atom(2, -2)
    assert equation_exponent(two, two, four, 3, 3, 2).is_zero
    assert equation_exponent(half, half, quarter, 3, 3, 3).is_zero
    assert equation_exponent(two, two, four, 2, 2, 2) == const(2, -4)
    with pytest.raises(DomainError):
        equation_exponent(two, two, four, 1, 2, 2)


def test_right_associativity_regression():
    # at height 3 both readings give 16; height 4 separates 2^(2^(2^2)) from ((2^2)^2)^2
    assert tower(atom(2, 1), 3).exponent == const(2, 4)
    assert left_tower(atom(2, 1), 3).exponent == const(2, 4)
    assert tower(atom(2, 1), 4).exponent == const(2, 16)
    assert left_tower(atom(2, 1), 4).exponent == const(2, 8)


def test_power_scale():
    # (2^(1/2))^(2^2) = 2^2
    assert power(atom(2, F(1, 2)), atom(2, 2)).exponent == const(2, 2)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=60, deadline=None)
@given(rationals, st.integers(1, 4))
def test_tower_matches_direct_evaluation(q, h):
    # 8^^4 and beyond is too large for the floating oracle itself
    assume(not (h == 4 and q > 2))
    x = tower(atom(2, q), h)
    want = tower_value(q, h)
    with mpmath.workdps(40):
        got = mpmath.power(2, exp_value(x.exponent))
        assert abs(got - want) <= mpmath.mpf(10) ** -25 * (1 + abs(want))


@st.composite
def expsums(draw, max_depth=2):
    if max_depth == 0 or draw(st.booleans()):
        return const(2, draw(rationals))
    terms = draw(st.lists(st.tuples(rationals, expsums(max_depth=max_depth - 1)), min_size=1, max_size=3))
    out = const(2, draw(rationals))
    for q, inner in terms:
        out = out + chain(2, q, inner)
    return out


@settings(max_examples=100, deadline=None)
@given(expsums())
def test_canonicalize_idempotent(e):
    assert canonicalize(e) == e
    assert canonicalize(canonicalize(e)) == e


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(rationals, expsums(max_depth=1)), min_size=1, max_size=4), st.randoms())
def test_canonical_form_ignores_term_order(terms, rnd):
    def build(seq):
        raw = ExpSum(2, F(0), tuple(ExpChain(q, inner) for q, inner in seq))
        return canonicalize(raw)

    shuffled = list(terms)
    rnd.shuffle(shuffled)
    assert build(terms) == build(shuffled)


@settings(max_examples=60, deadline=None)
@given(rationals, rationals, st.integers(1, 3), st.integers(1, 3))
def test_mul_commutes(a, b, h1, h2):
    x, y = tower(atom(2, a), h1), tower(atom(2, b), h2)
    assert mul(x, y) == mul(y, x)
