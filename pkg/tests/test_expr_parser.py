from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertower.equality_engine import EquationInstance, Outcome, verify_equation, verify_instance
from powertower.errors import AtomNotPowerOfBase, HeightError, LoweringError, ParseError
from powertower.expr_parser import (
    Equation,
    Power,
    PowEquation,
    Product,
    RationalLiteral,
    Tower,
    lower,
    parse,
    parse_value,
    print_canonical,
)
from powertower.tower_algebra import atom, chain, const, mul, power, tower

# the three identities, written with the same structure as the printed formulas
IDENTITY_TEXTS = {
    "a": "2^2^2 * 2^2^2 = 4^4",
    "b": "(1/2)^((1/2)^(1/2)) * (1/2)^((1/2)^(1/2)) = (1/4)^((1/4)^(1/4))",
    "c": "(2^(-1/2))^(2^(-1/2)) * (2^(-1/2))^(2^(-1/2)) = (1/2)^((1/2)^(1/2))",
}


def lit(p, q=1):
    return RationalLiteral(F(p, q))


def test_parse_examples():
    assert parse("2^^3 * 2^^3 = 4^^2") == Equation(Product((Tower(lit(2), 3), Tower(lit(2), 3))), Tower(lit(4), 2))
    half = lit(1, 2)
    assert parse("(1/2)^((1/2)^(1/2))") == Power(half, Power(half, half))
    with pytest.raises(ParseError) as err:
        parse("2^^")
    assert (err.value.line, err.value.column) == (1, 4)


def test_parse_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("2^^3 *\n  4 $ 2")
    assert (err.value.line, err.value.column) == (2, 5)
    with pytest.raises(HeightError):
        parse("2^^0")
    with pytest.raises(HeightError):
        parse("2^^(3)")
    with pytest.raises(HeightError):
        parse("2^^3/2")
    with pytest.raises(ParseError):
        parse("(2^3")
    with pytest.raises(ParseError):
        parse("1/0")


def test_lower_examples():
    assert parse_value("1/4") == atom(2, -2)
    with pytest.raises(AtomNotPowerOfBase) as err:
        parse_value("3")
    assert err.value.literal == "3"
    assert parse_value("2^(1/2)") == atom(2, F(1, 2))
    assert parse_value("9", base=3) == atom(3, 2)
    with pytest.raises(LoweringError):
        parse_value("2 = 2")


def test_lower_instance_shape():
    inst = lower(parse("2^^3 * 2^^3 = 4^^2"))
    assert inst == EquationInstance(2, 1, 1, 2, 3, 3, 2)
    assert isinstance(lower(parse("2^2^2 * 2^2^2 = 4^4")), PowEquation)


def test_print_canonical_examples():
    assert print_canonical(tower(atom(2, -1), 3)) == "2^(-1*2^(-1/2))"
    assert print_canonical(atom(2, 0)) == "1"
    half3 = tower(atom(2, -1), 3)
    text = print_canonical(mul(half3, half3))
    assert text == "2^(-2*2^(-1/2))"
    assert parse_value(text).exponent == chain(2, -2, F(-1, 2))


def test_right_associativity():
    assert parse_value("2^2^3") == atom(2, 8)
    assert parse_value("(2^2)^3") == atom(2, 6)


def test_exponent_position_literals_scale():
    # 2^(-1*2^(-1/2)) is 2 raised to -2^(-1/2)
    assert parse_value("2^(-1*2^(-1/2))").exponent == chain(2, -1, F(-1, 2))
    assert parse_value("2^(3/4)") == atom(2, F(3, 4))


@pytest.mark.parametrize("name", sorted(IDENTITY_TEXTS))
def test_identities_parse_and_verify(name):
    eq = lower(parse(IDENTITY_TEXTS[name]))
    v = verify_equation(eq.lhs, eq.rhs)
    assert v.outcome is Outcome.EQUAL and v.is_exact


@pytest.mark.parametrize("text", [
    "2^^3 * 2^^3 = 4^^2",
    "(1/2)^^3 * (1/2)^^3 = (1/4)^^3",
    "(2^(-1/2))^^2 * (2^(-1/2))^^2 = (1/2)^^3",
])
def test_identities_in_tower_notation(text):
    inst = lower(parse(text))
    assert isinstance(inst, EquationInstance)
    v = verify_instance(inst)
    assert v.outcome is Outcome.EQUAL and v.is_exact


def test_huge_values_round_trip():
    for h in (4, 5, 6):
        x = tower(atom(2, 1), h)
        assert parse_value(print_canonical(x)) == x
    x = tower(atom(2, 7), 3)
    assert parse_value(print_canonical(x)) == x


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def pownums(draw, max_depth=3):
    x = atom(2, draw(rationals))
    if max_depth == 0:
        return x
    kind = draw(st.sampled_from(["atom", "tower", "mul", "power"]))
    if kind == "tower":
        return tower(x, draw(st.integers(1, 3)))
    if kind == "mul":
        return mul(draw(pownums(max_depth=max_depth - 1)), draw(pownums(max_depth=max_depth - 1)))
    if kind == "power":
        return power(draw(pownums(max_depth=max_depth - 1)), draw(pownums(max_depth=max_depth - 1)))
    return x


@settings(max_examples=300, deadline=None)
@given(pownums())
def test_round_trip(x):
    text = print_canonical(x)
    assert parse_value(text) == x
    assert print_canonical(parse_value(text)) == text
