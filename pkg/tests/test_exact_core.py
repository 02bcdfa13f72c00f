from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powertower.errors import ArityError, BaseNotSupported, MagnitudeError, PromotionError
from powertower.exact_core import (
    FieldElement,
    as_rational,
    base_power,
    fe_arith,
    fe_is_rational,
    fe_make,
    fe_promote,
    fe_theta_power,
    format_rational,
    int_to_str,
    monomial_decompose,
    rational_arith,
    str_to_int,
)


def numeric(x: FieldElement, dps=50):
    with mpmath.workdps(dps):
        return sum(mpmath.mpf(c.numerator) / c.denominator * mpmath.power(x.base, mpmath.mpf(e.numerator) / e.denominator)
                   for c, e in x.terms())


def test_rational_arith_examples():
    assert rational_arith("add", F(1, 2), F(1, 2)) == 1
    assert rational_arith("mul", -1, F(1, 2)) == F(-1, 2)
    assert rational_arith("pow_int", 2, 3) == 8
    assert rational_arith("cmp", F(1, 3), F(1, 2)) == -1
    assert rational_arith("neg", F(2, 5)) == F(-2, 5)
    with pytest.raises(ZeroDivisionError):
        rational_arith("div", 1, 0)
    with pytest.raises(ValueError):
        rational_arith("bogus", 1, 1)


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("-3/6") == F(-1, 2)


def test_big_integer_text_round_trip():
    n = 3 ** 40000 - 7
    assert str_to_int(int_to_str(n)) == n
    assert str_to_int(int_to_str(-n)) == -n
    assert format_rational(F(1, 2 ** 20000)).startswith("1/")


def test_fe_make_examples():
    theta = fe_make(2, 2, [0, 1])
    assert float(theta) == pytest.approx(2 ** 0.5)
    assert fe_is_rational(fe_make(2, 1, [F(-1, 2)])) == F(-1, 2)
    assert float(fe_make(3, 2, [1, 1])) == pytest.approx(1 + 3 ** 0.5)


def test_fe_make_validation():
    with pytest.raises(BaseNotSupported):
        fe_make(4, 2, [0, 1])
    with pytest.raises(ArityError):
        fe_make(2, 2, [1])
    with pytest.raises(ArityError):
        fe_make(2, 0, [])


def test_fe_arith_examples():
    theta = fe_make(2, 2, [0, 1])
    assert fe_arith("mul", theta, theta).coords == (2, 0)
    minus_root2 = fe_arith("scalar_mul", fe_make(2, 2, [0, F(1, 2)]), -2)
    assert minus_root2 == fe_make(2, 2, [0, -1])
    assert fe_arith("add", fe_make(2, 2, [0, F(1, 2)]), fe_make(2, 2, [0, F(-1, 2)])).is_zero()
    assert fe_arith("eq", theta, theta)


def test_fe_promote_examples():
    root2 = fe_make(2, 2, [0, 1])
    assert fe_promote(root2, 4).coords == (0, 0, 1, 0)
    assert fe_promote(FieldElement.rational(2, 3), 2).coords == (3, 0)
    assert fe_promote(root2, 2) is root2
    with pytest.raises(PromotionError):
        fe_promote(root2, 3)


def test_fe_theta_power_examples():
    theta = fe_make(2, 2, [0, 1])
    inv = fe_theta_power(-1, 2, 2)
    assert inv == fe_make(2, 2, [0, F(1, 2)])
    assert inv * theta == 1
    assert fe_theta_power(3, 2, 2) == fe_make(2, 2, [0, 2])
    assert fe_theta_power(0, 2, 5) == 1


def test_fe_is_rational_and_monomial_examples():
    assert fe_is_rational(fe_make(2, 2, [F(-1, 2), 0])) == F(-1, 2)
    assert fe_is_rational(fe_make(2, 2, [0, 1])) is None
    assert fe_is_rational(fe_promote(FieldElement.rational(2, 5), 4)) == 5
    x = fe_make(2, 2, [0, F(-1, 4)])
    assert monomial_decompose(x) == (1, F(-1, 4))
    assert float(x) == pytest.approx(-0.35355339, abs=1e-8)
    assert monomial_decompose(fe_make(2, 2, [1, 1])) is None
    assert monomial_decompose(FieldElement.zero(2, 2)) is None


def test_huge_degree_is_sparse():
    # 2^(-5/2^18) lives in K_(2^18); it must not allocate 2^18 coordinates
    x = base_power(2, F(-5, 2 ** 18))
    assert x.degree == 2 ** 18
    assert len(x.sparse) == 1
    y = x * x * x
    assert y == base_power(2, F(-15, 2 ** 18))


def test_base_power_magnitude_guard():
    with pytest.raises(MagnitudeError):
        base_power(2, 2 ** 30)


bases = st.sampled_from([2, 3, 5])
degrees = st.sampled_from([1, 2, 3, 4, 6])
small_q = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def elements(draw, base=None, degree=None):
    b = base if base is not None else draw(bases)
    n = degree if degree is not None else draw(degrees)
    return fe_make(b, n, draw(st.lists(small_q, min_size=n, max_size=n)))


@st.composite
def triples(draw):
    b = draw(bases)
    return draw(elements(b)), draw(elements(b)), draw(elements(b))


@settings(max_examples=150, deadline=None)
@given(triples())
def test_field_axioms(t):
    x, y, z = t
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    assert x * 1 == x


@settings(max_examples=100, deadline=None)
@given(triples())
def test_arithmetic_agrees_with_numeric_oracle(t):
    x, y, _ = t
    with mpmath.workdps(50):
        for got, want in ((x + y, numeric(x) + numeric(y)), (x * y, numeric(x) * numeric(y))):
            assert abs(numeric(got) - want) <= mpmath.mpf(10) ** -35 * (1 + abs(want))


@settings(max_examples=100, deadline=None)
@given(bases, degrees, st.integers(-12, 12))
def test_theta_power_inverse(base, n, p):
    assert fe_theta_power(p, base, n) * fe_theta_power(-p, base, n) == 1


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_promotion_is_a_ring_homomorphism(data):
    base = data.draw(bases)
    n = data.draw(degrees)
    x, y = data.draw(elements(base, n)), data.draw(elements(base, n))
    factor = data.draw(st.sampled_from([1, 2, 3]))
    big = n * factor
    assert fe_promote(x + y, big) == fe_promote(x, big) + fe_promote(y, big)
    assert fe_promote(x * y, big) == fe_promote(x, big) * fe_promote(y, big)
    with mpmath.workdps(50):
        assert abs(numeric(fe_promote(x, big)) - numeric(x)) < mpmath.mpf(10) ** -40 * (1 + abs(numeric(x)))


@settings(max_examples=100, deadline=None)
@given(elements())
def test_injectivity_proxy(x):
    # distinct coordinates must mean distinct reals (irreducibility of x^N - B)
    if not x.is_zero():
        with mpmath.workdps(60):
            assert abs(numeric(x, 60)) > mpmath.mpf(10) ** -50
    assert x.reduced() == x
    assert hash(x.reduced()) == hash(x)
