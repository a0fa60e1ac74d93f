from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nilmodel.exactfield import (
    Field,
    FieldMismatch,
    QuadFieldElem,
    conjugate,
    embed,
    field_arith,
    format_element,
    integer_coords,
    is_algebraic_integer,
    norm,
    parse_element,
)

rats = st.fractions(min_value=-50, max_value=50, max_denominator=30)
ds = st.sampled_from([2, 3, 5, 6, 7, 13])


@st.composite
def pairs(draw):
    d = draw(ds)
    return QuadFieldElem(draw(rats), draw(rats), d), QuadFieldElem(draw(rats), draw(rats), d)


def test_sqrt2_squared():
    r2 = Field(2).sqrt
    assert r2 * r2 == 2
    assert (1 + r2) * (1 - r2) == -1


def test_mismatched_fields_raise():
    with pytest.raises(FieldMismatch):
        QuadFieldElem(1, 1, 2) + QuadFieldElem(1, 1, 3)


def test_bad_d():
    with pytest.raises(ValueError):
        QuadFieldElem(1, 1, 4)
    with pytest.raises(ValueError):
        Field(1)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        field_arith("div", QuadFieldElem(1, 1, 2), QuadFieldElem(0, 0, 2))
    with pytest.raises(ZeroDivisionError):
        QuadFieldElem(0, 0, 5).inverse()


def test_rational_division_is_exact():
    assert field_arith("div", 1, 3) == Fraction(1, 3)


@given(pairs())
def test_ring_axioms(p):
    x, y = p
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) * y == x * y + y * y
    assert x - x == 0
    if y:
        assert (x / y) * y == x


@given(pairs())
def test_conjugation_is_a_field_automorphism(p):
    x, y = p
    assert conjugate(x * y) == conjugate(x) * conjugate(y)
    assert conjugate(x + y) == conjugate(x) + conjugate(y)
    assert conjugate(conjugate(x)) == x


@given(pairs())
def test_norm_is_multiplicative(p):
    x, y = p
    assert norm(x * y) == norm(x) * norm(y)
    assert norm(x) == (x * conjugate(x)).a


@given(pairs())
def test_order_agrees_with_embedding(p):
    x, y = p
    ex, ey = embed(x), embed(y)
    if abs(ex - ey) > 1e-9:
        assert (x < y) == (ex < ey)
    assert embed(x, "conjugate") == pytest.approx(embed(conjugate(x)))


@given(pairs())
def test_format_parse_roundtrip(p):
    x, _ = p
    assert parse_element(format_element(x), x.d) == x


def test_parse_forms():
    assert parse_element("3/2") == Fraction(3, 2)
    assert parse_element("1+sqrt(2)") == QuadFieldElem(1, 1, 2)
    assert parse_element("-1/2-3*sqrt(5)") == QuadFieldElem(Fraction(-1, 2), -3, 5)
    with pytest.raises(ValueError):
        parse_element("sqrt")
    with pytest.raises(FieldMismatch):
        parse_element("sqrt(3)", 2)


def test_embed_precision():
    # 1/(1+sqrt 2) = sqrt 2 - 1; catastrophic cancellation would show up here
    x = QuadFieldElem(-(10**15), 0, 2) + QuadFieldElem(0, 1, 2) * 10**15 * 0 + Field(2).sqrt
    assert embed(x + 10**15) == pytest.approx(2**0.5, rel=1e-15)


def test_integral_basis():
    assert integer_coords(QuadFieldElem(Fraction(1, 2), Fraction(1, 2), 5), 5) == (0, 1)
    assert is_algebraic_integer(QuadFieldElem(Fraction(1, 2), Fraction(1, 2), 5), 5)
    assert not is_algebraic_integer(QuadFieldElem(Fraction(1, 2), Fraction(1, 2), 3), 3)
