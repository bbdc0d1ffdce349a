from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from g2modular.arith import FieldMismatchError, PrecisionError, QuadRat, TruncSeries

D_VALUES = [-3, -1, 2, 3, 5, 13]
rats = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))


@st.composite
def quads(draw, d=None):
    if d is None:
        d = draw(st.sampled_from(D_VALUES))
    return QuadRat(draw(rats), draw(rats), d)


def test_conjugate_of_w5():
    w = QuadRat.w(5)
    assert w.conjugate() == 1 - w


def test_norm_of_minus_w_minus_one():
    assert (-QuadRat.w(-3) - 1).norm() == 3


def test_algebraic_integers():
    half = Fraction(1, 2)
    assert QuadRat(half, half, 5).is_algebraic_integer()
    assert not QuadRat(half, half, 2).is_algebraic_integer()


def test_rational_has_zero_irrational_part():
    x = QuadRat.sqrt(3) * QuadRat.sqrt(3)
    assert x.b == 0 and x.a == 3 and x.is_rational()


def test_fields_never_mix():
    with pytest.raises(FieldMismatchError):
        QuadRat.sqrt(2) + QuadRat.sqrt(3)


def test_d_must_be_squarefree():
    with pytest.raises(ValueError):
        QuadRat(1, 1, 12)


@given(st.sampled_from(D_VALUES).flatmap(lambda d: st.tuples(quads(d), quads(d), quads(d))))
def test_field_axioms(xyz):
    x, y, z = xyz
    assert (x + y) * z == x * z + y * z
    assert x * y == y * x
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert (x * y).norm() == x.norm() * y.norm()
    if not x.is_zero():
        assert x * x.inverse() == 1
        assert (y / x) * x == y


@given(quads())
def test_lowest_terms(x):
    assert x.a.denominator > 0 and Fraction(x.a.numerator, x.a.denominator) == x.a


def test_series_division():
    q = TruncSeries.exact_monomial(1)
    num = TruncSeries([1, 1], 1, 12)
    assert num / q == TruncSeries([1, 1], 0, 11)


def test_q_derivative():
    s = TruncSeries.from_dict({-1: 1, 2: 3}, 10)
    assert s.q_derivative() == TruncSeries.from_dict({-1: -1, 2: 6}, 10)


def test_laurent_product():
    a = TruncSeries([1, 1], -2, 10)
    b = TruncSeries.exact_monomial(3)
    prod = a * b
    assert prod.val == 1 and prod[1] == 1 and prod[2] == 1
    assert prod.prec == 13


def test_precision_propagates():
    a = TruncSeries([1, 2, 3], 0, 5)
    b = TruncSeries([1, 1], 0, 8)
    assert (a + b).prec == 5
    assert (a * b).prec == 5
    with pytest.raises(PrecisionError):
        (a * b)[5]


series_coeffs = st.lists(st.integers(-20, 20), min_size=1, max_size=12)


@given(series_coeffs, series_coeffs)
def test_inverse_round_trip(a, b):
    s = TruncSeries([1] + a, 0, 13)
    t = TruncSeries(b, 0, 13)
    assert (t / s) * s == t
    inv = s.inverse()
    assert (inv * s).truncate(13) == TruncSeries([1], 0, 13)


@given(series_coeffs, series_coeffs)
def test_derivative_is_derivation(a, b):
    s = TruncSeries(a, 1, 14)
    t = TruncSeries(b, -1, 12)
    assert (s * t).q_derivative() == s.q_derivative() * t + s * t.q_derivative()
