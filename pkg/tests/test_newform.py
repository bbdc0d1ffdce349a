from dataclasses import replace
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from g2modular.arith import QuadRat
from g2modular.ingest import find_row, load_tables
from g2modular.newform import (
    InsufficientDataError,
    NewformSpec,
    basis_h1_h2,
    check_bounds,
    epsilon_from_twist,
    hecke_coefficients,
    n0,
    primes_upto,
)

ROWS = load_tables()


def spec(label):
    return find_row(label).spec()


def test_a4_of_f63():
    assert hecke_coefficients(spec("C_63"), 4)[4] == 1


def test_a4_of_f16_ramified_two():
    f = spec("C_16")
    assert hecke_coefficients(f, 4)[4] == QuadRat(0, 2, -1)


def test_a6_is_a2_a3():
    for row in ROWS[:20]:
        a = hecke_coefficients(row.spec(), 6)
        assert a[6] == a[2] * a[3]


def test_basis_coefficients():
    h1, h2 = basis_h1_h2(spec("C_13"), 13)
    assert h1[1] == 1 and h2[1] == 0
    assert h2[2] == Fraction(-1, 2)
    assert basis_h1_h2(spec("C_63"), 13)[1][2] == 1


def test_n0_values():
    assert n0(spec("C_63")) == 2
    assert n0(spec("C_28")) == 3
    f = NewformSpec(5, {2: QuadRat(1, 0, 5), 3: QuadRat(-1, 0, 5), 5: QuadRat(0, 1, 5)}, level=11)
    assert n0(f) == 5


def test_n0_needs_an_irrational_coefficient():
    f = NewformSpec(5, {2: QuadRat(1, 0, 5), 3: QuadRat(0, 0, 5)}, level=11)
    with pytest.raises(InsufficientDataError):
        n0(f)


def test_epsilon_from_twist():
    assert epsilon_from_twist(spec("C_13"), 5) == -1
    assert epsilon_from_twist(spec("C_63"), 5) == -1  # a_5 = -2 sqrt 3 is twisted by (3/.)
    assert epsilon_from_twist(spec("C_63"), 7) == 1
    assert epsilon_from_twist(spec("C_13"), 7) is None


def test_bounds_clean_row():
    assert check_bounds(spec("C_63"), 63) == []


def test_bounds_weil_violation():
    f = NewformSpec(3, {2: QuadRat(3, 0, 3)})
    (v,) = check_bounds(f)
    assert v.rule == "Weil" and v.prime == 2


def test_bounds_integrality_violation():
    f = NewformSpec(5, {2: QuadRat(Fraction(1, 2), 0, 5)})
    assert [v.rule for v in check_bounds(f)] == ["integrality"]


def test_all_rows_satisfy_bounds():
    for row in ROWS:
        assert check_bounds(row.spec(), row.level) == [], row.label


@given(st.sampled_from(ROWS), st.data())
def test_hecke_multiplicativity(row, data):
    # primes beyond the table get arbitrary values; the law does not care
    ap = {p: QuadRat(0, 0, row.d) for p in primes_upto(169)}
    ap.update(row.spec().ap)
    f = replace(row.spec(), ap=ap)
    a = hecke_coefficients(f, 169)
    m = data.draw(st.integers(1, 13))
    n = data.draw(st.integers(1, 13).filter(lambda n: gcd(m, n) == 1))
    assert a[m * n] == a[m] * a[n]
