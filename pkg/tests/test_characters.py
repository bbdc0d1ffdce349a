from math import gcd

import pytest
from hypothesis import given, strategies as st

from g2modular.arith import QuadRat
from g2modular.characters import (
    CharacterError,
    DirichletCharacter,
    characters_mod,
    format_degree_list,
    kronecker_character,
    parse_degree_list,
    root_index,
)

ZETA6 = QuadRat(QuadRat.w(-3).a, QuadRat.w(-3).b, -3)


def test_trivial_eval():
    assert DirichletCharacter.trivial(63).eval(5) == 1


def test_order6_mod13_at_generator():
    chi = DirichletCharacter.from_images(13, [2])
    assert chi.order() == 6
    assert chi.eval(2) == ZETA6


def test_eval_zero_off_units():
    for chi in characters_mod(40):
        assert chi.eval(10) == 0


def test_conductors():
    assert DirichletCharacter.trivial(45).conductor() == 1
    assert DirichletCharacter.trivial(45).order() == 1
    assert DirichletCharacter.from_images(13, [2]).conductor() == 13


def test_conjugate_is_involution():
    for chi in characters_mod(80, orders=(4,)):
        assert chi.galois_conjugate().galois_conjugate().images == chi.images


def test_degree_list_order6_mod13():
    parsed = parse_degree_list("[6]", 13)
    assert len(parsed.classes) == 1 and len(parsed.classes[0]) == 2
    assert all(chi.order() == 6 for chi in parsed.characters())


def test_degree_list_mixed():
    for chi in parse_degree_list("[1,2]", 45).characters():
        assert chi.eval(11) == 1  # 11 = 1 mod 5
        assert chi.eval(7) == -1  # 2 is a non-residue mod 5, the part at 9 is trivial
        assert chi.order() == 2 and chi.conductor() == 5


def test_degree_list_trivial():
    for N in (1, 13, 63, 7424):
        (chi,) = parse_degree_list("1", N).characters()
        assert chi.is_trivial()


def test_bad_degree_list():
    with pytest.raises(CharacterError):
        parse_degree_list("[5]", 13)
    with pytest.raises(CharacterError):
        parse_degree_list("[1,2,2]", 45)


def test_kronecker_matches_legendre():
    chi = kronecker_character(-3, 9)
    for n in range(1, 30):
        if n % 3:
            assert chi.eval(n) == (1 if n % 3 == 1 else -1)


MODULI = [5, 7, 9, 13, 16, 21, 28, 36, 40, 45, 63, 80]


@given(st.sampled_from(MODULI), st.data())
def test_character_laws(N, data):
    chars = characters_mod(N)
    chi = data.draw(st.sampled_from(chars))
    m = data.draw(st.integers(1, 500))
    n = data.draw(st.integers(1, 500))
    assert chi.eval(m * n) == chi.eval(m) * chi.eval(n)
    assert chi.eval(m) == chi.eval(m + N)
    if gcd(m, N) == 1:
        k = root_index(chi.eval(m))
        assert k is not None and chi.order() % (12 // gcd(k, 12)) == 0
        assert chi.eval(m).d in (0, -1, -3)
    else:
        assert chi.eval(m) == 0
    assert chi.order() in (1, 2, 3, 4, 6)
    assert chi.modulus % chi.conductor() == 0
    assert parse_degree_list(format_degree_list(chi), N).characters()
