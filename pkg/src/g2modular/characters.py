"""Dirichlet characters with values in Q, Q(i) or Q(sqrt(-3)).

Values are tracked as exponents of zeta_12 = exp(2 pi i / 12); only the
exponents landing in a quadratic field (order dividing 4 or 6) are allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, lcm

from .arith import QuadRat

ALLOWED_ORDERS = (1, 2, 3, 4, 6)

_ZETA12 = {
    0: QuadRat(1),
    2: QuadRat(Fraction(1, 2), Fraction(1, 2), -3),
    3: QuadRat(0, 1, -1),
    4: QuadRat(Fraction(-1, 2), Fraction(1, 2), -3),
    6: QuadRat(-1),
    8: QuadRat(Fraction(-1, 2), Fraction(-1, 2), -3),
    9: QuadRat(0, -1, -1),
    10: QuadRat(Fraction(1, 2), Fraction(-1, 2), -3),
}


class CharacterError(ValueError):
    pass


def zeta12(k: int) -> QuadRat:
    k %= 12
    if k not in _ZETA12:
        raise CharacterError(f"zeta_12^{k} is not in a quadratic field")
    return _ZETA12[k]


def root_index(z: QuadRat) -> int | None:
    """Inverse of zeta12 on the roots of unity of quadratic fields."""
    for k, v in _ZETA12.items():
        if v == z:
            return k
    return None


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def _generator(p: int, e: int) -> int:
    """Least generator of the cyclic group (Z/p^e)*, p odd."""
    m = p**e
    phi = (p - 1) * p ** (e - 1)
    qs = list(factorize(phi))
    g = 2
    while True:
        if gcd(g, p) == 1 and all(pow(g, phi // q, m) != 1 for q in qs):
            return g
        g += 1


@dataclass(frozen=True)
class Component:
    """Character on one cyclic factor: generator -> zeta_12^image."""

    prime: int
    exponent: int
    generator: int
    group_order: int
    image: int  # exponent of zeta_12

    @property
    def order(self) -> int:
        return 12 // gcd(self.image % 12, 12)

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent


@lru_cache(maxsize=None)
def _dlog_table(modulus: int, generator: int, group_order: int) -> dict[int, int]:
    table = {}
    x = 1
    for j in range(group_order):
        table[x] = j
        x = x * generator % modulus
    return table


def _cyclic_factors(N: int) -> list[tuple[int, int, int, int]]:
    """(prime, exponent, generator, group order) for the canonical cyclic factors."""
    out = []
    for p, e in sorted(factorize(N).items()):
        if p == 2:
            if e >= 2:
                out.append((2, e, -1 % 2**e, 2))
            if e >= 3:
                out.append((2, e, 5, 2 ** (e - 2)))
        else:
            out.append((p, e, _generator(p, e), (p - 1) * p ** (e - 1)))
    return out


def _component_log(c: Component, n: int) -> int:
    m = c.modulus
    if c.prime != 2:
        return _dlog_table(m, c.generator, c.group_order)[n % m]
    # 2-part: n = (-1)^s * 5^t mod 2^e
    r = n % m
    s = 0 if r % 4 == 1 else 1
    if c.generator == 5:
        r = r if s == 0 else (-r) % m
        return _dlog_table(m, 5, c.group_order)[r]
    return s


class DirichletCharacter:
    """A character mod ``modulus`` given by images of canonical generators."""

    __slots__ = ("modulus", "components")

    def __init__(self, modulus: int, components: tuple[Component, ...] = ()) -> None:
        if modulus < 1:
            raise CharacterError("modulus must be positive")
        self.modulus = modulus
        comps = tuple(components)
        for c in comps:
            if (c.image * c.group_order) % 12:
                raise CharacterError(f"image zeta_12^{c.image} has order not dividing {c.group_order}")
        self.components = comps
        if self.order() not in ALLOWED_ORDERS:
            raise CharacterError(f"character of order {self.order()} has values outside quadratic fields")

    @classmethod
    def trivial(cls, modulus: int) -> DirichletCharacter:
        return cls.from_images(modulus, [0] * len(_cyclic_factors(modulus)))

    @classmethod
    def from_images(cls, modulus: int, images) -> DirichletCharacter:
        facs = _cyclic_factors(modulus)
        images = list(images)
        if len(images) != len(facs):
            raise CharacterError(f"modulus {modulus} has {len(facs)} cyclic factors, got {len(images)} images")
        comps = tuple(Component(p, e, g, n, k % 12) for (p, e, g, n), k in zip(facs, images))
        return cls(modulus, comps)

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(c.image for c in self.components)

    def exponent_at(self, n: int) -> int | None:
        if gcd(n, self.modulus) != 1:
            return None
        return sum(c.image * _component_log(c, n) for c in self.components) % 12

    def __call__(self, n: int) -> QuadRat:
        return self.eval(n)

    def eval(self, n: int) -> QuadRat:
        k = self.exponent_at(n)
        if k is None:
            return QuadRat(0)
        return zeta12(k)

    def order(self) -> int:
        return lcm(1, *(c.order for c in self.components))

    def fixed_field_degree(self) -> int:
        return self.order()

    def is_trivial(self) -> bool:
        return all(c.image == 0 for c in self.components)

    def conductor(self) -> int:
        f = 1
        two_minus, two_five = None, None
        for c in self.components:
            if c.prime == 2:
                if c.generator == 5:
                    two_five = c
                else:
                    two_minus = c
                continue
            o = c.order
            if o > 1:
                v = 0
                while o % c.prime == 0:
                    o //= c.prime
                    v += 1
                f *= c.prime ** (1 + v)
        if two_five is not None and two_five.order > 1:
            j = two_five.order.bit_length() - 1
            f *= 2 ** (j + 2)
        elif two_minus is not None and two_minus.order > 1:
            f *= 4
        return f

    def galois_conjugate(self) -> DirichletCharacter:
        return DirichletCharacter(
            self.modulus,
            tuple(Component(c.prime, c.exponent, c.generator, c.group_order, (-c.image) % 12) for c in self.components),
        )

    def value_field(self) -> int:
        """d of the field generated by the values (0 for Q)."""
        o = self.order()
        if o <= 2:
            return 0
        return -1 if o == 4 else -3

    def degree_list(self) -> list[int]:
        """Component orders in the appendix convention (2-part first)."""
        return [c.order for c in self.components]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.images == other.images

    def __hash__(self) -> int:
        return hash((self.modulus, self.images))

    def __repr__(self) -> str:
        return f"DirichletCharacter({self.modulus}, images={list(self.images)})"


def characters_mod(N: int, orders=ALLOWED_ORDERS) -> list[DirichletCharacter]:
    """All characters mod N with order in ``orders``, deterministic order."""
    facs = _cyclic_factors(N)
    choices = []
    for (_, _, _, n) in facs:
        choices.append([k for k in range(12) if (k * n) % 12 == 0 and k in _ZETA12])
    out = []
    for ims in product(*choices):
        try:
            chi = DirichletCharacter.from_images(N, ims)
        except CharacterError:
            continue
        if chi.order() in orders:
            out.append(chi)
    return out


def conjugacy_classes(chars) -> list[tuple[DirichletCharacter, ...]]:
    seen = set()
    out = []
    for chi in chars:
        if chi in seen:
            continue
        cls = (chi,) if chi.galois_conjugate() == chi else (chi, chi.galois_conjugate())
        seen.update(cls)
        out.append(cls)
    return out


@dataclass(frozen=True)
class ParsedDegreeList:
    classes: tuple[tuple[DirichletCharacter, ...], ...]
    reading: str  # "standard" or "explicit-2"

    def characters(self) -> list[DirichletCharacter]:
        return [chi for cls in self.classes for chi in cls]


_LIST_RE = re.compile(r"^\s*\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]\s*$")


def _expected_entries(N: int) -> int:
    facs = factorize(N)
    e2 = facs.get(2, 0)
    two = 0 if e2 <= 1 else (1 if e2 == 2 else 2)
    return two + sum(1 for p in facs if p != 2)


def _match_orders(N: int, orders: list[int]) -> tuple[tuple[DirichletCharacter, ...], ...]:
    facs = _cyclic_factors(N)
    if len(orders) != len(facs):
        raise CharacterError(f"degree list {orders} does not fit modulus {N}")
    choices = []
    for (p, e, _, n), o in zip(facs, orders):
        if n % o:
            raise CharacterError(f"no component of order {o} on the factor of {p}^{e} (group order {n})")
        ks = [k for k in _ZETA12 if 12 // gcd(k, 12) == o]
        if not ks:
            raise CharacterError(f"order {o} is not allowed")
        choices.append(ks)
    chars = []
    for ims in product(*choices):
        try:
            chars.append(DirichletCharacter.from_images(N, ims))
        except CharacterError:
            continue
    if not chars:
        raise CharacterError(f"no character mod {N} with component orders {orders}")
    return tuple(conjugacy_classes(chars))


def parse_degree_list(spec: str, N: int) -> ParsedDegreeList:
    """Characters mod N with the component orders listed in ``spec``.

    ``1`` (or ``[1]``) means the trivial character. Entries run over the 2-part
    first (none if 2 || N, one if 4 || N, two if 8 | N) and then the odd primes
    in increasing order. A list with one extra leading entry for 2 || N is also
    accepted ("explicit-2" reading) provided that entry is 1.
    """
    text = spec.strip()
    if text == "1":
        return ParsedDegreeList(((DirichletCharacter.trivial(N),),), "standard")
    m = _LIST_RE.match(text)
    if not m:
        raise CharacterError(f"malformed degree list {spec!r}")
    orders = [int(t) for t in m.group(1).split(",")]
    if all(o == 1 for o in orders):
        return ParsedDegreeList(((DirichletCharacter.trivial(N),),), "standard")
    want = _expected_entries(N)
    facs = factorize(N)
    if len(orders) == want:
        return ParsedDegreeList(_match_orders(N, orders), "standard")
    if len(orders) == want + 1 and facs.get(2, 0) == 1:
        if orders[0] != 1:
            raise CharacterError(f"the entry for 2 in {spec!r} must be 1 since 2 || {N}")
        return ParsedDegreeList(_match_orders(N, orders[1:]), "explicit-2")
    raise CharacterError(f"degree list {spec!r} has {len(orders)} entries, expected {want} for N = {N}")


def format_degree_list(chi: DirichletCharacter) -> str:
    if chi.is_trivial():
        return "1"
    return "[" + ",".join(str(o) for o in chi.degree_list()) + "]"


def kronecker_character(D: int, N: int) -> DirichletCharacter:
    """The quadratic character of Q(sqrt(D)) as a character mod N (conductor must divide N)."""
    disc = D if D % 4 == 1 else 4 * D
    if N % abs(disc):
        raise CharacterError(f"conductor {abs(disc)} of Q(sqrt({D})) does not divide {N}")

    def kron(n: int) -> int:
        s = 1
        while n % 2 == 0:
            s *= 1 if disc % 8 in (1, 7) else -1
            n //= 2
        return s * _jacobi_signed(disc, n)

    for chi in characters_mod(N, orders=(2,)):
        if all(chi.eval(n) == kron(n) for n in range(1, 4 * N) if gcd(n, N) == 1):
            return chi
    raise CharacterError(f"no character mod {N} matches Q(sqrt({D}))")


def _jacobi_signed(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0 and any integer a."""
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0
