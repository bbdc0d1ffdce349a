"""Weight-2 newforms with quadratic coefficient field: Hecke expansion and the (h1, h2) basis."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .arith import QuadRat, TruncSeries
from .characters import DirichletCharacter, factorize


class InsufficientDataError(ValueError):
    pass


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(n + 1) if sieve[i]]


def next_prime(n: int) -> int:
    m = n + 1
    while not all(m % p for p in range(2, int(m**0.5) + 1)) or m < 2:
        m += 1
    return m


@dataclass(frozen=True)
class NewformSpec:
    """Truncated data of a newform f with coefficients in Q(sqrt(d)).

    ``eps`` overrides character values at given primes; it is how the
    collector passes eps(2), eps(3) when the level is still unknown.
    """

    d: int
    ap: Mapping[int, QuadRat]
    level: Optional[int] = None
    character: Optional[DirichletCharacter] = None
    cm: bool = False
    twist: Optional[int] = None
    eps: Mapping[int, QuadRat] = field(default_factory=dict)
    label: str = ""

    def a(self, p: int) -> QuadRat:
        try:
            return self.ap[p].with_field(self.d)
        except KeyError:
            raise InsufficientDataError(f"missing coefficient a_{p}") from None

    def max_known(self) -> int:
        """Largest M such that every prime <= M has a known a_p."""
        M = 1
        while next_prime(M) in self.ap:
            M = next_prime(M)
        return next_prime(M) - 1

    def epsilon(self, p: int) -> QuadRat:
        if p in self.eps:
            return self.eps[p].with_field(self.d) if not self.eps[p].is_rational() else self.eps[p]
        if self.level is not None and self.level % p == 0:
            return QuadRat(0)
        if self.character is not None:
            return self.character.eval(p)
        if self.level is not None:
            return QuadRat(1)
        raise InsufficientDataError(f"eps({p}) unknown: no character and no override")

    def conjugate(self) -> NewformSpec:
        return NewformSpec(
            self.d,
            {p: a.conjugate() for p, a in self.ap.items()},
            self.level,
            self.character.galois_conjugate() if self.character is not None else None,
            self.cm,
            self.twist,
            {p: e.conjugate() for p, e in self.eps.items()},
            self.label,
        )


def hecke_coefficients(spec: NewformSpec, M: int) -> list[QuadRat]:
    """[a_0 = 0, a_1, ..., a_M] by multiplicativity and the prime-power recursion."""
    one = QuadRat(1, 0, spec.d)
    zero = QuadRat(0, 0, spec.d)
    a = [zero, one] + [None] * (M - 1)
    powers: dict[int, list[QuadRat]] = {}
    for n in range(2, M + 1):
        v = one
        for p, k in factorize(n).items():
            seq = powers.get(p)
            if seq is None:
                seq = powers[p] = [one, spec.a(p)]
            while len(seq) <= k:
                seq.append(seq[-1] * spec.a(p) - spec.epsilon(p) * p * seq[-2])
            v = v * seq[k]
        a[n] = v
    return a[: M + 1]


def hecke_expand(spec: NewformSpec, M: int) -> TruncSeries:
    a = hecke_coefficients(spec, M)
    return TruncSeries(a[1:], 1, M + 1)


def basis_h1_h2(spec: NewformSpec, M: int) -> tuple[TruncSeries, TruncSeries]:
    """h1 = (f + sigma f)/2 and h2 = (f - sigma f)/(2 sqrt d), as rational series."""
    if spec.d == 0:
        raise ValueError("the basis needs a genuinely quadratic field")
    a = hecke_coefficients(spec, M)
    h1 = TruncSeries([c.a for c in a[1:]], 1, M + 1)
    h2 = TruncSeries([c.b for c in a[1:]], 1, M + 1)
    return h1, h2


def integral_basis(h1: TruncSeries, h2: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """Basis (h1 + h2, 2 h2): the coefficient series of u + v and v for a_n = u + v w_d."""
    return h1 + h2, h2.scale(2)


def n0(spec: NewformSpec) -> int:
    M = spec.max_known()
    for n, c in enumerate(hecke_coefficients(spec, M)):
        if n and not c.is_rational():
            return n
    raise InsufficientDataError(f"all coefficients up to {M} are rational")


def epsilon_from_twist(spec: NewformSpec, p: int) -> Optional[QuadRat]:
    a = spec.a(p)
    if a.is_zero():
        return None
    return a / a.conjugate()


@dataclass(frozen=True)
class Violation:
    prime: int
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.rule} violation at {self.prime}: {self.detail}"


def ramified_abs_squared(N: int, p: int, conductor: int) -> int:
    """|a_p|^2 for p | N as a function of the conductor of eps."""
    if conductor and (N // p) % conductor:
        return p
    if N % (p * p) == 0:
        return 0
    return 1


def check_bounds(spec: NewformSpec, assumed_level: Optional[int] = None) -> list[Violation]:
    N = assumed_level if assumed_level is not None else spec.level
    f_eps = spec.character.conductor() if spec.character is not None else 1
    out = []
    for p in sorted(spec.ap):
        a = spec.ap[p]
        if a.d not in (0, spec.d):
            out.append(Violation(p, "field", f"a_{p} = {a} is not in Q(sqrt({spec.d}))"))
            continue
        if not a.is_algebraic_integer():
            out.append(Violation(p, "integrality", f"a_{p} = {a}"))
        if N is not None and N % p == 0:
            target = ramified_abs_squared(N, p, f_eps)
            ok = (a.norm() == target) if spec.d < 0 else (a * a == target)
            if not ok:
                out.append(Violation(p, "ramified", f"|a_{p}|^2 should be {target}, a_{p} = {a}"))
        elif not a.abs_squared_bound(4 * p):
            out.append(Violation(p, "Weil", f"|a_{p}| > 2 sqrt({p}) for a_{p} = {a}"))
    return out
