"""Genus-2 curves y^2 = P(x): point counts, Frobenius quartics, invariants, involutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import comb, factorial, gcd, lcm
from typing import Optional, Sequence

import numpy as np

from .arith import QuadRat, rational_sqrt
from .curvefit import is_squarefree_poly, transform_model


class BadReductionError(ValueError):
    pass


def _strip(P):
    P = list(P)
    while P and P[-1] == 0:
        P.pop()
    return P


def _poly_disc(P: Sequence[int]) -> int:
    from sympy import Poly, discriminant, symbols

    x = symbols("x")
    return int(discriminant(Poly(list(reversed(P)), x)))


def square_class(q: Fraction) -> int:
    """Squarefree integer s with q in s*Q^2 (q != 0)."""
    q = Fraction(q)
    n = q.numerator * q.denominator
    s = 1 if n > 0 else -1
    n = abs(n)
    k = 2
    while k * k <= n:
        while n % (k * k) == 0:
            n //= k * k
        k += 1
    return s * n


def is_rational_square(q) -> bool:
    q = Fraction(q)
    return q == 0 or rational_sqrt(q) is not None


@dataclass(frozen=True)
class GenusTwoCurve:
    """y^2 = P(x), P with integer coefficients A_0..A_6 (constant first)."""

    P: tuple[int, ...]

    def __post_init__(self):
        P = tuple(int(c) for c in _strip(self.P))
        object.__setattr__(self, "P", P)
        if len(P) - 1 not in (5, 6):
            raise ValueError(f"P must have degree 5 or 6, got {len(P) - 1}")
        if not is_squarefree_poly(P):
            raise ValueError("P has a repeated root")

    @classmethod
    def from_rational(cls, P: Sequence) -> GenusTwoCurve:
        """Integral model via y -> m y, m the lcm of the denominators."""
        P = [Fraction(c) for c in P]
        m = lcm(1, *(c.denominator for c in P))
        return cls(tuple(int(c * m * m) for c in P))

    @classmethod
    def parse(cls, text: str) -> GenusTwoCurve:
        from sympy import Poly, Symbol, sympify

        x = Symbol("x")
        expr = sympify(text.replace("^", "**"), locals={"x": x})
        coeffs = [Fraction(str(c)) for c in reversed(Poly(expr, x).all_coeffs())]
        return cls.from_rational(coeffs)

    @property
    def degree(self) -> int:
        return len(self.P) - 1

    def sextic(self) -> tuple[int, ...]:
        return self.P + (0,) * (7 - len(self.P))

    @property
    def disc(self) -> int:
        return _cached_disc(self.P)

    def is_good(self, p: int) -> bool:
        return p > 2 and self.disc % p != 0

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.P) - 1, -1, -1):
            c = self.P[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                coef = "-" if c < 0 else "+"
            else:
                coef = f"{c:+d}" + ("*" if mono else "")
            terms.append(coef + mono)
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


@lru_cache(maxsize=4096)
def _cached_disc(P: tuple[int, ...]) -> int:
    if len(P) == 7:
        return _poly_disc(P)
    return P[5] ** 2 * _poly_disc(P)


# finite fields of size p and p^2


@lru_cache(maxsize=None)
def _nonresidue(p: int) -> int:
    r = 2
    while pow(r, (p - 1) // 2, p) != p - 1:
        r += 1
    return r


@lru_cache(maxsize=64)
def _field_tables(p: int, k: int):
    """Elements of F_{p^k} as (u, v) arrays and a square indicator indexed by u*p+v."""
    if k == 1:
        u = np.arange(p, dtype=np.int64)
        v = np.zeros(p, dtype=np.int64)
    else:
        idx = np.arange(p * p, dtype=np.int64)
        u, v = idx // p, idx % p
    r = _nonresidue(p)
    su = (u * u + r * v * v) % p
    sv = (2 * u * v) % p
    is_sq = np.zeros(p * p, dtype=bool)
    is_sq[su * p + sv] = True
    return u, v, is_sq, r


def count_points(curve: GenusTwoCurve, p: int, k: int = 1) -> int:
    """#C(F_{p^k}) on the smooth model, by a vectorized quadratic-character sum."""
    if k not in (1, 2):
        raise ValueError("only k = 1, 2 are supported")
    if not curve.is_good(p):
        raise BadReductionError(f"bad reduction at {p}")
    u, v, is_sq, r = _field_tables(p, k)
    P = [c % p for c in curve.sextic()]
    au = np.full(u.shape, P[6], dtype=np.int64)
    av = np.zeros(u.shape, dtype=np.int64)
    for c in reversed(P[:6]):
        au, av = (au * u + r * (av * v % p) + c) % p, (au * v + av * u) % p
    zero = (au == 0) & (av == 0)
    sq = is_sq[au * p + av] & ~zero
    chi_sum = int(sq.sum()) - int((~sq & ~zero).sum())
    q = p**k
    lead = P[6]
    infinity = 1 if lead == 0 else (2 if (k == 2 or pow(lead, (p - 1) // 2, p) == 1) else 0)
    return q + chi_sum + infinity


class _Fq:
    """Tiny F_p or F_{p^2} arithmetic on pairs; used by the naive counter."""

    def __init__(self, p: int, k: int) -> None:
        self.p, self.k = p, k
        self.r = _nonresidue(p)

    def elements(self):
        if self.k == 1:
            return [(u, 0) for u in range(self.p)]
        return [(u, v) for u in range(self.p) for v in range(self.p)]

    def mul(self, x, y):
        p = self.p
        return ((x[0] * y[0] + self.r * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)


def count_points_naive(curve: GenusTwoCurve, p: int, k: int = 1) -> int:
    """Independent oracle: scan all (x, y) plus the points at infinity."""
    F = _Fq(p, k)
    els = F.elements()
    squares: dict[tuple[int, int], int] = {}
    for y in els:
        s = F.mul(y, y)
        squares[s] = squares.get(s, 0) + 1
    P = curve.sextic()
    total = 0
    for x in els:
        acc = (P[6] % p, 0)
        for c in reversed(P[:6]):
            acc = F.add(F.mul(acc, x), (c % p, 0))
        total += squares.get(acc, 0)
    # points (1 : Y : 0) with Y^2 = A6 on the weighted projective model
    total += squares.get((P[6] % p, 0), 0)
    return total


@dataclass(frozen=True)
class FrobeniusData:
    p: int
    counts: tuple[int, int]
    Qp: tuple[int, ...]  # descending: 1, -s1, s2, -p s1, p^2

    @property
    def s1(self) -> int:
        return -self.Qp[1]

    @property
    def s2(self) -> int:
        return self.Qp[2]


def frobenius_poly(curve: GenusTwoCurve, p: int) -> FrobeniusData:
    n1 = count_points(curve, p, 1)
    n2 = count_points(curve, p, 2)
    s1 = p + 1 - n1
    t = s1 * s1 + n2 - p * p - 1
    assert t % 2 == 0
    s2 = t // 2
    return FrobeniusData(p, (n1, n2), (1, -s1, s2, -p * s1, p * p))


def frobenius_power(Q: Sequence[int], n: int) -> tuple[int, ...]:
    """Characteristic polynomial of alpha^n over the roots alpha of monic Q.

    Equal to the monic resultant Res_s(Q(s), t - s^n); computed through Newton's
    identities on power sums, which stays in exact integers.
    """
    Q = [int(c) for c in Q]
    deg = len(Q) - 1
    e = [(-1) ** i * Q[i] for i in range(deg + 1)]  # elementary symmetric e_0..e_deg
    N = n * deg
    ps = [deg] + [0] * N
    for k in range(1, N + 1):
        s = (-1) ** (k - 1) * k * e[k] if k <= deg else 0
        for i in range(1, min(k - 1, deg) + 1):
            s += (-1) ** (i - 1) * e[i] * ps[k - i]
        ps[k] = s
    qs = [ps[n * k] for k in range(deg + 1)]
    f = [1] + [0] * deg
    for k in range(1, deg + 1):
        s = 0
        for i in range(1, k + 1):
            s += (-1) ** (i - 1) * f[k - i] * qs[i]
        assert s % k == 0
        f[k] = s // k
    return tuple((-1) ** i * f[i] for i in range(deg + 1))


@dataclass(frozen=True)
class SieveResult:
    passed: bool
    witness: Optional[int] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def primes_below(B: int, inclusive: bool = False) -> list[int]:
    from .newform import primes_upto

    return [p for p in primes_upto(B) if inclusive or p < B]


def is_split_square(Q: Sequence[int], q: int) -> bool:
    """Q == (t^2 - a t + q)^2 with a an integer."""
    if len(Q) != 5 or Q[0] != 1 or Q[1] % 2:
        return False
    a = -Q[1] // 2
    return tuple(Q) == (1, -2 * a, a * a + 2 * q, -2 * a * q, q * q)


def sieve1_check(curve: GenusTwoCurve, n: int, B: int = 100) -> SieveResult:
    for p in primes_below(B):
        if not curve.is_good(p):
            continue
        Qn = frobenius_power(frobenius_poly(curve, p).Qp, n)
        if not is_split_square(Qn, p**n):
            return SieveResult(False, p, f"Q_{{{p}^{n}}} = {Qn} is not a square of t^2 - a t + {p}^{n}")
    return SieveResult(True)


def _factor_quartic(Q: Sequence[int]):
    from sympy import Poly, symbols

    t = symbols("t")
    _, facs = Poly(list(Q), t).factor_list()
    return [(tuple(int(c) for c in f.all_coeffs()), m) for f, m in facs]


def quadratic_subfields(fd: FrobeniusData) -> Optional[list[int]]:
    """Square classes of the quadratic subfields of Q(pi) when Q_p is irreducible."""
    p, s1, s2 = fd.p, fd.s1, fd.s2
    D0 = s1 * s1 - 4 * s2 + 8 * p
    out = [square_class(Fraction(D0))]
    # alpha = (s1 + sqrt(D0))/2 written over the squarefree part of D0
    r = rational_sqrt(Fraction(D0, out[0]))
    alpha = QuadRat(Fraction(s1, 2), r / 2, out[0])
    delta = alpha * alpha - 4 * p
    n = rational_sqrt(delta.norm())
    if n is not None:
        m = delta.trace() + 2 * n
        if m == 0:
            m = delta.trace() - 2 * n
        if m != 0:
            out.append(square_class(m))
            out.append(square_class(m * D0))
    return out


def embeds_quadratic(fd: FrobeniusData, d: int) -> bool:
    """Does Q(sqrt d) embed in End^0 of a surface over F_p with Frobenius quartic Q_p?"""
    facs = _factor_quartic(fd.Qp)
    degs = sorted((len(f) - 1, m) for f, m in facs)
    if degs == [(4, 1)]:
        return d in quadratic_subfields(fd)
    if len(facs) == 1 and facs[0][1] == 2:
        return True  # isogenous to E^2: End^0 contains M_2(Q)
    if all(len(f) - 1 == 2 and m == 1 for f, m in facs) and len(facs) == 2:
        return all(square_class(Fraction(f[1] * f[1] - 4 * f[0] * f[2])) == d for f, _ in facs)
    # remaining shapes (linear factors) have a rational Frobenius eigenvalue; never for prime p
    return False


def endo_field_check(curve: GenusTwoCurve, d: int, B: int = 29) -> SieveResult:
    for p in primes_below(B, inclusive=True):
        if not curve.is_good(p):
            continue
        fd = frobenius_poly(curve, p)
        if not embeds_quadratic(fd, d):
            return SieveResult(False, p, f"Q(sqrt({d})) does not embed at p = {p}, Q_p = {fd.Qp}")
    return SieveResult(True)


def eichler_shimura_quartic(ap: QuadRat, eps: QuadRat, p: int) -> tuple:
    """(t^2 - a t + e p)(t^2 - sigma(a) t + sigma(e) p) as a descending coefficient tuple."""
    a, e = QuadRat.coerce(ap), QuadRat.coerce(eps)
    f1 = [QuadRat(1), -a, e * p]
    f2 = [QuadRat(1), -a.conjugate(), e.conjugate() * p]
    out = [QuadRat(0)] * 5
    for i, x in enumerate(f1):
        for j, y in enumerate(f2):
            out[i + j] = out[i + j] + x * y
    return tuple(out)


# binary forms and Clebsch invariants


def _dx(f):
    n = len(f) - 1
    return [(n - i) * f[i] for i in range(n)]


def _dy(f):
    n = len(f) - 1
    return [(i + 1) * f[i + 1] for i in range(n)]


def _bmul(f, g):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def transvectant(f, g, k: int):
    """(f, g)_k for binary forms given as coefficient lists of x^(n-i) y^i."""
    m, n = len(f) - 1, len(g) - 1
    out = [Fraction(0)] * (m + n - 2 * k + 1)
    for j in range(k + 1):
        a = f
        for _ in range(k - j):
            a = _dx(a)
        for _ in range(j):
            a = _dy(a)
        b = g
        for _ in range(j):
            b = _dx(b)
        for _ in range(k - j):
            b = _dy(b)
        term = _bmul(a, b)
        c = (-1) ** j * comb(k, j)
        for i, t in enumerate(term):
            out[i] += c * t
    scale = Fraction(factorial(m - k) * factorial(n - k), factorial(m) * factorial(n))
    return [scale * t for t in out]


def _binary_sextic(P) -> list[Fraction]:
    P = [Fraction(c) for c in P] + [Fraction(0)] * (7 - len(P))
    return [P[6 - i] for i in range(7)]  # coefficient of x^(6-i) y^i is A_(6-i)


def clebsch_covariants(P):
    f = _binary_sextic(P)
    i = transvectant(f, f, 4)
    delta = transvectant(i, i, 2)
    y1 = transvectant(f, i, 4)
    y2 = transvectant(i, y1, 2)
    y3 = transvectant(i, y2, 2)
    return f, i, delta, y1, y2, y3


def clebsch_invariants(P) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(A, B, C, D) of weights 2, 4, 6, 10 for the sextic sum A_i x^i (degree 5 = root at infinity)."""
    if isinstance(P, GenusTwoCurve):
        P = P.P
    f, i, delta, y1, y2, y3 = clebsch_covariants(P)
    A = transvectant(f, f, 6)[0]
    B = transvectant(i, i, 4)[0]
    C = transvectant(i, delta, 4)[0]
    D = transvectant(y3, y1, 2)[0]
    return A, B, C, D


def invariant_R(P) -> Fraction:
    """Degree-15 invariant: determinant of the quadratic covariants y1, y2, y3."""
    if isinstance(P, GenusTwoCurve):
        P = P.P
    *_, y1, y2, y3 = clebsch_covariants(P)
    m = [y1, y2, y3]
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


CLEBSCH_WEIGHTS = (1, 2, 3, 5)  # degrees 2, 4, 6, 10 halved


def weighted_class_key(inv) -> tuple:
    """Complete key for the point of P(1,2,3,5) over Q-bar.

    Zero pattern plus all pairwise ratios I_k^(w_l/g) / I_l^(w_k/g); these
    monomials generate the relation lattice for every zero pattern here.
    """
    inv = [Fraction(c) for c in inv]
    nz = tuple(k for k in range(4) if inv[k] != 0)
    ratios = []
    for x in range(len(nz)):
        for y in range(x + 1, len(nz)):
            k, l = nz[x], nz[y]
            wk, wl = CLEBSCH_WEIGHTS[k], CLEBSCH_WEIGHTS[l]
            g = gcd(wk, wl)
            ratios.append(inv[k] ** (wl // g) / inv[l] ** (wk // g))
    return nz, tuple(ratios)


def same_weighted_class(i1, i2) -> bool:
    return weighted_class_key(i1) == weighted_class_key(i2)


def qbar_isomorphic(c1, c2) -> bool:
    return same_weighted_class(clebsch_invariants(c1), clebsch_invariants(c2))


# involutions


@dataclass
class Involution:
    """x -> (a x + b)/(c x - a) lifting to an involution of the curve."""

    a: Fraction
    b: Fraction
    c: Fraction

    @property
    def D(self) -> Fraction:
        return self.a * self.a + self.b * self.c

    def matrix(self):
        return ((self.a, self.b), (self.c, -self.a))

    def __str__(self) -> str:
        return f"x -> ({self.a}*x + {self.b})/({self.c}*x - {self.a})"


@dataclass
class InvolutionReport:
    kind: str  # "none" | "over_Q" | "over_Qbar"
    maps: list[Involution] = field(default_factory=list)
    degree: Optional[int] = None  # least degree of a field of definition
    field_d: Optional[int] = None  # squarefree d when that field is quadratic
    orbits: list[tuple[int, int]] = field(default_factory=list)  # (field degree, count) per Galois orbit

    @property
    def has_involution(self) -> bool:
        return self.kind != "none"


def _involution_sextic_condition(P, a, b, c) -> bool:
    """Exact check of (c z - a)^6 P((a z + b)/(c z - a)) = D^3 P(z)."""
    Pm = transform_model(P, ((a, b), (c, -a)))
    D = a * a + b * c
    # transform_model divides by det^4 = D^4 and substitutes the inverse map (itself)
    return [t * D**4 for t in Pm] == [Fraction(t) * D**3 for t in _strip(P)]


def _orbit_degree_with_sqrt(g, h, a_sym, extra_k=(1, 2, 3, 5, 7)):
    """[Q(a, sqrt(h(a))) : Q] for a a root of irreducible g."""
    from sympy import Poly, resultant, symbols

    m = Poly(g, a_sym).degree()
    X = symbols("X")
    for k in extra_k:
        R = Poly(resultant(Poly(g, a_sym).as_expr(), ((X - k * a_sym) ** 2 - h).expand(), a_sym), X)
        if R.degree() == 0:
            continue
        if Poly(R.gcd(R.diff(X)), X).degree() == 0:
            _, facs = R.factor_list()
            return min(f.degree() for f, _ in facs)
    return 2 * m


def has_extra_involution(curve) -> InvolutionReport:
    from sympy import Poly, Rational, factor_list, gcd as sgcd, groebner, symbols

    P = curve.P if isinstance(curve, GenusTwoCurve) else tuple(curve)
    Pf = [Fraction(t) for t in P] + [Fraction(0)] * (7 - len(P))
    Pz = [Rational(t.numerator, t.denominator) for t in Pf]
    s, D, a, z, t = symbols("s D a z t")
    maps: list[Involution] = []
    orbits: list[tuple[int, int]] = []
    field_ds: list[tuple[int, Optional[int]]] = []

    # chart c = 1: x -> (a x + b)/(x - a), b = D - a^2, lambda = D^3.
    # a = u - k*D with k chosen so that the lex basis is in shape position in u.
    for k in range(0, 12):
        av_expr = a - k * D  # here the symbol ``a`` plays the role of u
        b = D - av_expr**2
        e = sum(Pz[i] * (av_expr * z + b) ** i * (z - av_expr) ** (6 - i) for i in range(7))
        e = Poly(e.expand(), z)
        eqs = [(e.coeff_monomial(z**j) - Pz[j] * D**3).expand() for j in range(7)]
        eqs = [q for q in eqs if q != 0] + [s * D - 1]
        G = groebner(eqs, s, D, a, order="lex", domain="QQ")
        if list(G.exprs) == [1]:
            G = None
            break
        uni = [g for g in G.exprs if g.free_symbols <= {a}]
        lin = [g for g in G.exprs if g.free_symbols <= {D, a} and D in g.free_symbols]
        if uni and len(lin) == 1 and Poly(lin[0], D).degree() == 1:
            break
    else:
        raise RuntimeError("no separating coordinate found for the involution system")
    if G is not None:
        ga = Poly(uni[0], a)
        L = Poly(lin[0], D)
        h = (-L.coeff_monomial(1) / L.coeff_monomial(D)).expand()  # D = h(u)
        for fac, _ in factor_list(ga.as_expr(), a)[1]:
            fp = Poly(fac, a)
            if fp.degree() == 0:
                continue
            hm = Poly(h, a).rem(fp).as_expr()
            if fp.degree() == 1:
                uv = -fp.coeff_monomial(1) / fp.coeff_monomial(a)
                Dv = Poly(hm, a).eval(uv) if hm.free_symbols else hm
                uv, Dv = Fraction(str(uv)), Fraction(str(Dv))
                av = uv - k * Dv
                inv = Involution(av, Dv - av * av, Fraction(1))
                if is_rational_square(Dv):
                    maps.append(inv)
                    orbits.append((1, 1))
                    field_ds.append((1, None))
                else:
                    orbits.append((2, 1))
                    field_ds.append((2, square_class(Dv)))
            else:
                deg = _orbit_degree_with_sqrt(fp.as_expr(), hm, a)
                orbits.append((deg, fp.degree()))
                fd = None
                if deg == 2:
                    c2, c1, c0 = (Fraction(str(x)) for x in fp.all_coeffs())
                    fd = square_class(c1 * c1 - 4 * c2 * c0)
                field_ds.append((deg, fd))

    # chart c = 0: x -> -x - t (lambda = 1)
    e0 = Poly(sum(Pz[i] * (-z - t) ** i for i in range(7)).expand(), z)
    conds = [(e0.coeff_monomial(z**j) - Pz[j]).expand() for j in range(7)]
    conds = [Poly(q, t) for q in conds if q != 0]
    if not conds:
        raise ValueError("P is identically invariant; not a curve")
    gt = conds[0]
    for q in conds[1:]:
        gt = sgcd(gt, q)
    gt = Poly(gt, t)
    if gt.degree() > 0:
        for fac, _ in factor_list(gt.as_expr(), t)[1]:
            fp = Poly(fac, t)
            if fp.degree() == 0:
                continue
            if fp.degree() == 1:
                tv = Fraction(str(-fp.coeff_monomial(1) / fp.coeff_monomial(t)))
                maps.append(Involution(Fraction(1), tv, Fraction(0)))
                orbits.append((1, 1))
                field_ds.append((1, None))
            else:
                orbits.append((fp.degree(), fp.degree()))
                fd = None
                if fp.degree() == 2:
                    c2, c1, c0 = (Fraction(str(x)) for x in fp.all_coeffs())
                    fd = square_class(c1 * c1 - 4 * c2 * c0)
                field_ds.append((fp.degree(), fd))

    for m in maps:
        assert _involution_sextic_condition(Pf, m.a, m.b, m.c)
    if maps:
        return InvolutionReport("over_Q", maps, 1, None, orbits)
    if not orbits:
        return InvolutionReport("none")
    deg, fd = min(field_ds, key=lambda x: x[0])
    return InvolutionReport("over_Qbar", [], deg, fd, orbits)


# rational isomorphisms


def _roots_projective(P, dps: int):
    import mpmath

    Pf = _strip([Fraction(c) for c in P])
    with mpmath.workdps(dps):
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in reversed(Pf)], maxsteps=400, extraprec=4 * dps)
        pts = [(mpmath.mpc(r), mpmath.mpc(1)) for r in roots]
        if len(Pf) == 6:
            pts.append((mpmath.mpc(1), mpmath.mpc(0)))
    return pts


def _mobius_from_triples(src, dst):
    import mpmath

    def frame(v):
        (x1, y1), (x2, y2), (x3, y3) = v
        M = mpmath.matrix([[x1, x2], [y1, y2]])
        lam = mpmath.lu_solve(M, mpmath.matrix([x3, y3]))
        return mpmath.matrix([[x1 * lam[0], x2 * lam[1]], [y1 * lam[0], y2 * lam[1]]])

    return frame(dst) * mpmath.inverse(frame(src))


def _proj_close(u, v, tol) -> bool:
    return abs(u[0] * v[1] - u[1] * v[0]) <= tol * (abs(u[0]) + abs(u[1])) * (abs(v[0]) + abs(v[1]))


def q_isomorphism(c1, c2, dps: int = 60):
    """A rational matrix M with transform_model(P1, M) a rational-square multiple of P2, or None.

    Candidate maps come from the 120 assignments of three roots of P1 to roots
    of P2 (numerically); any candidate with rational entries is then verified
    exactly. A rational map of very large height could be missed.
    """
    import mpmath

    P1 = c1.P if isinstance(c1, GenusTwoCurve) else tuple(c1)
    P2 = c2.P if isinstance(c2, GenusTwoCurve) else tuple(c2)
    P1f = _strip([Fraction(t) for t in P1])
    P2f = _strip([Fraction(t) for t in P2])
    if not same_weighted_class(clebsch_invariants(P1f), clebsch_invariants(P2f)):
        return None
    with mpmath.workdps(dps):
        r1 = _roots_projective(P1f, dps)
        r2 = _roots_projective(P2f, dps)
        tol = mpmath.mpf(10) ** (-(dps // 2))
        src = r1[:3]
        for dst in permutations(r2, 3):
            try:
                M = _mobius_from_triples(src, dst)
            except ZeroDivisionError:
                continue
            imgs = [(M[0, 0] * x + M[0, 1] * y, M[1, 0] * x + M[1, 1] * y) for x, y in r1]
            if not all(any(_proj_close(u, v, tol) for v in r2) for u in imgs):
                continue
            entries = [M[0, 0], M[0, 1], M[1, 0], M[1, 1]]
            big = max(entries, key=abs)
            ratios = [e / big for e in entries]
            if any(abs(mpmath.im(x)) > tol for x in ratios):
                continue
            rat = []
            for x in ratios:
                fr = Fraction(mpmath.nstr(mpmath.re(x), dps - 5, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)).limit_denominator(10**18)
                if abs(mpmath.mpf(fr.numerator) / fr.denominator - mpmath.re(x)) > tol:
                    break
                rat.append(fr)
            else:
                mat = ((rat[0], rat[1]), (rat[2], rat[3]))
                if rat[0] * rat[3] - rat[1] * rat[2] == 0:
                    continue
                image = transform_model(P1f, mat)
                if len(image) != len(P2f):
                    continue
                mu = image[-1] / P2f[-1]
                if [mu * t for t in P2f] == image and is_rational_square(mu):
                    return mat
    return None


def q_isomorphic(c1, c2) -> bool:
    return q_isomorphism(c1, c2) is not None
