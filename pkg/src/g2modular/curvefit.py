"""From (h1, h2) to the hyperelliptic equation y^2 = P(x)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .arith import PrecisionError, TruncSeries
from .characters import DirichletCharacter, factorize
from .newform import (
    InsufficientDataError,
    NewformSpec,
    basis_h1_h2,
    integral_basis,
)

OK = "ok"
INCONSISTENT = "inconsistent"  # no polynomial relation of degree <= 6
SINGULAR = "singular"  # P has a double root


class InsufficientPrecisionError(PrecisionError):
    pass


@dataclass
class FitResult:
    P: list[Fraction]  # A_0 .. A_6, trailing zeros stripped
    n0: int
    x: TruncSeries
    y: TruncSeries
    residual: TruncSeries  # y^2 - P(x)
    status: str = OK
    h: Optional[tuple[TruncSeries, TruncSeries]] = None  # (h1, h2) before any basis change

    @property
    def degree(self) -> int:
        return len(self.P) - 1

    @property
    def residual_prec(self) -> int:
        """Largest m with b_1..b_m all known to vanish (0 if b_1 != 0)."""
        m = 0
        while m + 1 < self.residual.prec and self.residual[m + 1] == 0:
            m += 1
        return m

    def first_nonzero_residual(self) -> Optional[int]:
        for m in range(1, self.residual.prec):
            if self.residual[m] != 0:
                return m
        return None

    @property
    def ok(self) -> bool:
        return self.status == OK


def build_xy(h1: TruncSeries, h2: TruncSeries, n0: int) -> tuple[TruncSeries, TruncSeries]:
    if h2.is_zero() or h2.val != n0:
        raise ValueError(f"h2 must have valuation {n0}, found {h2.val}")
    x = h1 / h2
    x = x.scale(1 / Fraction(x.leading))
    y = x.q_derivative() / h2
    y = y.scale(1 / Fraction(y.leading))
    return x, y


def _strip(P: Sequence) -> list[Fraction]:
    P = [Fraction(c) for c in P]
    while P and P[-1] == 0:
        P.pop()
    return P


def poly_str(P: Sequence, var: str = "x") -> str:
    """Coefficients constant-first, printed highest degree first: x^5 - 4*x^4 - x."""
    out = []
    for i in range(len(P) - 1, -1, -1):
        c = Fraction(P[i])
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        body = mono if mono and mag == 1 else (f"{mag}*{mono}" if mono else f"{mag}")
        out.append(("- " if c < 0 else "+ ") + body)
    if not out:
        return "0"
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def poly_mul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(c) for c in a]
    b = _strip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(_strip(a)) >= len(b):
        a = _strip(a)
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] -= c * bc
    return _strip(q), _strip(a)


def poly_gcd(a: Sequence, b: Sequence) -> list[Fraction]:
    a, b = _strip(a), _strip(b)
    while b:
        a, b = b, poly_divmod(a, b)[1]
    return [c / a[-1] for c in a] if a else a


def poly_derivative(P: Sequence) -> list:
    return [i * c for i, c in enumerate(P)][1:]


def is_squarefree_poly(P: Sequence) -> bool:
    P = _strip(P)
    if len(P) < 2:
        return False
    return len(poly_gcd(P, poly_derivative(P))) == 1


def fit_polynomial(x: TruncSeries, y: TruncSeries, h=None) -> FitResult:
    """Triangular elimination for P with ord(y^2 - P(x)) >= 1.

    The pivot for A_i is the order i*val(x) where x^i has leading coefficient 1.
    Every other coefficient of y^2 - P(x) in orders <= 0 is a constraint.
    """
    vx = x.val
    if vx >= 0:
        raise ValueError("x must have a pole at infinity")
    n0 = 1 - vx
    y2 = y * y
    R = y2
    A = [Fraction(0)] * 7
    pw = [None] * 7
    acc = None
    for i in range(1, 7):
        acc = x if acc is None else acc * x
        pw[i] = acc
    for i in range(6, -1, -1):
        order = i * vx
        if order >= R.prec:
            raise InsufficientPrecisionError(f"order {order} of y^2 is beyond precision {R.prec}")
        c = Fraction(R[order])
        if c == 0:
            continue
        A[i] = c
        if i == 0:
            R = R + (-c)
        else:
            R = R - pw[i].scale(c)
    if R.prec <= 1:
        raise InsufficientPrecisionError(f"residual known only below order {R.prec}")
    P = _strip(A)
    status = OK
    if any(R[k] != 0 for k in range(min(R.val, 1), 1)):
        status = INCONSISTENT
    elif len(P) - 1 not in (5, 6) or not is_squarefree_poly(P):
        status = SINGULAR
    return FitResult(P, n0, x, y, R, status, h)


def fit_newform(spec: NewformSpec, M: Optional[int] = None, integral: Optional[bool] = None) -> FitResult:
    """hecke_expand -> (h1, h2) -> (x, y) -> P, using the integral basis for d = 1 mod 4."""
    if M is None:
        M = spec.max_known()
    raw = basis_h1_h2(spec, M)
    if integral is None:
        integral = spec.d % 4 == 1
    g1, g2 = integral_basis(*raw) if integral else raw
    if g2.is_zero():
        raise InsufficientDataError(f"all coefficients up to {M} are rational")
    x, y = build_xy(g1, g2, g2.val)
    return fit_polynomial(x, y, raw)


def residuals(fit: FitResult, M: int) -> list:
    if fit.residual.prec <= M:
        raise InsufficientPrecisionError(f"b_{M} needs precision {M + 1}, have {fit.residual.prec}")
    return [fit.residual[m] for m in range(1, M + 1)]


# genus formulas


def _phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def genus_x0(N: int) -> int:
    fac = factorize(N)
    mu = N
    for p in fac:
        mu = mu * (p + 1) // p
    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in fac:
            nu2 *= 1 + (_legendre(-1, p) if p != 2 else 0)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in fac:
            if p == 2:
                nu3 = 0  # -3 is not a square mod 2-adically: (-3/2) = -1
            elif p != 3:
                nu3 *= 1 + _legendre(-3, p)
    cusps = sum(_phi(gcd(dv, N // dv)) for dv in range(1, N + 1) if N % dv == 0)
    g = Fraction(12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps, 12)
    assert g.denominator == 1
    return int(g)


def genus_x1(N: int) -> int:
    if N <= 4:
        return 0
    fac = factorize(N)
    s = Fraction(N * N, 24)
    for p in fac:
        s *= 1 - Fraction(1, p * p)
    cusp = sum(_phi(dv) * _phi(N // dv) for dv in range(1, N + 1) if N % dv == 0)
    g = 1 + s - Fraction(cusp, 4)
    assert g.denominator == 1
    return int(g)


def genus_budget(N: int, character: Optional[DirichletCharacter] = None, dims: Optional[Sequence[int]] = None) -> tuple[int, int]:
    """(g, c) with c = 6(2g - 2) + 1.

    ``dims`` lists dim S_2(N, eps^k) for k = 1 .. ord(eps) - 1. Without it a
    nontrivial character falls back to the genus of X_1(N), which can only
    enlarge the budget.
    """
    if dims is not None:
        g = genus_x0(N) + sum(dims)
    elif character is None or character.is_trivial():
        g = genus_x0(N)
    else:
        g = genus_x1(N)
    return g, 6 * (2 * g - 2) + 1


@dataclass
class Certificate:
    level: int
    character: str
    g: int
    c: int
    verified: Optional[bool]  # None = indeterminate
    coefficients_available: int
    first_nonzero: Optional[int] = None
    note: str = ""

    @property
    def status(self) -> str:
        return {True: "verified", False: "not-verified", None: "indeterminate"}[self.verified]


def certify(spec: NewformSpec, budget: tuple[int, int], fit: Optional[FitResult] = None) -> Certificate:
    """Check b_m = 0 for 1 <= m < c using every coefficient the spec provides."""
    from .characters import format_degree_list

    g, c = budget
    avail = spec.max_known()
    char = format_degree_list(spec.character) if spec.character is not None else "1"
    level = spec.level or 0
    if fit is None:
        try:
            fit = fit_newform(spec, avail)
        except (InsufficientPrecisionError, InsufficientDataError) as e:
            return Certificate(level, char, g, c, None, avail, note=str(e))
    if fit.status == INCONSISTENT:
        return Certificate(level, char, g, c, False, avail, note="no polynomial relation y^2 = P(x)")
    if fit.status == SINGULAR:
        return Certificate(level, char, g, c, False, avail, note="P is not squarefree of degree 5 or 6")
    first = fit.first_nonzero_residual()
    if first is not None and first < c:
        return Certificate(level, char, g, c, False, avail, first, note=f"b_{first} != 0")
    if fit.residual.prec < c:
        return Certificate(level, char, g, c, None, avail, note=f"b_m known only for m < {fit.residual.prec}")
    return Certificate(level, char, g, c, True, avail)


# model changes


def transform_model(P: Sequence, M: Sequence[Sequence]) -> list[Fraction]:
    """Equation of the image of y^2 = P(x) under
    (x, y) -> ((a x + b)/(c x + d), (ad - bc) y / (c x + d)^3)."""
    (a, b), (c, d) = [[Fraction(t) for t in row] for row in M]
    det = a * d - b * c
    if det == 0:
        raise ValueError("singular transformation")
    P = [Fraction(t) for t in P] + [Fraction(0)] * (7 - len(P))
    num = [-b, d]  # d X - b
    den = [a, -c]  # -c X + a
    out = [Fraction(0)] * 7
    for i, Ai in enumerate(P):
        if Ai == 0:
            continue
        term = [Ai]
        for _ in range(i):
            term = poly_mul(term, num)
        for _ in range(6 - i):
            term = poly_mul(term, den)
        for k, t in enumerate(term):
            out[k] += t
    scale = det**4
    return _strip([t / scale for t in out])


def integral_model(fit: FitResult, d: int) -> FitResult:
    if d % 4 != 1:
        raise ValueError("the integral model only applies when d = 1 mod 4")
    if fit.h is None:
        raise ValueError("fit does not carry its (h1, h2) basis")
    g1, g2 = integral_basis(*fit.h)
    x, y = build_xy(g1, g2, g2.val)
    return fit_polynomial(x, y, fit.h)
