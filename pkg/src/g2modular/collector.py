"""The collecting program: bounded search for (P, {a_n}, k, d) candidates.

Coefficients a_p are written u + v*w with w = w_d (d = 1 mod 4) or sqrt(d), so
integrality is just u, v in Z. a_2, a_3, a_5 are enumerated. Once a_{n0} is
fixed every a_n (n <= M) is affine in each remaining a_p, so the residual
equations are exact polynomials in the unknown coordinates. They are solved in
small groups, by the rows whose newest unknown lies in the group, with an
enumeration over the bounded lattice whenever the solve is not unique. Every
candidate is verified again numerically at full precision.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import isqrt
from typing import Iterable, Optional, Sequence

from flint import ctx as _flint_ctx
from flint import fmpq as mpq
from flint import fmpq_mpoly_ctx, fmpq_series

from .arith import QuadRat
from .characters import factorize, zeta12
from .curvefit import is_squarefree_poly
from .newform import NewformSpec, hecke_coefficients, next_prime, primes_upto

log = logging.getLogger(__name__)

NO_TWIST_N0_2 = (2, 3, 5, 6, 7, 13, 17, 21, 29)
NO_TWIST_N0_3 = (2, 3, 5, 6, 7, 10, 11, 13, 17, 21, 29, 33, 37, 41)
TWIST_N0_2 = (-1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7)
TWIST_N0_3 = TWIST_N0_2 + (10, -10, 11, -11)

_EPS_VALUES = {
    1: (QuadRat(1), QuadRat(0)),
    2: (QuadRat(1), QuadRat(-1), QuadRat(0)),
    3: (zeta12(0), zeta12(4), zeta12(8), QuadRat(0)),
    4: (zeta12(0), zeta12(3), zeta12(6), zeta12(9), QuadRat(0)),
    6: (zeta12(0), zeta12(2), zeta12(4), zeta12(6), zeta12(8), zeta12(10), QuadRat(0)),
}


@dataclass(frozen=True)
class SearchCell:
    d: int
    n0: int
    twist: Optional[int]  # None: the eps = 1 program; otherwise ord(eps) for the extra-twist program
    epsilon2: tuple = ()
    epsilon3: tuple = ()

    @property
    def program(self) -> str:
        return "no_twist" if self.twist is None else "twist"

    @property
    def k(self) -> int:
        return 1 if self.twist is None else self.twist

    @property
    def degree(self) -> int:
        return 6 if self.n0 == 2 else 5

    @property
    def default_M(self) -> int:
        return 16 if self.n0 == 2 else 22

    @property
    def M2(self) -> int:
        """M'': how many coefficients a solution keeps."""
        return 7 if self.n0 == 2 else 11

    def label(self) -> str:
        tw = "none" if self.twist is None else str(self.twist)
        return f"d={self.d} twist={tw} n0={self.n0}"


def make_cell(d: int, twist: Optional[int], n0: int) -> SearchCell:
    eps = _EPS_VALUES[1 if twist is None else twist]
    cell = SearchCell(d, n0, twist, eps, eps)
    _check_cell(cell)
    return cell


def _check_cell(cell: SearchCell) -> None:
    d, n0, tw = cell.d, cell.n0, cell.twist
    if n0 not in (2, 3):
        raise ValueError("n0 must be 2 or 3")
    if tw is None:
        allowed = NO_TWIST_N0_2 if n0 == 2 else NO_TWIST_N0_3
    else:
        allowed = TWIST_N0_2 if n0 == 2 else TWIST_N0_3
        if tw == 1 and d < 0 or tw == 2 and d > 0:
            allowed = ()
        if tw in (3, 6) and d != -3 or tw == 4 and d != -1:
            allowed = ()
        if tw not in (1, 2, 3, 4, 6):
            allowed = ()
    if d not in allowed:
        raise ValueError(f"cell ({cell.label()}) is outside the table of admissible d")


def enumerate_cells() -> list[SearchCell]:
    cells = []
    for n0, ds in ((3, NO_TWIST_N0_3), (2, NO_TWIST_N0_2)):
        for d in ds:
            cells.append(make_cell(d, None, n0))
    for tw in (1, 2, 3, 4, 6):
        for n0, ds in ((3, TWIST_N0_3), (2, TWIST_N0_2)):
            for d in ds:
                try:
                    cells.append(make_cell(d, tw, n0))
                except ValueError:
                    continue
    return cells


@dataclass(frozen=True)
class Solution:
    P: tuple  # Fractions A_0..A_deg
    d: int
    k: int
    n0: int
    ap: tuple  # ((p, a_p), ...) for all primes <= M
    eps2: QuadRat
    eps3: QuadRat
    program: str = "twist"
    M: int = 16

    @property
    def M2(self) -> int:
        return 7 if self.n0 == 2 else 11

    def spec(self) -> NewformSpec:
        return NewformSpec(self.d, dict(self.ap), eps={2: self.eps2, 3: self.eps3})

    @cached_property
    def coefficients(self) -> tuple:
        """a_2 .. a_{M''}."""
        return tuple(hecke_coefficients(self.spec(), self.M2)[2:])

    def key(self) -> tuple:
        return (self.P, self.coefficients, self.k, self.d)

    def conjugate_key(self) -> tuple:
        return (self.P, tuple(c.conjugate() for c in self.coefficients), self.k, self.d)

    def order_key(self) -> tuple:
        return (tuple(self.P), tuple((c.a, c.b) for c in self.coefficients))

    def curve(self):
        from .hyperelliptic import GenusTwoCurve

        return GenusTwoCurve.from_rational(self.P)


def dedup_conjugates(solutions: Iterable[Solution]) -> list[Solution]:
    """One representative per (P, {a_n}_{n<=M''}, k, d) up to conjugating the a_n."""
    best: dict[tuple, Solution] = {}
    order = []
    for s in solutions:
        assert any(not c.is_rational() for c in s.coefficients), "n0 <= 3 <= M'' forces an irrational a_n"
        k1, k2 = s.key(), s.conjugate_key()
        key = k1 if k1 in best else (k2 if k2 in best else None)
        if key is None:
            best[k1] = s
            order.append(k1)
        elif s.order_key() < best[key].order_key():
            best[key] = s
    return [best[k] for k in order]


# fast exact evaluation of y^2 - P(x) from prime coefficients


def _coeff(S, j):
    c = S.coeffs()
    return c[j] if j < len(c) else mpq(0)


def _padded(S, L):
    c = S.coeffs()
    return c + [mpq(0)] * (L - len(c))


class _Evaluator:
    """Evaluates residual constraints for a cell from a_p given as (u, v) pairs."""

    def __init__(self, cell: SearchCell, M: int) -> None:
        self.cell = cell
        self.d = cell.d
        self.n0 = cell.n0
        self.M = M
        self.w_basis = cell.d % 4 == 1
        self.integral = self.w_basis
        self.deg = cell.degree
        self.primes = primes_upto(M)
        self.fac = [None, None] + [tuple(factorize(n).items()) for n in range(2, max(M, 2) + 1)]
        self._orders: dict[int, list[int]] = {}

    def to_xy(self, uv):
        """(u, v) in the w or sqrt basis -> (x, y) with a = x + y sqrt(d)."""
        u, v = uv
        if self.w_basis:
            return (mpq(u) + mpq(v, 2), mpq(v, 2))
        return (mpq(u), mpq(v))

    def quad(self, uv) -> QuadRat:
        x, y = self.to_xy(uv)
        return QuadRat(Fraction(int(x.numerator), int(x.denominator)), Fraction(int(y.numerator), int(y.denominator)), self.d)

    def coefficients(self, assign: dict, eps: dict, K: int):
        """a_1..a_K as (x, y) pairs from prime data (x, y) and eps(2), eps(3) as (x, y)."""
        d = self.d
        one = (mpq(1), mpq(0))

        def mul(p, q):
            return (p[0] * q[0] + d * p[1] * q[1], p[0] * q[1] + p[1] * q[0])

        a = [None, one]
        pp: dict[int, list] = {}
        for n in range(2, K + 1):
            v = one
            for p, k in self.fac[n]:
                seq = pp.get(p)
                if seq is None:
                    seq = pp[p] = [one, assign[p]]
                while len(seq) <= k:
                    e = eps[p]
                    t = mul(e, seq[-2])
                    prev = mul(seq[-1], assign[p])
                    seq.append((prev[0] - p * t[0], prev[1] - p * t[1]))
                v = mul(v, seq[k])
            a.append(v)
        return a

    def evaluate(self, assign: dict, eps: dict, K: int):
        """(constraints, A, prec): residual coefficients of y^2 - P(x) at non-pivot
        orders below the first unknown pivot, the known A_i, and the precision."""
        n0 = self.n0
        a = self.coefficients(assign, eps, K)
        if self.integral:
            G1 = [a[j][0] + a[j][1] for j in range(1, K + 1)]
            G2 = [2 * a[j][1] for j in range(n0, K + 1)]
        else:
            G1 = [a[j][0] for j in range(1, K + 1)]
            G2 = [a[j][1] for j in range(n0, K + 1)]
        L = len(G2)
        if L <= 0 or G2[0] == 0:
            raise ValueError("c_{n0} must be nonzero")
        if _flint_ctx.cap < L:
            _flint_ctx.cap = L  # flint truncates every series to this global cap
        g2 = fmpq_series(G2, prec=L)
        X = fmpq_series(G1[:L], prec=L) / g2
        X = X * (1 / _coeff(X, 0))
        xc = _padded(X, L)
        D = fmpq_series([(1 - n0 + j) * xc[j] for j in range(L)], prec=L)
        Y = D / g2
        Y = Y * (1 / _coeff(Y, 0))
        vy2 = 2 - 4 * n0
        vx = 1 - n0
        prec = vy2 + L
        Y2 = Y * Y
        y2 = _padded(Y2, L)  # y2[j] is the coefficient of q^(vy2 + j)
        powers = {}
        acc = None
        for i in range(1, self.deg + 1):
            acc = X if acc is None else acc * X
            powers[i] = (acc, _padded(acc, L))
        # A_i from the pivots, top down: x^i has leading coefficient 1 at order i*vx
        A = [None] * 7
        stop = prec
        for i in range(self.deg, -1, -1):
            order = i * vx
            if order >= prec:
                stop = order
                break
            c = y2[order - vy2]
            for k in range(i + 1, self.deg + 1):
                if A[k]:
                    c -= A[k] * powers[k][1][order - k * vx]
            A[i] = c
        R = y2
        for i in range(self.deg, 0, -1):
            c = A[i]
            if c:
                off = i * vx - vy2
                pc = powers[i][1]
                for j in range(L - off):
                    R[off + j] -= c * pc[j]
        if A[0]:
            R[-vy2] -= A[0]
        pivots = {i * vx for i in range(self.deg + 1)}
        cons = [(o, R[o - vy2]) for o in range(vy2, stop) if o not in pivots]
        return cons, A, prec

    def constraint_orders(self, K: int) -> list[int]:
        if K not in self._orders:
            rng = random.Random(K)
            assign = {p: (mpq(rng.randint(1, 9), 7), mpq(rng.randint(1, 9), 5)) for p in self.primes if p <= K}
            eps = {2: (mpq(1), mpq(0)), 3: (mpq(1), mpq(0))}
            cons, _, _ = self.evaluate(assign, eps, K)
            self._orders[K] = [o for o, _ in cons]
        return self._orders[K]

    def symbolic(self, known: dict, eps: dict, unknown: Sequence[int], K: Optional[int] = None):
        """Residual constraints up to a_K (default M) as exact polynomials in (u_p, v_p) of the unknown primes.

        Series in q are polynomials in an extra variable q (index 0) reduced mod q^L;
        a_{n0} must be known, so every division is by a constant."""
        names = ("q",) + tuple(f"{c}{p}" for p in unknown for c in "uv")
        ctx = fmpq_mpoly_ctx.get(names, "lex")
        q, *gens = ctx.gens()
        assign = dict(known)
        for t, p in enumerate(unknown):
            u, v = gens[2 * t], gens[2 * t + 1]
            assign[p] = (u + v * mpq(1, 2), v * mpq(1, 2)) if self.w_basis else (u, v)
        n0, K = self.n0, K or self.M
        a = self.coefficients(assign, eps, K)
        if self.integral:
            G1 = [a[j][0] + a[j][1] for j in range(1, K + 1)]
            G2 = [2 * a[j][1] for j in range(n0, K + 1)]
        else:
            G1 = [a[j][0] for j in range(1, K + 1)]
            G2 = [a[j][1] for j in range(n0, K + 1)]
        L = len(G2)
        qL = q**L

        def series(cs):
            return sum((c * q**j for j, c in enumerate(cs) if c != 0), ctx.from_dict({}))

        def coeff(S, j):
            return (S % q ** (j + 1)) // q**j

        def const(S):
            return _const(coeff(S, 0))

        g2 = series(G2)
        inv = ctx.constant(1 / const(g2))
        prec = 1
        while prec < L:
            prec = min(2 * prec, L)
            inv = (inv * (2 - g2 * inv)) % q**prec
        X = (series(G1[:L]) * inv) % qL
        X = X * (1 / const(X))
        D = (1 - n0) * X + q * X.derivative("q")
        Y = (D * inv) % qL
        Y = Y * (1 / const(Y))
        vy2, vx = 2 - 4 * n0, 1 - n0
        prec = vy2 + L
        y2 = (Y * Y) % qL
        powers = {1: X}
        for i in range(2, self.deg + 1):
            powers[i] = (powers[i - 1] * X) % qL
        A = [None] * 7
        stop = prec
        for i in range(self.deg, -1, -1):
            order = i * vx
            if order >= prec:
                stop = order
                break
            A[i] = coeff(y2, order - vy2) - sum((A[k] * coeff(powers[k], order - k * vx) for k in range(i + 1, self.deg + 1)), ctx.from_dict({}))
        R = y2
        for i in range(self.deg, -1, -1):
            if A[i] is not None:
                R -= A[i] * q ** (i * vx - vy2) * (powers[i] if i else 1)
        R %= qL
        pivots = {i * vx for i in range(self.deg + 1)}
        return ctx, [coeff(R, o - vy2) for o in range(vy2, stop) if o not in pivots]


def _const(c) -> mpq:
    if not c.is_constant():
        raise ValueError("expected a constant leading coefficient")
    return mpq(0) if c.is_zero() else c.leading_coefficient()


# lattices and admissibility


def _lattice(d: int, p: int) -> list[tuple[int, int]]:
    """(u, v) with u + v*w (or u + v*sqrt d) an integer of Q(sqrt d) inside the Weil box."""
    w_basis = d % 4 == 1
    bound = 4 * p
    out = []
    vmax = isqrt(16 * p // abs(d)) + 2
    umax = isqrt(16 * p) + vmax + 2
    for v in range(-vmax, vmax + 1):
        for u in range(-umax, umax + 1):
            z = QuadRat(u, 0, d) + (QuadRat.w(d) if w_basis else QuadRat.sqrt(d)) * v
            if z.abs_squared_bound(bound):
                out.append((u, v))
    out.sort(key=lambda t: (abs(t[1]), t[1], abs(t[0]), t[0]))
    return out


class _Rules:
    """Per-cell admissibility of a_p (twist pattern, ramified shapes)."""

    def __init__(self, cell: SearchCell) -> None:
        self.cell = cell
        self.eps_values = [e for e in _EPS_VALUES[cell.k] if e != 0]

    def trivial_eps(self) -> bool:
        return self.cell.twist in (None, 1)

    def good_shape(self, a: QuadRat, e: QuadRat) -> bool:
        tw = self.cell.twist
        if tw is None:
            return True
        if tw == 1:
            return a.a == 0 or a.b == 0
        return a == e * a.conjugate()

    def bad_shape(self, a: QuadRat, p: int) -> bool:
        if self.trivial_eps():
            return a.b == 0 and a.a in (0, 1, -1)
        return a.norm() in (0, 1, p)

    def allowed(self, p: int, a: QuadRat, e: Optional[QuadRat]) -> bool:
        """e is the known eps(p) (p = 2, 3) or None when eps(p) is free."""
        if e is not None:
            return self.bad_shape(a, p) if e == 0 else self.good_shape(a, e)
        return self.bad_shape(a, p) or any(self.good_shape(a, ev) for ev in self.eps_values)


def _rref(rows: list, n: int):
    """Reduced row echelon form of augmented rows over Q: (pivot columns, rows) or None if inconsistent."""
    rows = [[mpq(x) for x in r] for r in rows]
    piv = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    if any(rows[i][n] != 0 for i in range(r, len(rows))):
        return None
    return piv, rows[:r]


class _System:
    """Residual polynomials split by the plan group of their newest unknown.

    A row affine in its group's unknowns is kept as (constant, linear coefficients),
    each a polynomial in earlier unknowns; the remaining rows are checked once the
    group is assigned."""

    def __init__(self, ctx, polys: list, plan: list[list[int]], unknown: list[int]) -> None:
        self.ctx = ctx
        self.nvars = 1 + 2 * len(unknown)  # variable 0 is the series variable, absent here
        group_of = {}
        for g, grp in enumerate(plan):
            for p in grp:
                t = unknown.index(p)
                group_of[1 + 2 * t] = group_of[2 + 2 * t] = g
        self.gvars = [[1 + 2 * unknown.index(p) + c for p in grp for c in (0, 1)] for grp in plan]
        self.rows: list[list] = [[] for _ in plan]
        self.checks: list[list] = [[] for _ in plan]
        self.feasible = True
        for q in polys:
            if q == 0:
                continue
            degs = q.degrees()
            used = [i for i, e in enumerate(degs) if e > 0]
            if not used:
                self.feasible = False
                return
            g = max(group_of[i] for i in used)
            gv = self.gvars[g]
            terms = q.to_dict()
            if all(sum(m[i] for i in gv) <= 1 for m in terms):
                parts = [dict() for _ in range(len(gv) + 1)]
                for m, c in terms.items():
                    hit = [k for k, i in enumerate(gv) if m[i]]
                    rest = tuple(0 if i in gv else e for i, e in enumerate(m))
                    parts[hit[0] + 1 if hit else 0][rest] = c
                self.rows[g].append([ctx.from_dict(part) for part in parts])
            else:
                self.checks[g].append(q)


class _Search:
    def __init__(self, cell: SearchCell, M: int) -> None:
        self.cell = cell
        self.M = M
        self.ev = _Evaluator(cell, M)
        self.rules = _Rules(cell)
        self.primes = primes_upto(M)
        self.unknown = [p for p in self.primes if p > 5]
        # P and a_n (n <= M'') are fixed once these primes are: beyond them only existence matters
        self.head = 7 if cell.degree == 6 else 13
        self.plan = self._plan()
        self.found_heads: set = set()
        self._cands: dict = {}
        self.lattices: dict[int, list] = {}
        self.allowed_sets: dict[int, set] = {}
        self.quads: dict[tuple, QuadRat] = {}
        self.out: list[Solution] = []
        self.stats = {"evaluations": 0, "systems": 0, "free_points": 0}

    def _plan(self) -> list[list[int]]:
        # groups solved together from the rows whose newest unknown lies in the group
        first = [[7]] if self.cell.degree == 6 else [[7], [11]]
        plan = [g for g in first if g[0] <= self.M]
        done = {p for g in plan for p in g}
        rest = [p for p in self.unknown if p not in done]
        if rest:
            plan.append(rest)
        return plan

    def head_key(self, assign_uv, eps_q, extra=None) -> tuple:
        vals = dict(assign_uv)
        if extra:
            vals.update(extra)
        return (eps_q, tuple(vals.get(p) for p in self.primes if p <= self.head))

    def K_after(self, p: int) -> int:
        return min(next_prime(p) - 1, self.M)

    def lattice(self, p: int) -> list:
        if p not in self.lattices:
            self.lattices[p] = _lattice(self.cell.d, p)
        return self.lattices[p]

    def quad(self, uv) -> QuadRat:
        q = self.quads.get(uv)
        if q is None:
            q = self.quads[uv] = self.ev.quad(uv)
        return q

    def candidates(self, p: int, e: Optional[QuadRat]) -> list:
        key = (p, e)
        if key not in self._cands:
            self._cands[key] = self._candidates(p, e)
        return self._cands[key]

    def _candidates(self, p: int, e: Optional[QuadRat]) -> list:
        n0 = self.cell.n0
        out = []
        for uv in self.lattice(p):
            a = self.quad(uv)
            if p < n0 and not a.is_rational():
                continue
            if p == n0 and a.b <= 0:
                continue  # c_{n0} > 0 picks one of each conjugate pair
            if self.rules.allowed(p, a, e):
                out.append(uv)
        return out

    def allowed_set(self, p: int) -> set:
        if p not in self.allowed_sets:
            self.allowed_sets[p] = set(self.candidates(p, None))
        return self.allowed_sets[p]

    def eps_xy(self, e: QuadRat):
        if e.d not in (0, self.cell.d):
            return None
        return (mpq(e.a.numerator, e.a.denominator), mpq(e.b.numerator, e.b.denominator))

    def consistent(self, assign, eps, K) -> bool:
        self.stats["evaluations"] += 1
        cons, _, _ = self.ev.evaluate(assign, eps, K)
        return all(v == 0 for _, v in cons)

    def run(self) -> list[Solution]:
        cell = self.cell
        for e2, e3 in product(cell.epsilon2, cell.epsilon3):
            ex2, ex3 = self.eps_xy(e2), self.eps_xy(e3)
            if ex2 is None or ex3 is None:
                continue
            self.extend({}, {}, {2: ex2, 3: ex3}, (e2, e3), 0)
        return self.out

    def extend(self, assign_uv, assign, eps, eps_q, idx) -> None:
        if idx < len(self.primes) and self.primes[idx] <= 5:
            self.enumerate_prime(self.primes[idx], assign_uv, assign, eps, eps_q, idx)
        elif not self.plan:
            self.finish(assign_uv, assign, eps, eps_q)
        else:
            # the first group alone at its own precision is cheap and prunes most states;
            # the rest is built once per surviving value of it
            first = self.plan[0]
            rest = self.plan[1:]
            unknown = [p for g in rest for p in g]

            def stage2():
                self.solve_system(rest, unknown, None, assign_uv, assign, eps, eps_q, lambda: self.finish(assign_uv, assign, eps, eps_q))

            self.solve_system([first], first, self.K_after(first[-1]), assign_uv, assign, eps, eps_q, stage2 if rest else lambda: self.finish(assign_uv, assign, eps, eps_q))

    def solve_system(self, plan, unknown, K, assign_uv, assign, eps, eps_q, then) -> None:
        self.stats["systems"] += 1
        ctx, polys = self.ev.symbolic(assign, eps, unknown, K)
        system = _System(ctx, polys, plan, unknown)
        if system.feasible:
            args = [mpq(0)] * system.nvars
            self.solve_group(system, plan, 0, args, assign_uv, assign, eps, eps_q, then)

    def enumerate_prime(self, p, assign_uv, assign, eps, eps_q, idx) -> None:
        e = eps_q[0] if p == 2 else eps_q[1] if p == 3 else None
        K = self.K_after(p)
        for uv in self.candidates(p, e):
            assign_uv[p] = uv
            assign[p] = self.ev.to_xy(uv)
            if K < self.cell.n0 or self.consistent(assign, eps, K):
                self.extend(assign_uv, assign, eps, eps_q, idx + 1)
            del assign_uv[p], assign[p]

    def solve_group(self, system: _System, plan, g: int, args, assign_uv, assign, eps, eps_q, then) -> None:
        if g == len(plan):
            then()
            return
        group = plan[g]
        gv = system.gvars[g]
        n = len(gv)
        rows = [[c(*args) for c in row[1:]] + [-row[0](*args)] for row in system.rows[g]]
        red = _rref(rows, n)
        if red is None:
            return
        piv, rows = red
        free = [c for c in range(n) if c not in piv]
        box = []
        for c in range(n):
            box.append(sorted({uv[c % 2] for uv in self.allowed_set(group[c // 2])}))
        if any(not b for b in box):
            return
        for vec in self._free_points(piv, rows, free, box, n):
            self.stats["free_points"] += 1
            values = {}
            for t, p in enumerate(group):
                uv = (int(vec[2 * t]), int(vec[2 * t + 1]))
                if uv not in self.allowed_set(p):
                    break
                values[p] = uv
            else:
                if group[0] > self.head and self.head_key(assign_uv, eps_q) in self.found_heads:
                    return
                if group[-1] >= self.head and self.head_key(assign_uv, eps_q, values) in self.found_heads:
                    continue
                for i, v in zip(gv, vec):
                    args[i] = mpq(v)
                if all(q(*args) == 0 for q in system.checks[g]):
                    for p, uv in values.items():
                        assign_uv[p] = uv
                        assign[p] = self.ev.to_xy(uv)
                    self.solve_group(system, plan, g + 1, args, assign_uv, assign, eps, eps_q, then)
                    for p in values:
                        del assign_uv[p], assign[p]
        for i in gv:
            args[i] = mpq(0)

    @staticmethod
    def _free_points(piv, rows, free, box, n):
        """Integer points of the affine solution set inside the coordinate box, by branch and bound."""
        lo = [b[0] for b in box]
        hi = [b[-1] for b in box]
        vec = [mpq(0)] * n

        def feasible(k):
            # free[:k] assigned; bound every pivot variable over the rest of the box
            for r, pc in enumerate(piv):
                row = rows[r]
                mid = row[n] - sum(row[c] * vec[c] for c in free[:k])
                a = b = mid
                for c in free[k:]:
                    t = row[c]
                    if t > 0:
                        a -= t * hi[c]
                        b -= t * lo[c]
                    elif t < 0:
                        a -= t * lo[c]
                        b -= t * hi[c]
                if b < lo[pc] or a > hi[pc]:
                    return False
            return True

        def rec(k):
            if not feasible(k):
                return
            if k == len(free):
                for r, pc in enumerate(piv):
                    x = rows[r][n] - sum(rows[r][c] * vec[c] for c in free)
                    if x.denominator != 1:
                        return
                    vec[pc] = x
                yield list(vec)
                return
            c = free[k]
            for v in box[c]:
                vec[c] = mpq(v)
                yield from rec(k + 1)
            vec[c] = mpq(0)

        yield from rec(0)

    def finish(self, assign_uv, assign, eps, eps_q) -> None:
        self.stats["evaluations"] += 1
        cons, A, _ = self.ev.evaluate(assign, eps, self.M)
        deg = self.cell.degree
        if any(v != 0 for _, v in cons) or any(c is None for c in A[: deg + 1]):
            return
        P = [Fraction(int(c.numerator), int(c.denominator)) for c in A[: deg + 1]]
        if P[-1] == 0 or not is_squarefree_poly(P):
            return
        hk = self.head_key(assign_uv, eps_q)
        if hk in self.found_heads:
            return
        self.found_heads.add(hk)
        ap = tuple((p, self.quad(assign_uv[p])) for p in self.primes)
        self.out.append(Solution(tuple(P), self.cell.d, self.cell.k, self.cell.n0, ap, eps_q[0], eps_q[1], self.cell.program, self.M))


def search(cell: SearchCell, M: Optional[int] = None) -> list[Solution]:
    """All solutions of a cell, one per (P, a_n for n <= M'', eps(2), eps(3)); c_{n0} > 0."""
    M = M or cell.default_M
    s = _Search(cell, M)
    out = s.run()
    log.info("cell %s: %d solutions, stats %s", cell.label(), len(out), s.stats)
    return out
