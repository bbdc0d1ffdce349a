"""Acceptance suite: one recorded PASS/FAIL/SKIP line per criterion (see the terminal summary)."""

import os
import random
import warnings
from collections import defaultdict
from fractions import Fraction
from importlib import resources
from math import gcd

import pytest

from g2modular.arith import QuadRat
from g2modular.collector import SearchCell, dedup_conjugates, enumerate_cells, make_cell, search
from g2modular.curvefit import (
    certify,
    fit_newform,
    genus_budget,
    is_squarefree_poly,
    poly_mul,
    residuals,
    transform_model,
)
from g2modular.hyperelliptic import (
    GenusTwoCurve,
    clebsch_invariants,
    count_points,
    count_points_naive,
    eichler_shimura_quartic,
    frobenius_poly,
    frobenius_power,
    has_extra_involution,
    q_isomorphic,
    sieve1_check,
    weighted_class_key,
)
from g2modular.ingest import read_newforms, load_tables
from g2modular.newform import epsilon_from_twist, hecke_coefficients, n0, primes_upto
from g2modular.pipeline import REFERENCE, TWIST, matches_row, run_sieves, solution_from_row

ROWS = load_tables()
TABLE1 = [r for r in ROWS if r.table == 1]
TABLE2 = [r for r in ROWS if r.table == 2]


def test_criterion_1_table_regression(criterion):
    bad = []
    for row in ROWS:
        fit = fit_newform(row.spec(), 16)
        exact = [Fraction(c) for c in row.poly]
        if not fit.ok or fit.P != exact or any(b != 0 for b in residuals(fit, fit.residual.prec - 1)):
            bad.append(row.label)
    criterion(1, not bad, f"{len(ROWS) - len(bad)}/{len(ROWS)} rows reproduced" + (f", failing {bad}" if bad else ""))
    assert not bad


def test_criterion_2_degree_dichotomy(criterion):
    bad = [r.label for r in ROWS if {2: 6, 3: 5}.get(n0(r.spec())) != len(r.poly) - 1]
    criterion(2, not bad, f"{len(ROWS) - len(bad)}/{len(ROWS)} rows with n0 = 2 <=> deg 6, n0 = 3 <=> deg 5")
    assert not bad


def test_criterion_3_eichler_shimura(criterion):
    checked, skipped, bad = 0, 0, []
    for row in ROWS:
        spec = row.spec()
        curve = GenusTwoCurve(row.poly)
        trivial = row.character().is_trivial()
        for p in primes_upto(13):
            if not curve.is_good(p) or row.level % p == 0:
                continue
            a = spec.a(p)
            e = QuadRat(1) if trivial else epsilon_from_twist(spec, p)
            if e is None:
                skipped += 1
                continue
            expected = tuple(c.a for c in eichler_shimura_quartic(a, e, p))
            checked += 1
            if tuple(Fraction(c) for c in frobenius_poly(curve, p).Qp) != expected:
                bad.append((row.label, p))
    criterion(3, not bad, f"{checked - len(bad)}/{checked} (row, p) pairs match, {skipped} skipped (a_p = 0, eps(p) unknown)")
    assert checked and not bad


def test_criterion_4_sieve1(criterion):
    bad = []
    for row in TABLE1:
        chi = row.character()
        n = 2 if chi.is_trivial() else chi.order()
        res = sieve1_check(GenusTwoCurve(row.poly), n, 100)
        if not res.passed:
            bad.append((row.label, res.witness))
    criterion(4, not bad, f"{len(TABLE1) - len(bad)}/{len(TABLE1)} Table-1 curves pass sieve 1")
    assert not bad


def test_criterion_5_involutions_and_classes(criterion):
    bad = []
    for row in TABLE2:
        if has_extra_involution(GenusTwoCurve(row.poly)).kind != "none":
            bad.append(row.label)
    for row in TABLE1:
        if has_extra_involution(GenusTwoCurve(row.poly)).kind != "over_Qbar":
            bad.append(row.label)
    classes = {weighted_class_key(clebsch_invariants(list(r.poly))) for r in ROWS}
    ok = not bad and len(classes) == 99
    criterion(5, ok, f"{len(ROWS) - len(bad)}/{len(ROWS)} involution verdicts as tabulated, {len(classes)} weighted classes (expected 99)")
    assert not bad
    assert len(classes) == 99


EMPTY_CELLS = [(10, None, 3), (10, 1, 3), (33, None, 3), (37, None, 3), (41, None, 3)]
COUNT_TARGETS = {(3, None, 3): 302, (3, None, 2): 7}


def _pair(e):
    return tuple(sorted({e, e.conjugate()}, key=lambda x: (x.a, x.b)))


def _row_cells():
    groups = defaultdict(list)
    for r in ROWS:
        s = solution_from_row(r)
        twist = None if r.table == 2 else s.k
        # the collector keeps one conjugate (c_{n0} > 0), whose character is conjugated too
        groups[SearchCell(s.d, s.n0, twist, _pair(s.eps2), _pair(s.eps3))].append(r)
    return groups


@pytest.mark.slow
def test_criterion_6_collector_closure(criterion):
    missing = []
    groups = _row_cells()
    for cell, rows in groups.items():
        sols = search(cell)
        missing += [r.label for r in rows if not any(matches_row(s, r) for s in sols)]
    nonempty = [c for c in EMPTY_CELLS if search(make_cell(*c))]
    notes = []
    for (d, twist, n0_), target in COUNT_TARGETS.items():
        got = len(dedup_conjugates(search(make_cell(d, twist, n0_))))
        notes.append(f"d={d} eps=1 deg {6 if n0_ == 2 else 5}: {got} (reference {target})")
        if got != target:
            warnings.warn(f"informational count differs: d={d}, n0={n0_}: {got} vs {target}")
    if os.environ.get("G2MODULAR_FULL_SWEEP"):
        total = sum(len(dedup_conjugates(search(c))) for c in enumerate_cells() if c.twist is not None)
        notes.append(f"twist total {total} (reference 1752)")
    else:
        notes.append("twist total not recomputed (set G2MODULAR_FULL_SWEEP=1)")
    ok = not missing and not nonempty
    criterion(6, ok, f"{len(ROWS) - len(missing)}/{len(ROWS)} rows re-emitted, "
                     f"{len(EMPTY_CELLS) - len(nonempty)}/{len(EMPTY_CELLS)} empty cells empty; informational: " + "; ".join(notes))
    assert not missing, missing
    assert not nonempty, nonempty


@pytest.mark.slow
def test_criterion_7_sieve_trajectory(criterion):
    # the degree-6 part of the twist program; the full 1752-candidate run takes hours
    sols = []
    for cell in enumerate_cells():
        if cell.twist is not None and cell.n0 == 2:
            sols += dedup_conjugates(search(cell))
    report, survivors = run_sieves(sols, TWIST)
    traj = " -> ".join(map(str, report.counts))
    ref = " -> ".join(str(r) for r in REFERENCE[TWIST])
    dev = report.deviations()
    if dev:
        warnings.warn("sieve trajectory differs from the reference: " + ", ".join(f"{s}: {o} vs {r}" for s, o, r in dev))
    deg6_rows = sum(1 for r in TABLE1 if len(r.poly) == 7)
    kept = sum(1 for r in TABLE1 if len(r.poly) == 7 and any(matches_row(s, r) for s in survivors))
    criterion(7, True, f"informational: deg-6 twist candidates {traj} (full-run reference {ref}); "
                       f"{kept}/{deg6_rows} deg-6 Table-1 curves among the survivors")
    assert kept == deg6_rows


S2_36 = resources.files("g2modular") / "data" / "s2_36.txt"


def _elliptic_trace(p):
    # E: y^2 = x^3 - 1701 x + 26973, the level-324 curve whose twist gives the S_2(36, eps) form
    s = 0
    for x in range(p):
        r = (x**3 - 1701 * x + 26973) % p
        if r:
            s += 1 if pow(r, (p - 1) // 2, p) == 1 else -1
    return -s


def test_criterion_8_negative_case(criterion):
    if not S2_36.is_file():
        criterion(8, None, "no coefficient data for the S_2(36, eps) newform")
        pytest.skip("no coefficient data for the S_2(36, eps) newform")
    with resources.as_file(S2_36) as path:
        (f,) = read_newforms(path)
    # the data must be the form it claims to be
    for p in primes_upto(f.max_known()):
        if p > 3:
            assert f.a(p) * f.character.eval(p) == _elliptic_trace(p), p
    budget = genus_budget(f.level, f.character)
    cert = certify(f, budget)
    fit = fit_newform(f)
    vanishing = fit.ok and fit.first_nonzero_residual() is None
    C = tuple(int(c) for c in poly_mul(poly_mul([0, 1], [-1, 1]), [1, -3, 0, 1]))  # x (x - 1)(x^3 - 3x + 1)
    assert C == (0, -1, 4, -3, -1, 1)
    present = [r.label for r in ROWS if q_isomorphic(GenusTwoCurve(C), GenusTwoCurve(r.poly))]
    ok = cert.verified is False and not vanishing and not present
    criterion(8, ok, f"certify: {cert.status} ({cert.note}), g = {cert.g}, c = {cert.c}, "
                     f"{cert.coefficients_available} coefficients; curve matched by {present or 'no row'}")
    assert ok


def _random_curve(rng):
    while True:
        deg = rng.choice((5, 6))
        P = [rng.randint(-9, 9) for _ in range(deg)] + [rng.choice((-3, -2, -1, 1, 2, 3))]
        if is_squarefree_poly(P):
            return GenusTwoCurve(tuple(P))


def test_criterion_9_oracles(criterion):
    rng = random.Random(20011)
    small = [p for p in primes_upto(50) if p > 2]
    counts = 0
    for _ in range(100):
        curve = _random_curve(rng)
        p = rng.choice([q for q in small if curve.is_good(q)])
        for k in (1, 2) if p < 20 else (1,):
            assert count_points(curve, p, k) == count_points_naive(curve, p, k), (curve, p, k)
            counts += 1
    powers = 0
    for _ in range(30):
        curve = _random_curve(rng)
        p = rng.choice([q for q in small[:8] if curve.is_good(q)])
        Q = frobenius_poly(curve, p).Qp
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        assert frobenius_power(frobenius_power(Q, m), n) == frobenius_power(Q, m * n)
        powers += 1
    moebius = 0
    for _ in range(30):
        row = rng.choice(ROWS)
        while True:
            M = [[rng.randint(-5, 5) for _ in range(2)] for _ in range(2)]
            if M[0][0] * M[1][1] - M[0][1] * M[1][0]:
                break
        image = transform_model(row.poly, M)
        lam = Fraction(rng.randint(1, 7), rng.randint(1, 7))
        image = [lam * lam * c for c in image]
        assert weighted_class_key(clebsch_invariants(image + [0] * (7 - len(image)))) == weighted_class_key(
            clebsch_invariants(list(row.poly)))
        moebius += 1
    hecke = 0
    for _ in range(100):
        row = rng.choice(ROWS)
        m, n = rng.randint(1, 13), rng.randint(1, 13)
        if gcd(m, n) != 1:
            continue
        ap = {p: QuadRat(0, 0, row.d) for p in primes_upto(m * n)}
        ap.update(row.spec().ap)
        spec = row.spec()
        a = hecke_coefficients(type(spec)(spec.d, ap, spec.level, spec.character), m * n)
        assert a[m * n] == a[m] * a[n]
        hecke += 1
    criterion(9, True, f"{counts} point-count pairs, {powers} composition laws, {moebius} Moebius invariances, "
                       f"{hecke} Hecke pairs agree exactly")
