"""Sieves on collector output, the level search and the table regression."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .arith import QuadRat
from .characters import CharacterError, DirichletCharacter, characters_mod, conjugacy_classes, kronecker_character
from .collector import Solution
from .curvefit import fit_newform
from .hyperelliptic import (
    GenusTwoCurve,
    InvolutionReport,
    clebsch_invariants,
    eichler_shimura_quartic,
    endo_field_check,
    frobenius_poly,
    has_extra_involution,
    invariant_R,
    q_isomorphic,
    sieve1_check,
    weighted_class_key,
)
from .ingest import (
    CoefficientSource,
    LevelNotFoundError,
    SourceUnavailableError,
    TableRow,
    bundled_conductors,
    fetch_coefficients,
    load_tables,
)
from .newform import NewformSpec, hecke_coefficients, n0 as newform_n0

log = logging.getLogger(__name__)

TWIST, NO_TWIST = "twist", "no_twist"
TWIST_STAGES = ("collected", "sieve1", "sieve2", "involution", "sieve3", "sieve4", "sieve5", "sieve6")
NO_TWIST_STAGES = ("collected", "no_involution", "sieve2", "sieve4", "sieve6")
# survivor counts reported for the original run; stages without a reference count are None
REFERENCE = {
    TWIST: (1752, 288, 94, 94, 79, 64, 62, 53),
    NO_TWIST: (1416, None, None, None, 96),
}


def solution_from_row(row: TableRow) -> Solution:
    """The collector-style record of a tabulated newform (a_p for p <= 13)."""
    spec = row.spec()
    chi = row.character()
    k = 1 if chi.is_trivial() else chi.order()
    n0 = newform_n0(spec)
    ap = tuple((p, row.ap[p]) for p in sorted(row.ap))
    program = TWIST if row.table == 1 else NO_TWIST
    return Solution(tuple(Fraction(c) for c in row.poly), row.d, k, n0, ap, spec.epsilon(2), spec.epsilon(3), program, max(row.ap))


# sieve report


@dataclass(frozen=True)
class AuditEntry:
    index: int
    label: str
    stage: str
    verdict: str  # "pass" | "reject" | "flag"
    witness: Optional[int] = None
    detail: str = ""


@dataclass
class SieveReport:
    branch: str
    stages: tuple[str, ...]
    counts: list[int] = field(default_factory=list)
    audit: list[AuditEntry] = field(default_factory=list)

    @property
    def reference(self) -> tuple:
        return REFERENCE[self.branch]

    def deviations(self) -> list[tuple[str, int, int]]:
        """(stage, ours, reference) wherever a reference count differs."""
        return [(s, c, r) for s, c, r in zip(self.stages, self.counts, self.reference) if r is not None and c != r]

    def rejections(self) -> list[AuditEntry]:
        return [e for e in self.audit if e.verdict == "reject"]

    def to_tsv(self) -> str:
        lines = ["# counts", "stage\tsurvivors\treference"]
        for s, c, r in zip(self.stages, self.counts, self.reference):
            lines.append(f"{s}\t{c}\t{'' if r is None else r}")
        lines += ["# audit", "index\tlabel\tstage\tverdict\twitness\tdetail"]
        for e in self.audit:
            w = "" if e.witness is None else str(e.witness)
            lines.append(f"{e.index}\t{e.label}\t{e.stage}\t{e.verdict}\t{w}\t{e.detail}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"sieve report ({self.branch} branch)"]
        for s, c, r in zip(self.stages, self.counts, self.reference):
            ref = "" if r is None else f"  (reference {r})"
            lines.append(f"  {s:<14}{c:>6}{ref}")
        for e in self.rejections():
            w = "" if e.witness is None else f" at p = {e.witness}"
            lines.append(f"  rejected {e.label} by {e.stage}{w}: {e.detail}")
        flags = [e for e in self.audit if e.verdict == "flag"]
        if flags:
            lines.append(f"  {len(flags)} candidate(s) passed {flags[0].stage} without data")
        return "\n".join(lines) + "\n"

    def plot(self, path: str | Path) -> Path:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        path = Path(path)
        xs = list(range(len(self.stages)))
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(xs, self.counts, "o-", label="this run")
        ref = [(x, r) for x, r in zip(xs, self.reference) if r is not None]
        if ref:
            ax.plot([x for x, _ in ref], [r for _, r in ref], "s--", label="reference")
        ax.set_xticks(xs)
        ax.set_xticklabels(self.stages, rotation=30, ha="right")
        ax.set_ylabel("survivors")
        ax.set_yscale("symlog", linthresh=10)
        ax.set_title(f"sieve trajectory, {self.branch} branch")
        ax.legend()
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
        return path


# individual sieves: each returns (passed, witness, detail)


def _sieve4(sol: Solution, curve: GenusTwoCurve):
    for p, a in sol.ap:
        if p > sol.M2 or a.is_zero() or not curve.is_good(p):
            continue
        if p == 3:
            e = sol.eps3
        elif sol.k == 1:
            e = QuadRat(1)
        else:
            e = a / a.conjugate()
        if e.is_zero():
            continue  # p divides the level
        expected = tuple(c.a for c in eichler_shimura_quartic(a, e, p))
        got = frobenius_poly(curve, p).Qp
        if tuple(Fraction(c) for c in got) != expected:
            return False, p, f"Q_p = {got}, expected {tuple(str(c) for c in expected)}"
    return True, None, ""


class ConductorIndex:
    """Odd conductor parts keyed by the Q-isomorphism class of the curve."""

    def __init__(self, data: dict) -> None:
        self.by_class: dict[tuple, list] = {}
        for P, odd in data.items():
            key = weighted_class_key(clebsch_invariants(list(P)))
            self.by_class.setdefault(key, []).append((P, odd))

    def lookup(self, P: Sequence) -> Optional[int]:
        key = weighted_class_key(clebsch_invariants(list(P)))
        for Q, odd in self.by_class.get(key, ()):
            if tuple(Fraction(c) for c in Q) == tuple(Fraction(c) for c in P) or q_isomorphic(list(Q), list(P)):
                return odd
        return None


_bundled_index: Optional[ConductorIndex] = None


def bundled_conductor_index() -> ConductorIndex:
    global _bundled_index
    if _bundled_index is None:
        _bundled_index = ConductorIndex(bundled_conductors())
    return _bundled_index


def _involutions(curve: GenusTwoCurve, cache: dict, fast: bool) -> InvolutionReport:
    if curve.P not in cache:
        if fast and invariant_R(curve.P) != 0:
            cache[curve.P] = InvolutionReport("none")  # R != 0: no extra involution
        else:
            cache[curve.P] = has_extra_involution(curve)
    return cache[curve.P]


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def run_sieves(
    solutions: Sequence[Solution],
    branch: str,
    conductors: Optional[ConductorIndex] = None,
    labels: Optional[Sequence[str]] = None,
) -> tuple[SieveReport, list[Solution]]:
    """Apply the sieves of one branch in order; returns the report and the survivors."""
    if branch not in (TWIST, NO_TWIST):
        raise ValueError(f"unknown branch {branch!r}")
    stages = TWIST_STAGES if branch == TWIST else NO_TWIST_STAGES
    report = SieveReport(branch, stages)
    labels = list(labels) if labels is not None else [f"s{i}" for i in range(len(solutions))]
    conductors = conductors if conductors is not None else bundled_conductor_index()
    alive = list(range(len(solutions)))
    curves = {i: solutions[i].curve() for i in alive}
    inv_cache: dict = {}
    report.counts.append(len(alive))

    def apply(stage, pred):
        nonlocal alive
        keep = []
        for i in alive:
            ok, witness, detail = pred(i)
            if ok is None:
                report.audit.append(AuditEntry(i, labels[i], stage, "flag", witness, detail))
                keep.append(i)
            elif ok:
                keep.append(i)
            else:
                report.audit.append(AuditEntry(i, labels[i], stage, "reject", witness, detail))
        alive = keep
        report.counts.append(len(alive))
        log.info("%s: %d survivors", stage, len(alive))

    def sieve1(i):
        s = solutions[i]
        r = sieve1_check(curves[i], 2 if s.k == 1 else s.k, 100)
        return r.passed, r.witness, r.detail

    def sieve2(i):
        r = endo_field_check(curves[i], solutions[i].d, 29)
        return r.passed, r.witness, r.detail

    def involution_present(i):
        rep = _involutions(curves[i], inv_cache, fast=False)
        return rep.has_involution, None, "" if rep.has_involution else "no nonhyperelliptic involution"

    def sieve3(i):
        rep = _involutions(curves[i], inv_cache, fast=False)
        return rep.kind != "over_Q", None, "involution defined over Q" if rep.kind == "over_Q" else ""

    def no_involution(i):
        rep = _involutions(curves[i], inv_cache, fast=True)
        return not rep.has_involution, None, f"involution over {rep.kind[5:]}" if rep.has_involution else ""

    def sieve4(i):
        return _sieve4(solutions[i], curves[i])

    def sieve5(i):
        odd = conductors.lookup(curves[i].P)
        if odd is None:
            return None, None, "no conductor data"
        return _is_square(odd), None, "" if _is_square(odd) else f"odd conductor part {odd} is not a square"

    kept_by_class: dict[tuple, list[int]] = {}

    def sieve6(i):
        key = weighted_class_key(clebsch_invariants(list(curves[i].P)))
        for j in kept_by_class.get(key, ()):
            if q_isomorphic(curves[j], curves[i]):
                return False, None, f"Q-isomorphic to {labels[j]}"
        kept_by_class.setdefault(key, []).append(i)
        return True, None, ""

    preds = {
        "sieve1": sieve1,
        "sieve2": sieve2,
        "involution": involution_present,
        "sieve3": sieve3,
        "no_involution": no_involution,
        "sieve4": sieve4,
        "sieve5": sieve5,
        "sieve6": sieve6,
    }
    for stage in stages[1:]:
        apply(stage, preds[stage])
    return report, [solutions[i] for i in alive]


# level search


def brumer_k_bound(d: int, character: Optional[DirichletCharacter] = None) -> Optional[int]:
    """Largest k with Q(eps, zeta_{2^m}^2) inside K_f = Q(sqrt d), m = ceil(k/2 - 2); None if eps does not fit."""
    if character is not None and character.value_field() not in (0, d):
        return None
    # zeta_{2^m}^2 has order 2^(m-1): only orders 1, 2 fit a quadratic field, and 4 when d = -1;
    # Q(sqrt 2) is the real subfield of Q(zeta_8), which admits m = 3 as well
    m_max = 3 if d in (-1, 2) else 2
    return 2 * (m_max + 2)


def _eps_class_matches(chi: DirichletCharacter, e2: QuadRat, e3: QuadRat) -> bool:
    for c in (chi, chi.galois_conjugate()):
        if c.eval(2) == e2 and c.eval(3) == e3:
            return True
    return False


def level_search(
    solution: Solution,
    odd_conductor_M: int,
    involution_field: Optional[int] = None,
) -> list[tuple[int, DirichletCharacter]]:
    """Candidate (N, eps) with N = 2^k M, one character per Galois class."""
    M = odd_conductor_M
    if M is None or M < 1 or M % 2 == 0:
        raise ValueError("missing or invalid odd conductor part")
    e2, e3 = solution.eps2, solution.eps3
    if (M % 3 == 0) != e3.is_zero():
        return []
    kmax = brumer_k_bound(solution.d, None)
    ks = [0] if not e2.is_zero() else list(range(1, kmax + 1))
    out = []
    for k in ks:
        N = 2**k * M
        if solution.k == 1:
            chars = [DirichletCharacter.trivial(N)]
        elif solution.k == 2:
            if involution_field is None:
                chars = [cls[0] for cls in conjugacy_classes(characters_mod(N, orders=(2,)))]
            else:
                try:
                    chars = [kronecker_character(involution_field, N)]
                except CharacterError:
                    chars = []
        else:
            chars = [cls[0] for cls in conjugacy_classes(characters_mod(N, orders=(solution.k,)))]
        for chi in chars:
            if brumer_k_bound(solution.d, chi) is None or k > brumer_k_bound(solution.d, chi):
                continue
            if _eps_class_matches(chi, e2, e3):
                out.append((N, chi))
    return out


@dataclass(frozen=True)
class Match:
    level: int
    character: DirichletCharacter
    spec: NewformSpec
    conjugated: bool


def _same_coefficients(sol: Solution, spec: NewformSpec) -> Optional[bool]:
    """True/False when equal up to joint conjugation (False = equal to the conjugate), None otherwise.

    Compares a_n for n <= M'' and every further a_p known on both sides.
    """
    if spec.d != sol.d:
        return None
    try:
        theirs = list(hecke_coefficients(spec, sol.M2)[2:])
    except Exception:
        return None
    ours = list(sol.coefficients)
    for p, a in sol.ap:
        if p > sol.M2 and p in spec.ap:
            ours.append(a)
            theirs.append(spec.a(p))
    if theirs == ours:
        return True
    if theirs == [c.conjugate() for c in ours]:
        return False
    return None


def match_newform(
    solution: Solution,
    candidates: Iterable[tuple[int, DirichletCharacter]],
    source: CoefficientSource | str = "bundled",
) -> tuple[Optional[Match], list[str]]:
    """First newform among the candidate levels whose a_n, n <= M'', agree with the solution's."""
    problems = []
    for N, chi in candidates:
        try:
            specs = fetch_coefficients(source, N, None if chi.is_trivial() else chi)
        except LevelNotFoundError:
            continue
        except SourceUnavailableError as e:
            problems.append(f"level {N}: {e}")
            continue
        for spec in specs:
            same = _same_coefficients(solution, spec)
            if same is not None:
                return Match(N, chi, spec, not same), problems
    return None, problems


# table regression


@dataclass
class RowResult:
    label: str
    fit_ok: bool
    survived: bool
    matched_level: Optional[int]
    expected_level: int

    @property
    def ok(self) -> bool:
        return self.fit_ok and self.survived and self.matched_level == self.expected_level


@dataclass
class ReproduceResult:
    rows: list[RowResult]
    reports: dict[str, SieveReport]

    @property
    def passed(self) -> int:
        return sum(r.ok for r in self.rows)

    def summary(self) -> str:
        return f"{self.passed}/{len(self.rows)} rows reproduced"


def _involution_field(curve: GenusTwoCurve) -> Optional[int]:
    rep = has_extra_involution(curve)
    return rep.field_d if rep.degree == 2 else None


def reproduce(rows: Optional[Sequence[TableRow]] = None, source: CoefficientSource | str = "bundled") -> ReproduceResult:
    """Fit, sieve (by table branch), level search and match for every tabulated row."""
    rows = list(rows) if rows is not None else load_tables()
    index = bundled_conductor_index()
    sols = [solution_from_row(r) for r in rows]
    fit_ok = {}
    for r in rows:
        fit = fit_newform(r.spec(), 16)
        fit_ok[r.label] = fit.ok and tuple(fit.P) == tuple(Fraction(c) for c in r.poly)
    survived = set()
    reports = {}
    for branch, table in ((TWIST, 1), (NO_TWIST, 2)):
        idx = [i for i, r in enumerate(rows) if r.table == table]
        report, _ = run_sieves([sols[i] for i in idx], branch, index, [rows[i].label for i in idx])
        reports[branch] = report
        rejected = {e.index for e in report.rejections()}
        survived.update(rows[idx[j]].label for j in range(len(idx)) if j not in rejected)
    out = []
    for r, s in zip(rows, sols):
        curve = s.curve()
        odd = index.lookup(curve.P)
        level = None
        if odd is not None:
            field_d = _involution_field(curve) if s.k == 2 else None
            cands = level_search(s, isqrt(odd), field_d)
            m, _ = match_newform(s, cands, source)
            level = m.level if m else None
        out.append(RowResult(r.label, fit_ok[r.label], r.label in survived, level, r.level))
    return ReproduceResult(out, reports)


def matches_row(sol: Solution, row: TableRow) -> bool:
    """Same truncated data as the row up to conjugation, and a Q-isomorphic curve."""
    if sol.d != row.d:
        return False
    spec = row.spec()
    theirs = tuple(hecke_coefficients(spec, sol.M2)[2:])
    if theirs != sol.coefficients and theirs != tuple(c.conjugate() for c in sol.coefficients):
        return False
    P = tuple(Fraction(c) for c in row.poly)
    return tuple(sol.P) == P or q_isomorphic(list(sol.P), list(P))

