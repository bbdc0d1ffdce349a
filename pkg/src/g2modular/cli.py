"""Command line interface: collect, sieve, fit, certify, zeta, reproduce."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .ingest import (
    DataFormatError,
    LevelNotFoundError,
    SourceUnavailableError,
    ValidationError,
    find_row,
    format_solution,
    read_dims,
    read_newforms,
    read_solutions,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SOURCE = 4
EXIT_NOT_FOUND = 5


def _twist(text: str) -> Optional[int]:
    if text == "none":
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("twist must be none or one of 1, 2, 3, 4, 6") from None
    if k not in (1, 2, 3, 4, 6):
        raise argparse.ArgumentTypeError("twist must be none or one of 1, 2, 3, 4, 6")
    return k


def _output(path: Optional[str]):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def cmd_collect(args) -> int:
    from .collector import dedup_conjugates, make_cell, search

    try:
        cell = make_cell(args.d, args.twist, args.n0)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sols = search(cell, args.m)
    if args.dedup:
        sols = dedup_conjugates(sols)
    out = _output(args.out)
    try:
        for s in sols:
            out.write(format_solution(s) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{cell.label()}: {len(sols)} solutions", file=sys.stderr)
    return EXIT_OK


def _write_report(report, prefix: Optional[str]) -> None:
    if not prefix:
        return
    base = Path(prefix)
    base.parent.mkdir(parents=True, exist_ok=True)
    tsv = base.with_name(base.name + ".tsv")
    tsv.write_text(report.to_tsv(), encoding="utf-8")
    png = report.plot(base.with_name(base.name + ".png"))
    print(f"wrote {tsv} and {png}", file=sys.stderr)


def cmd_sieve(args) -> int:
    from .ingest import read_conductors
    from .pipeline import ConductorIndex, run_sieves

    sols = read_solutions(args.input)
    index = ConductorIndex(read_conductors(args.conductors)) if args.conductors else None
    report, survivors = run_sieves(sols, args.branch, index)
    sys.stdout.write(report.to_text())
    _write_report(report, args.report)
    if args.survivors:
        Path(args.survivors).write_text("".join(format_solution(s) + "\n" for s in survivors), encoding="utf-8")
    for stage, ours, ref in report.deviations():
        print(f"warning: {stage}: {ours} survivors, reference {ref}", file=sys.stderr)
    return EXIT_OK


def _print_fit(fit, label: str) -> None:
    from .curvefit import poly_str

    print(f"{label}: n0 = {fit.n0}, status = {fit.status}")
    print(f"P = {poly_str(fit.P)}")
    print(f"residuals vanish through b_{fit.residual_prec}")


def cmd_fit(args) -> int:
    from .curvefit import fit_newform

    if args.row:
        row = find_row(args.row)
        _print_fit(fit_newform(row.spec(), args.m), row.label)
        return EXIT_OK
    specs = read_newforms(args.newform)
    for spec in specs:
        _print_fit(fit_newform(spec, args.m), spec.label or "newform")
    return EXIT_OK


def cmd_certify(args) -> int:
    from .curvefit import certify, genus_budget
    from .characters import format_degree_list
    from .ingest import fetch_coefficients
    from .newform import hecke_coefficients

    dims = read_dims(args.dims) if args.dims else {}
    status = EXIT_OK
    for spec in read_newforms(args.newform):
        full = spec
        if args.coeffs:
            # the source form whose leading coefficients agree with the given ones
            known = min(spec.max_known(), 13)
            mine = hecke_coefficients(spec, known)
            full = None
            for cand in fetch_coefficients(args.coeffs, spec.level, spec.character):
                theirs = hecke_coefficients(cand, known)
                if theirs == mine or theirs == [c.conjugate() for c in mine]:
                    full = cand
                    break
            if full is None:
                print(f"{spec.label or 'newform'}: no matching form at level {spec.level} in {args.coeffs}", file=sys.stderr)
                status = EXIT_NOT_FOUND
                continue
        char = format_degree_list(full.character) if full.character is not None else "1"
        budget = genus_budget(full.level, full.character, dims.get((full.level, char)))
        cert = certify(full, budget)
        extra = f" ({cert.note})" if cert.note else ""
        print(f"{spec.label or 'newform'}: level {cert.level}, char {cert.character}, g = {cert.g}, c = {cert.c}, "
              f"{cert.coefficients_available} coefficients: {cert.status}{extra}")
        if cert.verified is False and status == EXIT_OK:
            status = EXIT_CHECK_FAILED
    return status


def cmd_zeta(args) -> int:
    from .curvefit import poly_str
    from .hyperelliptic import BadReductionError, GenusTwoCurve, frobenius_poly

    curve = GenusTwoCurve.parse(args.curve)
    if not curve.is_good(args.p):
        print(f"error: bad reduction at p = {args.p}", file=sys.stderr)
        return EXIT_USAGE
    try:
        fd = frobenius_poly(curve, args.p)
    except BadReductionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(f"#C(F_p) = {fd.counts[0]}, #C(F_p^2) = {fd.counts[1]}")
    print(f"Q_p(t) = {poly_str(fd.Qp[::-1], 't')}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .pipeline import reproduce

    res = reproduce(source=args.coeffs)
    for r in res.rows:
        if not r.ok:
            print(f"{r.label}: fit {'ok' if r.fit_ok else 'FAILED'}, sieves {'passed' if r.survived else 'REJECTED'}, "
                  f"matched level {r.matched_level} (expected {r.expected_level})")
    for branch, report in res.reports.items():
        sys.stdout.write(report.to_text())
        if args.report_dir:
            _write_report(report, str(Path(args.report_dir) / f"sieve_{branch}"))
    print(res.summary())
    return EXIT_OK if res.passed == len(res.rows) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="g2modular", description="Genus-2 primitive modular curves over Q.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="run the collecting search for one cell")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--twist", type=_twist, default=None, help="none, or ord(eps) for the extra-twist program")
    p.add_argument("--n0", type=int, choices=(2, 3), required=True)
    p.add_argument("--m", type=int, default=None, help="series length M (default 16 or 22)")
    p.add_argument("--dedup", action="store_true", help="one representative per conjugate pair")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("sieve", help="run the sieves on a solution file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--branch", choices=("twist", "no_twist"), required=True)
    p.add_argument("--conductors", help="conductor records (default: bundled data)")
    p.add_argument("--report", help="path prefix for the .tsv report and .png trajectory")
    p.add_argument("--survivors", help="write surviving solutions here")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("fit", help="fit y^2 = P(x) to a newform")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--row", help="table label, e.g. C_28")
    g.add_argument("--newform", help="file of newform records")
    p.add_argument("--m", type=int, default=None, help="number of coefficients to use")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("certify", help="check y^2 - P(x) = O(q^c) for newforms")
    p.add_argument("--newform", required=True)
    p.add_argument("--coeffs", help="coefficient source: bundled, dir:PATH or an http(s) URL")
    p.add_argument("--dims", help="dimension records for the genus of X(N, eps)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("zeta", help="Frobenius polynomial of a genus-2 curve at p")
    p.add_argument("--curve", required=True, help='e.g. "x^6-26*x^3-27"')
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("reproduce", help="regression over the 149 tabulated curves")
    p.add_argument("--coeffs", default="bundled", help="coefficient source for the newform match")
    p.add_argument("--report-dir", help="directory for sieve reports and figures")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DataFormatError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except SourceUnavailableError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOURCE
    except (LevelNotFoundError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
