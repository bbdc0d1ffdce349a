from importlib import resources

import pytest

from g2modular.cli import EXIT_CHECK_FAILED, EXIT_DATA, EXIT_NOT_FOUND, EXIT_OK, EXIT_SOURCE, EXIT_USAGE, main
from g2modular.ingest import find_row, format_newform, read_solutions

S2_36 = resources.files("g2modular") / "data" / "s2_36.txt"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zeta(capsys):
    code, out, _ = run(capsys, "zeta", "--curve", "x^6-26*x^3-27", "--p", "5")
    assert code == EXIT_OK
    assert "Q_p(t) = t^4 - 2*t^2 + 25" in out
    assert "#C(F_p) = 6, #C(F_p^2) = 22" in out


def test_zeta_bad_prime(capsys):
    code, _, err = run(capsys, "zeta", "--curve", "x^6-26*x^3-27", "--p", "3")
    assert code == EXIT_USAGE and "bad reduction" in err


def test_fit_row(capsys):
    code, out, _ = run(capsys, "fit", "--row", "C_28")
    assert code == EXIT_OK
    assert "P = x^5 - 4*x^4 - 13*x^3 - 9*x^2 - x" in out


def test_fit_unknown_row(capsys):
    code, _, _ = run(capsys, "fit", "--row", "C_1")
    assert code == EXIT_NOT_FOUND


def test_fit_newform_file(tmp_path, capsys):
    path = tmp_path / "f.txt"
    path.write_text(format_newform(find_row("C_63").spec()) + "\n", encoding="utf-8")
    code, out, _ = run(capsys, "fit", "--newform", str(path))
    assert code == EXIT_OK and "P = x^6 - 26*x^3 - 27" in out


def test_malformed_newform_file(tmp_path, capsys):
    path = tmp_path / "f.txt"
    path.write_text("newform level=63 d=3 a2=s:0\n", encoding="utf-8")
    code, _, _ = run(capsys, "fit", "--newform", str(path))
    assert code == EXIT_DATA


def test_collect_then_sieve(tmp_path, capsys):
    sols = tmp_path / "sols.txt"
    code, _, err = run(capsys, "collect", "--d", "3", "--twist", "1", "--n0", "2", "--dedup", "--out", str(sols))
    assert code == EXIT_OK and "6 solutions" in err
    assert len(read_solutions(sols)) == 6
    prefix = tmp_path / "rep" / "sieve"
    code, out, _ = run(capsys, "sieve", "--in", str(sols), "--branch", "twist", "--report", str(prefix))
    assert code == EXIT_OK and "sieve report (twist branch)" in out
    assert (tmp_path / "rep" / "sieve.tsv").exists()
    assert (tmp_path / "rep" / "sieve.png").stat().st_size > 0


def test_collect_inadmissible_cell(capsys):
    code, _, err = run(capsys, "collect", "--d", "41", "--n0", "2")
    assert code == EXIT_USAGE and "admissible" in err


def test_bad_twist_argument(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["collect", "--d", "3", "--twist", "5", "--n0", "2"])
    assert exc.value.code == EXIT_USAGE


def test_certify_s2_36(capsys):
    with resources.as_file(S2_36) as path:
        code, out, _ = run(capsys, "certify", "--newform", str(path))
    assert code == EXIT_CHECK_FAILED
    assert "not-verified" in out


def test_certify_missing_dump(tmp_path, capsys):
    path = tmp_path / "f.txt"
    path.write_text(format_newform(find_row("C_63").spec()) + "\n", encoding="utf-8")
    code, _, _ = run(capsys, "certify", "--newform", str(path), "--coeffs", f"dir:{tmp_path / 'missing'}")
    assert code == EXIT_SOURCE


@pytest.mark.slow
def test_reproduce(tmp_path, capsys):
    code, out, _ = run(capsys, "reproduce", "--report-dir", str(tmp_path))
    assert "149/149 rows reproduced" in out
    assert code == EXIT_OK
    assert (tmp_path / "sieve_twist.png").exists() and (tmp_path / "sieve_no_twist.tsv").exists()
