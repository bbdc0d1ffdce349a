import functools
import http.server
import threading

import pytest
from hypothesis import given, strategies as st

from g2modular.arith import QuadRat
from g2modular.curvefit import is_squarefree_poly
from g2modular.ingest import (
    CACHE_ENV,
    DataFormatError,
    LevelNotFoundError,
    SourceUnavailableError,
    ValidationError,
    bundled_tables_text,
    decode_element,
    encode_element,
    fetch_coefficients,
    find_row,
    format_newform,
    load_tables,
    parse_newform,
    parse_tables,
    read_solutions,
)
from g2modular.newform import check_bounds


def test_row_c63():
    row = find_row("C_63")
    assert row.poly == (-27, 0, 0, -26, 0, 0, 1)
    assert row.spec().a(2) == QuadRat.sqrt(3)
    assert row.character().is_trivial()


def test_row_c23_encoding():
    row = find_row("C_23")
    assert row.spec().a(2) == QuadRat.w(5) - 1
    assert encode_element(row.spec().a(2), 5) == "w:-1,1"


def test_row_counts():
    rows = load_tables()
    assert len(rows) == 149
    assert sum(r.table == 1 for r in rows) == 53
    assert sum(r.table == 2 for r in rows) == 96


def test_rows_are_valid():
    for row in load_tables():
        assert is_squarefree_poly(row.poly), row.label
        assert check_bounds(row.spec(), row.level) == [], row.label


def test_corrupt_table_is_rejected():
    text = bundled_tables_text().replace("row C_63 table=1 level=63", "row C_63 table=1 level=sixty", 1)
    with pytest.raises(DataFormatError):
        parse_tables(text)


@given(st.sampled_from([-3, -1, 2, 5, 13]), st.integers(-30, 30), st.integers(-30, 30))
def test_element_round_trip(d, u, v):
    x = QuadRat(u, 0, d) + (QuadRat.w(d) if d % 4 == 1 else QuadRat.sqrt(d)) * v
    assert decode_element(encode_element(x, d), d) == x


def test_bundled_fetch_f63():
    (f,) = fetch_coefficients("bundled", 63)
    assert sorted(f.ap) == [2, 3, 5, 7, 11, 13]
    assert f.ap == find_row("C_63").spec().ap


def test_bundled_unknown_level():
    with pytest.raises(LevelNotFoundError):
        fetch_coefficients("bundled", 11)


def test_missing_dump_dir(tmp_path):
    with pytest.raises(SourceUnavailableError):
        fetch_coefficients(f"dir:{tmp_path / 'nope'}", 63)


def _dump(tmp_path, spec, level):
    (tmp_path / f"{level}.txt").write_text(format_newform(spec) + "\n", encoding="utf-8")


def test_weil_violation_names_prime(tmp_path):
    spec = find_row("C_63").spec()
    bad = parse_newform(format_newform(spec).replace("a2=s:0,1", "a2=s:3,0"))
    _dump(tmp_path, bad, 63)
    with pytest.raises(ValidationError, match="at 2"):
        fetch_coefficients(f"dir:{tmp_path}", 63)


@pytest.fixture
def http_dump(tmp_path):
    root = tmp_path / "srv"
    root.mkdir()
    _dump(root, find_row("C_63").spec(), 63)
    handler = functools.partial(http.server.SimpleHTTPRequestHandler, directory=str(root))
    handler.log_message = lambda *a, **k: None
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield server, f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_cache_round_trip(http_dump, tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    server, url = http_dump
    (first,) = fetch_coefficients(url, 63)
    cached = list((tmp_path / "cache").rglob("63.txt"))
    assert len(cached) == 1
    before = cached[0].read_bytes()
    server.shutdown()
    server.server_close()
    (second,) = fetch_coefficients(url, 63)
    assert cached[0].read_bytes() == before
    assert first.ap == second.ap


def test_http_unreachable(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    with pytest.raises(SourceUnavailableError):
        fetch_coefficients("http://127.0.0.1:9", 63)


def test_solution_file_errors(tmp_path):
    path = tmp_path / "sols.txt"
    path.write_text("solution d=3 k=0\n", encoding="utf-8")
    with pytest.raises(DataFormatError):
        read_solutions(path)


def test_newform_record_round_trip():
    for row in load_tables()[:30]:
        spec = row.spec()
        back = parse_newform(format_newform(spec))
        assert back.ap == spec.ap and back.level == spec.level and back.d == spec.d
