"""Bundled appendix data, the line-oriented record format, and coefficient sources.

Every record is one line ``KIND key=value ...``; values containing spaces are
shell-quoted. Field elements are written ``w:u,v`` (u + v*w_d, d = 1 mod 4),
``s:u,v`` (u + v*sqrt(d)) or ``q:u`` (rational); u, v are integers or ``n/m``.
"""

from __future__ import annotations

import hashlib
import os
import shlex
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .arith import QuadRat
from .characters import CharacterError, DirichletCharacter, format_degree_list, parse_degree_list
from .newform import NewformSpec, check_bounds, epsilon_from_twist, primes_upto

TABLE_FORMAT = "format g2modular-table 1"
TABLE_PRIMES = (2, 3, 5, 7, 11, 13)
CACHE_ENV = "G2MODULAR_CACHE"


class DataFormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None, source: str = "") -> None:
        where = ""
        if line is not None:
            where = f"{source or '<data>'}:{line}"
            if column is not None:
                where += f":{column}"
            where += ": "
        super().__init__(where + msg)
        self.line = line
        self.column = column


class SourceUnavailableError(OSError):
    """The coefficient source could not be reached (as opposed to missing data)."""


class LevelNotFoundError(LookupError):
    pass


class ValidationError(ValueError):
    pass


# field elements


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad rational {text!r}") from None


def _fmt_rat(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decode_element(text: str, d: int) -> QuadRat:
    tag, _, body = text.partition(":")
    if tag == "q":
        return QuadRat(_rat(body), 0, d if d else 0)
    parts = body.split(",")
    if len(parts) != 2:
        raise ValueError(f"field element {text!r} needs two coordinates")
    u, v = (_rat(t) for t in parts)
    if tag == "s":
        return QuadRat(u, v, d)
    if tag == "w":
        if d % 4 != 1:
            raise ValueError(f"basis w needs d = 1 mod 4, got d = {d}")
        return QuadRat(u, 0, d) + QuadRat.w(d) * v
    raise ValueError(f"unknown basis tag {tag!r}")


def encode_element(x: QuadRat, d: int) -> str:
    x = QuadRat.coerce(x)
    if d == 0:
        if not x.is_rational():
            raise ValueError(f"{x} is not rational")
        return "q:" + _fmt_rat(x.a)
    if d % 4 == 1:
        v = 2 * x.b
        u = x.a - x.b
        return f"w:{_fmt_rat(u)},{_fmt_rat(v)}"
    return f"s:{_fmt_rat(x.a)},{_fmt_rat(x.b)}"


def parse_record(line: str) -> tuple[str, dict[str, str]]:
    tokens = shlex.split(line)
    if not tokens:
        raise ValueError("empty record")
    kind, fields = tokens[0], {}
    for tok in tokens[1:]:
        if "=" not in tok:
            fields.setdefault("_positional", tok)
            continue
        k, v = tok.split("=", 1)
        fields[k] = v
    return kind, fields


def _quote(v) -> str:
    v = str(v)
    if v == "" or any(c.isspace() or c in "'\"\\#" for c in v):
        return shlex.quote(v)
    return v


def format_record(kind: str, items: Iterable[tuple[str, str]]) -> str:
    return " ".join([kind] + [f"{k}={_quote(v)}" for k, v in items])


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",")] if text else []


def _rats(text: str) -> list[Fraction]:
    return [_rat(t) for t in text.split(",")] if text else []


# appendix tables


@dataclass(frozen=True)
class TableRow:
    label: str
    table: int
    level: int
    char: str
    cm: bool
    d: int
    poly: tuple[int, ...]
    ap: dict = field(hash=False, compare=False)
    flags: tuple[str, ...] = ()

    def characters(self) -> list[DirichletCharacter]:
        return parse_degree_list(self.char, self.level).characters()

    def character(self) -> DirichletCharacter:
        """The member of the stated class matching eps(p) = a_p/sigma(a_p) best."""
        cands = self.characters()
        if len(cands) == 1:
            return cands[0]
        spec = NewformSpec(self.d, self.ap, self.level)
        best, score = cands[0], -1
        for chi in cands:
            s = 0
            for p in TABLE_PRIMES:
                if self.level % p == 0:
                    continue
                e = epsilon_from_twist(spec, p)
                if e is not None and chi.eval(p) == e:
                    s += 1
            if s > score:
                best, score = chi, s
        return best

    def spec(self) -> NewformSpec:
        return NewformSpec(self.d, dict(self.ap), self.level, self.character(), self.cm, label="f" + self.label[1:])

    def to_line(self) -> str:
        items = [("table", self.table), ("level", self.level), ("char", self.char), ("cm", int(self.cm)), ("d", self.d)]
        items.append(("poly", ",".join(str(c) for c in self.poly)))
        items += [(f"a{p}", encode_element(self.ap[p], self.d)) for p in sorted(self.ap)]
        items += [("flag", f) for f in self.flags]
        return format_record("row " + self.label, items)


def _row_from_fields(label: str, f: dict[str, str]) -> TableRow:
    d = int(f["d"])
    ap = {}
    for k, v in f.items():
        if k.startswith("a") and k[1:].isdigit():
            ap[int(k[1:])] = decode_element(v, d)
    flags = tuple(v for k, v in f.items() if k == "flag")
    return TableRow(
        label=label,
        table=int(f["table"]),
        level=int(f["level"]),
        char=f["char"],
        cm=f.get("cm", "0") == "1",
        d=d,
        poly=tuple(_ints(f["poly"])),
        ap=ap,
        flags=flags,
    )


def parse_tables(text: str, source: str = "") -> list[TableRow]:
    rows: list[TableRow] = []
    seen_format = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("format "):
            if line != TABLE_FORMAT:
                raise DataFormatError(f"unsupported format line {line!r}", lineno, 1, source)
            seen_format = True
            continue
        if not seen_format:
            raise DataFormatError("missing format line", lineno, 1, source)
        try:
            kind, f = parse_record(line)
        except ValueError as e:
            raise DataFormatError(str(e), lineno, 1, source) from None
        if kind != "row" or "_positional" not in f:
            raise DataFormatError(f"expected `row LABEL ...`, got {kind!r}", lineno, 1, source)
        label = f.pop("_positional")
        try:
            rows.append(_row_from_fields(label, f))
        except (KeyError, ValueError) as e:
            bad = str(e).strip("'")
            col = raw.find(bad) + 1 if bad and bad in raw else None
            raise DataFormatError(f"row {label}: {e}", lineno, col, source) from None
    return rows


def validate_rows(rows: Sequence[TableRow]) -> None:
    from .curvefit import is_squarefree_poly

    for r in rows:
        if not is_squarefree_poly(r.poly):
            raise ValidationError(f"{r.label}: polynomial is not squarefree")
        try:
            viol = check_bounds(r.spec(), r.level)
        except CharacterError as e:
            raise ValidationError(f"{r.label}: {e}") from None
        if viol:
            raise ValidationError(f"{r.label}: " + "; ".join(str(v) for v in viol))


def bundled_tables_text() -> str:
    return resources.files("g2modular").joinpath("data/tables.txt").read_text(encoding="utf-8")


def load_tables(path: str | os.PathLike | None = None, validate: bool = True) -> list[TableRow]:
    if path is None:
        rows = parse_tables(bundled_tables_text(), "tables.txt")
    else:
        rows = parse_tables(Path(path).read_text(encoding="utf-8"), str(path))
    if validate:
        validate_rows(rows)
    return rows


def find_row(label: str, rows: Optional[Sequence[TableRow]] = None) -> TableRow:
    rows = rows if rows is not None else load_tables(validate=False)
    norm = label.replace("{", "").replace("}", "").replace(" ", "")
    for r in rows:
        if r.label == norm:
            return r
    raise LevelNotFoundError(f"no table row {label!r}")


# newform coefficient records


def format_newform(spec: NewformSpec) -> str:
    items = [("label", spec.label or "f"), ("level", spec.level or 0)]
    items.append(("char", format_degree_list(spec.character) if spec.character is not None else "1"))
    items.append(("images", ",".join(str(k) for k in spec.character.images) if spec.character is not None else ""))
    items += [("d", spec.d), ("cm", int(spec.cm))]
    items += [(f"a{p}", encode_element(spec.ap[p], spec.d)) for p in sorted(spec.ap)]
    return format_record("newform", items)


def parse_newform(line: str) -> NewformSpec:
    kind, f = parse_record(line)
    if kind != "newform":
        raise ValueError(f"expected a newform record, got {kind!r}")
    d = int(f["d"])
    level = int(f.get("level", "0")) or None
    chi = None
    if level is not None:
        if f.get("images"):
            chi = DirichletCharacter.from_images(level, _ints(f["images"]))
        else:
            chi = parse_degree_list(f.get("char", "1"), level).characters()[0]
    ap = {int(k[1:]): decode_element(v, d) for k, v in f.items() if k.startswith("a") and k[1:].isdigit()}
    return NewformSpec(d, ap, level, chi, f.get("cm", "0") == "1", label=f.get("label", ""))


def read_newforms(path: str | os.PathLike) -> list[NewformSpec]:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(parse_newform(s))
        except (KeyError, ValueError) as e:
            raise DataFormatError(str(e), lineno, None, str(path)) from None
    return out


# dimension and conductor data


def read_dims(path: str | os.PathLike) -> dict[tuple[int, str], list[int]]:
    """Records ``dims level=N char=LIST dims=n1,n2,...`` (dim S_2(N, eps^k), k >= 1)."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        kind, f = parse_record(s)
        if kind == "dims":
            out[(int(f["level"]), f.get("char", "1"))] = _ints(f["dims"])
    return out


def read_conductors(path: str | os.PathLike) -> dict[tuple[Fraction, ...], int]:
    """Records ``conductor poly=A0,...,A6 odd=M`` giving the odd conductor part of J(C)."""
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        kind, f = parse_record(s)
        if kind == "conductor":
            out[tuple(_rats(f["poly"]))] = int(f["odd"])
    return out


# coefficient sources


@dataclass(frozen=True)
class CoefficientSource:
    """``bundled``, ``dir:PATH`` or ``http(s)://BASE``."""

    descriptor: str = "bundled"

    @property
    def kind(self) -> str:
        if self.descriptor == "bundled":
            return "bundled"
        if self.descriptor.startswith(("http://", "https://")):
            return "http"
        return "dir"

    def _dir(self) -> Path:
        return Path(self.descriptor[4:] if self.descriptor.startswith("dir:") else self.descriptor)

    def _level_text(self, level: int) -> str:
        if self.kind == "dir":
            p = self._dir()
            if not p.is_dir():
                raise SourceUnavailableError(f"dump directory {p} does not exist")
            f = p / f"{level}.txt"
            if not f.exists():
                raise LevelNotFoundError(f"level {level} not in {p}")
            return f.read_text(encoding="utf-8")
        return _http_level_text(self.descriptor, level)

    def newforms(self, level: int) -> list[NewformSpec]:
        if self.kind == "bundled":
            out = [r.spec() for r in load_tables(validate=False) if r.level == level]
            if not out:
                raise LevelNotFoundError(f"level {level} not in the bundled tables")
            return out
        out = []
        for line in self._level_text(level).splitlines():
            s = line.strip()
            if s and not s.startswith("#"):
                out.append(parse_newform(s))
        return out


def cache_dir() -> Path:
    base = os.environ.get(CACHE_ENV)
    return Path(base) if base else Path.home() / ".cache" / "g2modular"


def _http_level_text(base: str, level: int) -> str:
    key = hashlib.sha256(base.encode()).hexdigest()[:16]
    cached = cache_dir() / key / f"{level}.txt"
    if cached.exists():
        return cached.read_bytes().decode("utf-8")
    url = base.rstrip("/") + f"/{level}.txt"
    try:
        with urllib.request.urlopen(url, timeout=30) as resp:
            body = resp.read()
    except urllib.error.HTTPError as e:
        if e.code == 404:
            raise LevelNotFoundError(f"level {level} not found at {base}") from None
        raise SourceUnavailableError(f"{url}: HTTP {e.code}") from None
    except (urllib.error.URLError, OSError) as e:
        raise SourceUnavailableError(f"{url}: {e}") from None
    text = body.decode("utf-8")
    for line in text.splitlines():  # reject corrupt payloads before caching
        s = line.strip()
        if s and not s.startswith("#"):
            parse_newform(s)
    cached.parent.mkdir(parents=True, exist_ok=True)
    tmp = cached.with_suffix(".tmp")
    tmp.write_bytes(body)
    tmp.replace(cached)
    return text


def _same_class(a: Optional[DirichletCharacter], b: Optional[DirichletCharacter]) -> bool:
    if a is None or b is None:
        return (a is None or a.is_trivial()) and (b is None or b.is_trivial())
    return a == b or a == b.galois_conjugate()


def fetch_coefficients(
    source: CoefficientSource | str,
    level: int,
    character: Optional[DirichletCharacter] = None,
    count: Optional[int] = None,
) -> list[NewformSpec]:
    """Newforms of the given level and character class, with a_p for p <= count.

    Every returned spec has passed check_bounds.
    """
    if isinstance(source, str):
        source = CoefficientSource(source)
    out = []
    for spec in source.newforms(level):
        if character is not None and not _same_class(spec.character, character):
            continue
        viol = check_bounds(spec, level)
        if viol:
            raise ValidationError(f"{spec.label or 'newform'} at level {level}: " + "; ".join(str(v) for v in viol))
        if count is not None:
            spec = NewformSpec(spec.d, {p: a for p, a in spec.ap.items() if p <= count}, spec.level, spec.character, spec.cm, spec.twist, spec.eps, spec.label)
        out.append(spec)
    return out


def max_prime(spec: NewformSpec) -> int:
    ps = [p for p in primes_upto(max(spec.ap) if spec.ap else 1) if p in spec.ap]
    return ps[-1] if ps else 1


def bundled_conductors() -> dict[tuple[Fraction, ...], int]:
    """Odd conductor parts for the tabulated curves (odd part of N^2)."""
    path = resources.files("g2modular") / "data" / "conductors.txt"
    with resources.as_file(path) as p:
        return read_conductors(p)


# collector solutions


def format_solution(sol) -> str:
    d = sol.d
    items = [
        ("program", sol.program),
        ("d", d),
        ("k", sol.k),
        ("n0", sol.n0),
        ("M", sol.M),
        ("eps2", encode_element(sol.eps2, d)),
        ("eps3", encode_element(sol.eps3, d)),
        ("poly", ",".join(_fmt_rat(Fraction(c)) for c in sol.P)),
    ]
    items += [(f"a{p}", encode_element(a, d)) for p, a in sol.ap]
    return format_record("solution", items)


def parse_solution(line: str):
    from .collector import Solution

    kind, f = parse_record(line)
    if kind != "solution":
        raise ValueError(f"expected a solution record, got {kind!r}")
    d = int(f["d"])
    ap = tuple(sorted((int(k[1:]), decode_element(v, d)) for k, v in f.items() if k.startswith("a") and k[1:].isdigit()))
    return Solution(
        tuple(_rats(f["poly"])),
        d,
        int(f["k"]),
        int(f["n0"]),
        ap,
        decode_element(f["eps2"], d),
        decode_element(f["eps3"], d),
        f.get("program", "twist"),
        int(f.get("M", "16")),
    )


def read_solutions(path: str | os.PathLike) -> list:
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(parse_solution(s))
        except (KeyError, ValueError) as e:
            raise DataFormatError(str(e), lineno, None, str(path)) from None
    return out


def write_solutions(solutions, path: str | os.PathLike) -> None:
    text = "".join(format_solution(s) + "\n" for s in solutions)
    Path(path).write_text(text, encoding="utf-8")
