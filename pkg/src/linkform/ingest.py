"""Per-day CDR file parsing.

Line format (UTF-8, LF or CRLF)::

    YYYY-MM-DD;caller;callee;KIND;duration_s

with KIND one of CALL, SMS, FAX (any case). Day files are named
``YYYYMMDD.csv``. Fax records and self-communications never reach the graph;
malformed lines are counted and skipped.
"""
from __future__ import annotations

import datetime as dt
import enum
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import DynamicGraph

log = logging.getLogger(__name__)

DAY_FILE_RE = re.compile(r"^\d{8}\.csv$")


class Kind(enum.IntEnum):
    CALL = 0
    SMS = 1
    FAX = 2


_KINDS = {"CALL": Kind.CALL, "SMS": Kind.SMS, "FAX": Kind.FAX}


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


class InputError(RuntimeError):
    """Fatal problem with the input directory or a day file."""


@dataclass(frozen=True)
class CdrRecord:
    date: dt.date
    caller: str
    callee: str
    kind: Kind
    duration_s: float
    day: int | None = None


@dataclass(frozen=True)
class EdgeEvent:
    day: int
    u: int
    v: int
    kind: Kind
    sequence: int


@dataclass
class IngestStats:
    lines_read: int = 0
    records_parsed: int = 0
    malformed: int = 0
    fax_dropped: int = 0
    self_dropped: int = 0
    emitted: int = 0

    def check(self) -> bool:
        return (self.lines_read == self.records_parsed + self.malformed
                and self.records_parsed == self.emitted + self.fax_dropped + self.self_dropped)


@dataclass
class DayEvents:
    """One day's accepted events, stored column-wise."""

    day: int
    u: np.ndarray
    v: np.ndarray
    kind: np.ndarray
    first_sequence: int = 0

    def __len__(self) -> int:
        return len(self.u)

    def __getitem__(self, i: int) -> EdgeEvent:
        if i < 0:
            i += len(self)
        return EdgeEvent(self.day, int(self.u[i]), int(self.v[i]), Kind(int(self.kind[i])),
                         self.first_sequence + i)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


@dataclass(frozen=True)
class DayFile:
    day: int
    path: Path
    analyze: bool


_date_cache: dict[str, dt.date] = {}
_DATE_RE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}\Z")
# blanks are space and tab only; anything fancier is part of the token
_DURATION_RE = re.compile(r"[ \t]*[0-9]+(?:\.[0-9]+)?[ \t]*\Z")


def _parse_date(token: str) -> dt.date:
    d = _date_cache.get(token)
    if d is None:
        if not _DATE_RE.match(token):
            raise ValueError(f"bad date {token!r}")
        d = dt.date.fromisoformat(token)
        if len(_date_cache) > 4096:
            _date_cache.clear()
        _date_cache[token] = d
    return d


def _valid_date(token: str) -> bool:
    try:
        _parse_date(token)
    except ValueError:
        return False
    return True


def _kind(token: str):
    k = _KINDS.get(token)
    if k is None and token.isascii():
        k = _KINDS.get(token.strip(" \t").upper())
    return k


def parse_line(text: str, lineno: int | None = None, day: int | None = None) -> CdrRecord:
    """Parse one CDR line; raises ParseError on malformed input."""
    if text.endswith("\n"):
        text = text[:-1]
    if text.endswith("\r"):
        text = text[:-1]
    fields = text.split(";")
    if len(fields) != 5:
        raise ParseError(f"expected 5 fields, got {len(fields)}", lineno)
    date_tok, caller, callee, kind_tok, dur_tok = fields
    kind = _kind(kind_tok)
    if kind is None:
        raise ParseError(f"unknown kind {kind_tok!r}", lineno)
    if not caller or not callee:
        raise ParseError("empty subscriber id", lineno)
    if not _DURATION_RE.match(dur_tok):
        raise ParseError(f"bad duration {dur_tok!r}", lineno)
    try:
        date = _parse_date(date_tok)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
    dur_tok = dur_tok.strip(" \t")
    duration = float(dur_tok) if "." in dur_tok else int(dur_tok)
    return CdrRecord(date, caller, callee, kind, duration, day)


def _is_blank(line: str) -> bool:
    return not line.strip(" \t")


def _scan_python(text: str, day: int, ids: dict, intern):
    us: list[int] = []
    vs: list[int] = []
    kinds: list[int] = []
    lines_read = malformed = fax = selfc = 0
    dates = _date_cache
    for line in text.split("\n"):
        if line.endswith("\r"):
            line = line[:-1]
        if _is_blank(line):
            continue
        lines_read += 1
        f = line.split(";")
        if len(f) != 5:
            malformed += 1
            continue
        date_tok, caller, callee, kind_tok, dur_tok = f
        kind = _kind(kind_tok)
        if (kind is None or not caller or not callee or not _DURATION_RE.match(dur_tok)
                or (date_tok not in dates and not _valid_date(date_tok))):
            malformed += 1
            continue
        if kind == Kind.FAX:
            fax += 1
            continue
        if caller == callee:
            selfc += 1
            continue
        u = ids.get(caller)
        if u is None:
            u = intern(caller, day)
        v = ids.get(callee)
        if v is None:
            v = intern(callee, day)
        us.append(u)
        vs.append(v)
        kinds.append(kind)
    return (np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64),
            np.asarray(kinds, dtype=np.int8), lines_read, malformed, fax, selfc)


def _scanner(backend: str):
    if backend == "compiled":
        from . import _kernel

        def scan(data: bytes, day, ids, intern):
            return _kernel.scan_day(data, day, ids, intern, _valid_date)
        return scan

    def scan(data: bytes, day, ids, intern):
        return _scan_python(data.decode("utf-8"), day, ids, intern)
    return scan


def load_day(path, day: int, graph: DynamicGraph, first_sequence: int = 0) -> tuple[DayEvents, IngestStats]:
    """Read one day file, intern its subscribers and return the accepted events.

    Only events that survive both filters intern their endpoints, so a
    subscriber seen solely in fax or self records never becomes a node.
    Lines end in LF with an optional CR; blank lines are not counted.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not valid UTF-8: {exc}") from exc
    u, v, k, lines_read, malformed, fax, selfc = _scanner(graph.backend)(
        data, day, graph._ids, graph.intern_node)
    stats = IngestStats(lines_read=lines_read, records_parsed=lines_read - malformed,
                        malformed=malformed, fax_dropped=fax, self_dropped=selfc, emitted=len(u))
    if malformed:
        log.warning("%s: skipped %d malformed line(s)", path.name, malformed)
    return DayEvents(day=day, u=u, v=v, kind=k, first_sequence=first_sequence), stats


def list_day_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"input directory {directory} does not exist")
    return sorted(p for p in directory.iterdir() if DAY_FILE_RE.match(p.name) and p.is_file())


def day_file_sequence(directory, warmup: int, study: int) -> list[DayFile]:
    """Sorted day files: the first ``warmup`` build the graph, the next ``study`` are analyzed."""
    if warmup < 0 or study < 0:
        raise ValueError("warmup and study must be non-negative")
    files = list_day_files(directory)
    need = warmup + study
    if len(files) < need:
        raise InputError(
            f"{directory} holds {len(files)} day file(s); "
            f"{need} needed ({warmup} warmup + {study} study)"
        )
    return [DayFile(i, p, i >= warmup) for i, p in enumerate(files[:need])]
