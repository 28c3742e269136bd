"""Movie dataset records (one CSV row per movie) with optional inflation adjustment."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Mapping, Optional

from .common import InputError, Source, read_source, strip_version_comment

COLUMNS = (
    "title", "release_year", "rating", "genre", "franchise_or_sequel", "released_month",
    "imdb_score", "imdb_votes", "director_fame", "writer_fame", "lead_fame", "domestic",
    "runtime", "budget", "box_office",
)
_OPTIONAL = {"title", "release_year"}
_TRUE = {"1", "true", "yes", "y"}
_FALSE = {"0", "false", "no", "n"}


@dataclass(frozen=True)
class MovieRecord:
    rating: str
    genre: str
    franchise_or_sequel: bool
    released_month: int
    imdb_score: float
    imdb_votes: int
    director_fame: float
    writer_fame: float
    lead_fame: float
    domestic: bool
    runtime: float
    budget: float
    box_office: float
    title: str = ""
    release_year: Optional[int] = None

    def __post_init__(self):
        if not 1 <= self.released_month <= 12:
            raise ValueError(f"released_month {self.released_month} outside 1-12")
        if not 0 <= self.imdb_score <= 10:
            raise ValueError(f"imdb_score {self.imdb_score} outside [0, 10]")
        for name in ("director_fame", "writer_fame", "lead_fame"):
            v = getattr(self, name)
            if not 0 <= v <= 10:
                raise ValueError(f"{name} {v} outside [0, 10]")
        for name in ("imdb_votes", "runtime", "budget", "box_office"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _convert(col: str, text: str):
    if col in ("rating", "genre", "title"):
        return text.strip()
    if col in ("franchise_or_sequel", "domestic"):
        return _bool(text)
    if col in ("released_month", "imdb_votes", "release_year"):
        return int(text.replace(",", ""))
    return float(text.replace(",", ""))


def adjust_for_inflation(rec: MovieRecord, multipliers: Mapping[int, float]) -> MovieRecord:
    """Scale budget and box office by the multiplier for the record's release year."""
    if rec.release_year is None:
        raise ValueError("inflation adjustment needs a release_year")
    if rec.release_year not in multipliers:
        raise ValueError(f"no inflation multiplier for {rec.release_year}")
    k = float(multipliers[rec.release_year])
    if k <= 0:
        raise ValueError(f"inflation multiplier for {rec.release_year} must be positive")
    return replace(rec, budget=rec.budget * k, box_office=rec.box_office * k)


def load_movies(source: Source, inflation: Optional[Mapping[int, float]] = None) -> list[MovieRecord]:
    text, name = read_source(source)
    lines = strip_version_comment(text.splitlines(), name)
    rows = [(i, r) for i, r in enumerate(csv.reader(lines), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty movie file", source=name)
    header_line, header = rows[0]
    header = [h.strip() for h in header]
    unknown = [h for h in header if h not in COLUMNS]
    if unknown:
        raise InputError(f"unknown column {unknown[0]!r}", source=name, line=header_line)
    missing = [c for c in COLUMNS if c not in header and c not in _OPTIONAL]
    if missing:
        raise InputError(f"missing column {missing[0]!r}", source=name, line=header_line)
    out = []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} columns, found {len(row)}", source=name, line=line)
        values = {}
        for col, cell in zip(header, row):
            try:
                values[col] = _convert(col, cell)
            except ValueError:
                raise InputError(f"malformed value {cell!r}", source=name, line=line, field=col) from None
        try:
            rec = MovieRecord(**values)
            if inflation is not None:
                rec = adjust_for_inflation(rec, inflation)
        except ValueError as exc:
            raise InputError(str(exc), source=name, line=line) from None
        out.append(rec)
    return out


def load_inflation(source: Source) -> dict[int, float]:
    """Per-year multipliers from a ``year,multiplier`` table."""
    text, name = read_source(source)
    lines = strip_version_comment(text.splitlines(), name)
    rows = [(i, r) for i, r in enumerate(csv.reader(lines), start=1) if r and any(c.strip() for c in r)]
    if not rows or [h.strip().lower() for h in rows[0][1]] != ["year", "multiplier"]:
        raise InputError("header must be year,multiplier", source=name, line=rows[0][0] if rows else None)
    out = {}
    for line, row in rows[1:]:
        try:
            year, k = int(row[0]), float(row[1])
        except (ValueError, IndexError):
            raise InputError("malformed row", source=name, line=line) from None
        if k <= 0:
            raise InputError(f"multiplier {k:g} must be positive", source=name, line=line)
        out[year] = k
    return out
