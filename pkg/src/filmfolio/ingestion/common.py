"""Shared parsing helpers: sources, located errors, money, line tracking."""

from __future__ import annotations

import io
import os
import re
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any, Optional, Union

import yaml

FORMAT_VERSION = 1

Source = Union[str, os.PathLike, io.TextIOBase]

_MONEY_RE = re.compile(r"^-?(\d{1,3}(,\d{3})+|\d+)(\.\d)?$")


class InputError(ValueError):
    """Parse or validation failure with a stable, location-bearing message."""

    def __init__(self, message: str, *, source: str = "<input>", line: Optional[int] = None,
                 field: Optional[str] = None):
        self.source = source
        self.line = line
        self.field = field
        self.message = message
        loc = source if line is None else f"{source}:{line}"
        where = f" [{field}]" if field else ""
        super().__init__(f"{loc}:{where} {message}")


def read_source(source: Source) -> tuple[str, str]:
    """``(text, name)`` for a path or an open text stream."""
    if hasattr(source, "read"):
        return source.read(), getattr(source, "name", "<stream>")
    path = Path(source)
    try:
        return path.read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise InputError(f"cannot read: {exc.strerror}", source=str(path)) from None


def parse_money(value: Any, *, field: str = "amount", source: str = "<input>",
                line: Optional[int] = None) -> Decimal:
    """Exact currency amount; thousands separators and one decimal allowed."""
    if isinstance(value, bool):
        raise InputError(f"expected an amount, got {value!r}", source=source, line=line, field=field)
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, float):
        text = repr(value)
        if "e" in text or "E" in text:
            text = format(Decimal(text), "f")
    elif isinstance(value, (str, Decimal)):
        text = str(value).strip()
    else:
        raise InputError(f"expected an amount, got {value!r}", source=source, line=line, field=field)
    if text.endswith(".0"):
        text = text[:-2]
    if not _MONEY_RE.match(text):
        raise InputError(f"malformed amount {value!r}", source=source, line=line, field=field)
    try:
        return Decimal(text.replace(",", ""))
    except InvalidOperation:  # pragma: no cover - regex already rules this out
        raise InputError(f"malformed amount {value!r}", source=source, line=line, field=field) from None


def format_money(value: Decimal):
    """JSON-friendly money: int when integral, else a one-decimal string."""
    if value == value.to_integral_value():
        return int(value)
    return format(value, "f")


class LineMap:
    """Maps document paths like ``("projects", 2, "cost")`` to 1-based lines."""

    def __init__(self, lines: dict):
        self._lines = lines

    def __call__(self, *path) -> Optional[int]:
        while path:
            if path in self._lines:
                return self._lines[path]
            path = path[:-1]
        return self._lines.get((), None)


def _walk(node, path, out):
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key, val in node.value:
            _walk(val, path + (key.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, val in enumerate(node.value):
            _walk(val, path + (i,), out)


def load_documents(text: str, name: str) -> list[tuple[Any, LineMap]]:
    """Parse one or more YAML/JSON documents, keeping line numbers per node."""
    try:
        data = list(yaml.safe_load_all(text))
        nodes = list(yaml.compose_all(text))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise InputError(f"parse error: {problem}", source=name, line=line) from None
    docs = []
    for d, node in zip(data, nodes):
        if d is None:
            continue
        lines: dict = {}
        _walk(node, (), lines)
        docs.append((d, LineMap(lines)))
    return docs


def check_version(doc: dict, lines: LineMap, name: str) -> None:
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise InputError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION})",
            source=name, line=lines("format_version"), field="format_version",
        )


def strip_version_comment(lines: list[str], name: str) -> list[str]:
    """Drop leading ``# key: value`` comment lines of a delimited file, checking the version."""
    out = []
    for i, line in enumerate(lines, start=1):
        s = line.strip()
        if s.startswith("#"):
            m = re.match(r"#\s*format_version\s*:\s*(\S+)", s)
            if m and m.group(1) != str(FORMAT_VERSION):
                raise InputError(f"unsupported format_version {m.group(1)!r}", source=name, line=i)
            out.append("")  # keep line numbering stable
            continue
        out.append(line)
    return out
