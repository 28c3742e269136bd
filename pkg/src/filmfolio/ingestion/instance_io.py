"""Instance documents (JSON or YAML).

::

    format_version: 1
    budget: 400,000
    tax_brackets:
      - {upper: 100000, rate: 0.10}
      - {upper: null, rate: 0.40}
    projects:
      - {id: 1, name: "...", revenue: 567328, cost: 123562, preferability: 0.193}
"""

from __future__ import annotations

import json
import re
from decimal import Decimal
from typing import Optional

from ..optimizer.model import Bracket, Instance, InvalidInstanceError, Project, TaxSchedule, to_decimal
from .common import (
    FORMAT_VERSION,
    InputError,
    LineMap,
    Source,
    check_version,
    format_money,
    load_documents,
    parse_money,
    read_source,
)


def _rate(value, *, where, name, line) -> Decimal:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise InputError(f"rate must be a number, got {value!r}", source=name, line=line, field=where)
    try:
        return to_decimal(value if not isinstance(value, str) else value.strip())
    except Exception:
        raise InputError(f"malformed rate {value!r}", source=name, line=line, field=where) from None


def parse_tax_brackets(raw, lines: LineMap, name: str, base=("tax_brackets",)) -> TaxSchedule:
    if not isinstance(raw, list) or not raw:
        raise InputError("tax_brackets must be a non-empty list", source=name, line=lines(*base),
                         field="tax_brackets")
    brackets = []
    for i, b in enumerate(raw):
        where = f"tax_brackets[{i}]"
        line = lines(*base, i)
        if not isinstance(b, dict) or "rate" not in b or "upper" not in b:
            raise InputError("each bracket needs 'upper' and 'rate'", source=name, line=line, field=where)
        upper = None if b["upper"] is None else parse_money(
            b["upper"], field=f"{where}.upper", source=name, line=lines(*base, i, "upper"))
        rate = _rate(b["rate"], where=f"{where}.rate", name=name, line=lines(*base, i, "rate"))
        brackets.append(Bracket(upper, rate))
    try:
        return TaxSchedule(tuple(brackets))
    except InvalidInstanceError as exc:
        m = re.match(r"bracket (\d+)", str(exc))
        path = base + (int(m.group(1)) - 1,) if m else base
        raise InputError(str(exc), source=name, line=lines(*path), field="tax_brackets") from None


def _parse_project(raw, i, lines: LineMap, name: str) -> Project:
    where = f"projects[{i}]"
    line = lines("projects", i)
    if not isinstance(raw, dict):
        raise InputError("project entry must be a mapping", source=name, line=line, field=where)
    for key in ("id", "revenue", "cost", "preferability"):
        if key not in raw:
            raise InputError(f"missing field '{key}'", source=name, line=line, field=where)
    pid = raw["id"]
    if isinstance(pid, bool) or not isinstance(pid, int):
        raise InputError(f"id must be an integer, got {pid!r}", source=name,
                         line=lines("projects", i, "id"), field=f"{where}.id")
    pref = raw["preferability"]
    if isinstance(pref, bool) or not isinstance(pref, (int, float)):
        raise InputError(f"preferability must be a number, got {pref!r}", source=name,
                         line=lines("projects", i, "preferability"), field=f"{where}.preferability")
    money = {
        key: parse_money(raw[key], field=f"{where}.{key}", source=name, line=lines("projects", i, key))
        for key in ("revenue", "cost")
    }
    try:
        return Project(pid, str(raw.get("name", f"project {pid}")), money["revenue"], money["cost"], float(pref))
    except InvalidInstanceError as exc:
        field = "cost" if "cost" in str(exc) else "preferability"
        raise InputError(str(exc), source=name, line=lines("projects", i, field),
                         field=f"{where}.{field}") from None


def instance_from_document(doc, lines: LineMap, name: str) -> Instance:
    if not isinstance(doc, dict):
        raise InputError("instance document must be a mapping", source=name, line=lines())
    check_version(doc, lines, name)
    for key in ("projects", "budget", "tax_brackets"):
        if key not in doc:
            raise InputError(f"missing field '{key}'", source=name, line=lines(), field=key)
    if not isinstance(doc["projects"], list):
        raise InputError("projects must be a list", source=name, line=lines("projects"), field="projects")
    projects = [_parse_project(p, i, lines, name) for i, p in enumerate(doc["projects"])]
    seen: dict[int, int] = {}
    for i, p in enumerate(projects):
        if p.id in seen:
            raise InputError(f"duplicate project id {p.id} (first at projects[{seen[p.id]}])",
                             source=name, line=lines("projects", i, "id"), field=f"projects[{i}].id")
        seen[p.id] = i
    budget = parse_money(doc["budget"], field="budget", source=name, line=lines("budget"))
    tax = parse_tax_brackets(doc["tax_brackets"], lines, name)
    try:
        return Instance(tuple(projects), budget, tax)
    except InvalidInstanceError as exc:
        raise InputError(str(exc), source=name, line=lines("budget"), field="budget") from None


def load_instance(source: Source) -> Instance:
    text, name = read_source(source)
    docs = load_documents(text, name)
    if len(docs) != 1:
        raise InputError(f"expected exactly one instance document, found {len(docs)}", source=name)
    return instance_from_document(*docs[0], name)


def instance_to_document(inst: Instance, name: Optional[str] = None) -> dict:
    doc = {"format_version": FORMAT_VERSION}
    if name:
        doc["name"] = name
    doc["budget"] = format_money(inst.budget)
    doc["tax_brackets"] = [
        {"upper": None if b.upper is None else format_money(b.upper), "rate": float(b.rate)}
        for b in inst.tax.brackets
    ]
    doc["projects"] = [
        {
            "id": p.id,
            "name": p.name,
            "revenue": format_money(p.revenue),
            "cost": format_money(p.cost),
            "preferability": p.preferability,
        }
        for p in inst.projects
    ]
    return doc


def dumps_instance(inst: Instance, name: Optional[str] = None) -> str:
    return json.dumps(instance_to_document(inst, name), indent=2) + "\n"


def dump_instance(inst: Instance, path, name: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(inst, name))
