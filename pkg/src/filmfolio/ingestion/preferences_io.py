"""Expert preference files: one YAML document per expert.

::

    format_version: 1
    expert_id: e1
    criteria: [c1, c2, c3]
    best: c1
    worst: c3
    a_best: [1, 2, 4]        # or a mapping {c1: 1, c2: 2, c3: 4}
    a_worst: [4, 2, 1]
    ---
    expert_id: e2
    ...
"""

from __future__ import annotations

from typing import Iterable

import yaml

from ..madm.types import BestWorstPreference, InvalidPreferenceError
from .common import FORMAT_VERSION, InputError, LineMap, Source, check_version, load_documents, read_source


def _vector(doc, key, criteria, lines: LineMap, name: str) -> list[int]:
    raw = doc.get(key)
    if isinstance(raw, dict):
        unknown = [k for k in raw if k not in criteria]
        if unknown:
            raise InputError(f"unknown criterion {unknown[0]!r}", source=name,
                             line=lines(key, unknown[0]), field=key)
        missing = [c for c in criteria if c not in raw]
        if missing:
            raise InputError(f"no value for criterion {missing[0]!r}", source=name,
                             line=lines(key), field=key)
        values = [raw[c] for c in criteria]
        locs = [lines(key, c) for c in criteria]
    elif isinstance(raw, list):
        if len(raw) != len(criteria):
            raise InputError(f"{len(raw)} values for {len(criteria)} criteria", source=name,
                             line=lines(key), field=key)
        values = raw
        locs = [lines(key, i) for i in range(len(raw))]
    else:
        raise InputError("must be a list or a mapping of criterion to value", source=name,
                         line=lines(key) if key in doc else lines(), field=key)
    out = []
    for c, v, line in zip(criteria, values, locs):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"value for criterion {c!r} must be an integer, got {v!r}",
                             source=name, line=line, field=f"{key}[{c}]")
        if not 1 <= v <= 9:
            raise InputError(f"value {v} for criterion {c!r} outside [1, 9]",
                             source=name, line=line, field=f"{key}[{c}]")
        out.append(v)
    return out


def preference_from_document(doc, lines: LineMap, name: str) -> BestWorstPreference:
    if not isinstance(doc, dict):
        raise InputError("preference document must be a mapping", source=name, line=lines())
    check_version(doc, lines, name)
    for key in ("expert_id", "criteria", "best", "worst", "a_best", "a_worst"):
        if key not in doc:
            raise InputError(f"missing field '{key}'", source=name, line=lines(), field=key)
    criteria = doc["criteria"]
    if not isinstance(criteria, list) or not all(isinstance(c, str) for c in criteria):
        raise InputError("criteria must be a list of ids", source=name, line=lines("criteria"),
                         field="criteria")
    if len(set(criteria)) != len(criteria):
        raise InputError("criterion ids must be unique", source=name, line=lines("criteria"),
                         field="criteria")
    idx = {}
    for key in ("best", "worst"):
        if doc[key] not in criteria:
            raise InputError(f"{key} {doc[key]!r} is not a listed criterion", source=name,
                             line=lines(key), field=key)
        idx[key] = criteria.index(doc[key])
    a_best = _vector(doc, "a_best", criteria, lines, name)
    a_worst = _vector(doc, "a_worst", criteria, lines, name)
    try:
        return BestWorstPreference(str(doc["expert_id"]), idx["best"], idx["worst"],
                                   tuple(a_best), tuple(a_worst), tuple(criteria))
    except InvalidPreferenceError as exc:
        msg = str(exc)
        field = "a_worst" if "a_worst[" in msg and "a_best[" not in msg else "a_best"
        if "differs from" in msg:
            field = "a_worst"
        raise InputError(msg, source=name, line=lines(field), field=field) from None


def load_preferences(source: Source) -> list[BestWorstPreference]:
    """All expert documents in ``source``, in document order."""
    text, name = read_source(source)
    docs = load_documents(text, name)
    if not docs:
        raise InputError("no preference documents found", source=name)
    prefs = [preference_from_document(d, lines, name) for d, lines in docs]
    n = prefs[0].criteria
    for p in prefs[1:]:
        if p.criteria != n:
            raise InputError(f"expert {p.expert_id} uses criteria {list(p.criteria)}, "
                             f"expected {list(n)}", source=name)
    return prefs


def preference_to_document(p: BestWorstPreference) -> dict:
    crit = list(p.criteria) or [f"c{j + 1}" for j in range(p.n)]
    return {
        "format_version": FORMAT_VERSION,
        "expert_id": p.expert_id,
        "criteria": crit,
        "best": crit[p.best],
        "worst": crit[p.worst],
        "a_best": list(p.a_best),
        "a_worst": list(p.a_worst),
    }


def dumps_preferences(prefs: Iterable[BestWorstPreference]) -> str:
    return yaml.safe_dump_all([preference_to_document(p) for p in prefs], sort_keys=False,
                              default_flow_style=None)
