"""Fame scores for directors, writers and leads through pluggable providers.

Two providers ship: :class:`FileFameProvider` reads a delimited table
``name,role,year,score``; :class:`LLMFameProvider` sends a templated prompt
to a text-completion endpoint and reads the first number in the reply.
"""

from __future__ import annotations

import csv
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Protocol, Sequence

from .common import InputError, Source, read_source, strip_version_comment

log = logging.getLogger(__name__)

ROLES = ("director", "writer", "lead")
DEFAULT_YEAR_RANGE = (1900, 2100)
SCORE_MIN, SCORE_MAX = 0.0, 10.0

ENDPOINT_ENV = "FILMFOLIO_FAME_ENDPOINT"
TOKEN_ENV = "FILMFOLIO_FAME_TOKEN"

# editable template; placeholders {name}, {role}, {role_label}, {year}
DEFAULT_PROMPT = resources.files("filmfolio").joinpath("data/fame_prompt.txt").read_text(encoding="utf-8").strip()
_ROLE_LABELS = {"director": "director", "writer": "writer", "lead": "lead actor or actress"}

OK = "ok"
NOT_FOUND = "not_found"
TRANSPORT_ERROR = "transport_error"
PAYLOAD_ERROR = "payload_error"

_NUMBER_RE = re.compile(r"[-+]?\d+(?:\.\d+)?")


@dataclass(frozen=True)
class FameQuery:
    person_name: str
    role: str
    release_year: int
    year_range: tuple[int, int] = field(default=DEFAULT_YEAR_RANGE, compare=False, repr=False)

    def __post_init__(self):
        if not self.person_name or not self.person_name.strip():
            raise ValueError("fame query needs a non-empty name")
        if self.role not in ROLES:
            raise ValueError(f"role {self.role!r} not one of {', '.join(ROLES)}")
        lo, hi = self.year_range
        if isinstance(self.release_year, bool) or not isinstance(self.release_year, int) \
                or not lo <= self.release_year <= hi:
            raise ValueError(f"release year {self.release_year!r} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class FameResult:
    """Outcome of one query. ``score`` is set only when ``status == "ok"``."""

    query: FameQuery
    status: str
    score: Optional[float] = None
    warnings: tuple[str, ...] = ()
    error: Optional[str] = None

    @property
    def found(self) -> bool:
        return self.status == OK


class FameProvider(Protocol):
    def resolve(self, query: FameQuery) -> FameResult: ...


def clamp_score(query: FameQuery, score: float) -> FameResult:
    if SCORE_MIN <= score <= SCORE_MAX:
        return FameResult(query, OK, float(score))
    clamped = min(max(score, SCORE_MIN), SCORE_MAX)
    msg = f"score {score:g} for {query.person_name} ({query.role}, {query.release_year}) clamped to {clamped:g}"
    log.warning(msg)
    return FameResult(query, OK, clamped, warnings=(msg,))


def _key(name: str, role: str, year: int) -> tuple[str, str, int]:
    return " ".join(name.split()).casefold(), role, year


class FileFameProvider:
    """Deterministic lookup in a ``name,role,year,score`` table.

    Names match case-insensitively with whitespace collapsed.
    """

    def __init__(self, source: Source):
        text, name = read_source(source)
        lines = strip_version_comment(text.splitlines(), name)
        rows = [(i, r) for i, r in enumerate(csv.reader(lines), start=1) if r and any(c.strip() for c in r)]
        if not rows:
            raise InputError("empty fame table", source=name)
        header_line, header = rows[0]
        if [h.strip().lower() for h in header] != ["name", "role", "year", "score"]:
            raise InputError("header must be name,role,year,score", source=name, line=header_line)
        self._scores: dict[tuple[str, str, int], float] = {}
        for line, row in rows[1:]:
            if len(row) != 4:
                raise InputError(f"expected 4 columns, found {len(row)}", source=name, line=line)
            person, role, year, score = (c.strip() for c in row)
            if role not in ROLES:
                raise InputError(f"role {role!r} not one of {', '.join(ROLES)}", source=name, line=line,
                                 field="role")
            try:
                year_i = int(year)
            except ValueError:
                raise InputError(f"malformed year {year!r}", source=name, line=line, field="year") from None
            try:
                value = float(score)
            except ValueError:
                raise InputError(f"malformed score {score!r}", source=name, line=line, field="score") from None
            if not SCORE_MIN <= value <= SCORE_MAX:
                raise InputError(f"score {value:g} outside [0, 10]", source=name, line=line, field="score")
            key = _key(person, role, year_i)
            if key in self._scores:
                raise InputError(f"duplicate entry for {person} ({role}, {year_i})", source=name, line=line)
            self._scores[key] = value

    def resolve(self, query: FameQuery) -> FameResult:
        value = self._scores.get(_key(query.person_name, query.role, query.release_year))
        if value is None:
            return FameResult(query, NOT_FOUND)
        return FameResult(query, OK, value)


class FamePayloadError(ValueError):
    pass


def extract_reply(payload) -> str:
    """Reply text from a completion payload.

    Accepts ``{"text": ...}``, ``{"completion": ...}`` or the chat-style
    ``{"choices": [{"message": {"content": ...}}]}`` / ``{"choices": [{"text": ...}]}``.
    """
    if isinstance(payload, dict):
        for key in ("text", "completion"):
            if isinstance(payload.get(key), str):
                return payload[key]
        choices = payload.get("choices")
        if isinstance(choices, list) and choices and isinstance(choices[0], dict):
            first = choices[0]
            msg = first.get("message")
            if isinstance(msg, dict) and isinstance(msg.get("content"), str):
                return msg["content"]
            if isinstance(first.get("text"), str):
                return first["text"]
    raise FamePayloadError("response carries no reply text")


def first_number(text: str) -> Optional[float]:
    m = _NUMBER_RE.search(text)
    return float(m.group()) if m else None


class LLMFameProvider:
    """Fame scores from a remote text-completion endpoint.

    The endpoint URL and bearer token default to the ``FILMFOLIO_FAME_ENDPOINT``
    and ``FILMFOLIO_FAME_TOKEN`` environment variables. The request body is
    ``{"prompt": <rendered template>}``. A reply with no number counts as
    not-found; out-of-range numbers are clamped to [0, 10] with a warning.
    Transport failures (connection errors, timeouts, 429 and 5xx replies) are
    retried ``retries`` times and then reported on the result.
    """

    def __init__(self, endpoint: Optional[str] = None, token: Optional[str] = None, *,
                 template: str = DEFAULT_PROMPT, retries: int = 2, timeout: float = 30.0, client=None):
        import httpx

        self._httpx = httpx
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        if not self.endpoint:
            raise ValueError(f"no fame endpoint configured (set {ENDPOINT_ENV})")
        self.token = token if token is not None else os.environ.get(TOKEN_ENV)
        if retries < 0:
            raise ValueError("retries must be >= 0")
        self.template = template
        self.retries = retries
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        if client is None:
            client = httpx.Client(timeout=timeout, headers=headers)
        else:
            for k, v in headers.items():
                client.headers.setdefault(k, v)
        self._client = client

    def prompt(self, query: FameQuery) -> str:
        return self.template.format(name=query.person_name, role=query.role,
                                    role_label=_ROLE_LABELS[query.role], year=query.release_year)

    def _post(self, body: dict):
        httpx = self._httpx
        last = None
        for _ in range(self.retries + 1):
            try:
                resp = self._client.post(self.endpoint, json=body)
            except httpx.TransportError as exc:
                last = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                return None, f"HTTP {resp.status_code}"
            return resp, None
        return None, last

    def resolve(self, query: FameQuery) -> FameResult:
        resp, err = self._post({"prompt": self.prompt(query)})
        if resp is None:
            return FameResult(query, TRANSPORT_ERROR, error=err)
        try:
            text = extract_reply(resp.json())
        except ValueError as exc:
            return FameResult(query, PAYLOAD_ERROR, error=f"malformed payload: {exc}")
        value = first_number(text)
        if value is None:
            return FameResult(query, NOT_FOUND)
        return clamp_score(query, value)

    def close(self) -> None:
        self._client.close()


def resolve_fame_scores(provider: FameProvider, queries: Sequence[FameQuery],
                        max_workers: int = 4) -> list[FameResult]:
    """Resolve every query, concurrently up to ``max_workers``; results keep query order.

    Out-of-range scores from any provider are clamped here as well.
    """
    if max_workers < 1:
        raise ValueError("max_workers must be >= 1")

    def one(q: FameQuery) -> FameResult:
        r = provider.resolve(q)
        if r.found and not SCORE_MIN <= r.score <= SCORE_MAX:
            c = clamp_score(q, r.score)
            return FameResult(q, OK, c.score, r.warnings + c.warnings)
        return r

    if max_workers == 1 or len(queries) <= 1:
        return [one(q) for q in queries]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, queries))
