"""Decision-matrix CSV files and posterior draw exports.

Matrix layout: a header of criterion ids, each suffixed ``+`` (beneficial)
or ``-`` (non-beneficial), then one row per alternative::

    # format_version: 1
    alternative,c1+,c2+,c3-
    Movie A,PG-13,Action,7.5

Non-numeric cells are resolved through the criterion's ``categorical_map``,
supplied separately (see :func:`load_criteria`).
"""

from __future__ import annotations

import csv
import io
from typing import Optional, Sequence

import numpy as np

from ..madm.types import (
    BENEFICIAL,
    NON_BENEFICIAL,
    CriterionSpec,
    DecisionMatrix,
    InvalidMatrixError,
    WeightPosterior,
)
from .common import FORMAT_VERSION, InputError, Source, check_version, load_documents, read_source, strip_version_comment


def load_criteria(source: Source) -> dict[str, CriterionSpec]:
    """Criterion definitions (names, directions, categorical maps) from YAML.

    ::

        format_version: 1
        criteria:
          - {id: c1, name: rating, direction: beneficial, categorical_map: {G: 6, R: 8}}
    """
    text, name = read_source(source)
    docs = load_documents(text, name)
    if len(docs) != 1:
        raise InputError("expected one criteria document", source=name)
    doc, lines = docs[0]
    if not isinstance(doc, dict) or not isinstance(doc.get("criteria"), list):
        raise InputError("document needs a 'criteria' list", source=name, line=lines())
    check_version(doc, lines, name)
    out: dict[str, CriterionSpec] = {}
    for i, raw in enumerate(doc["criteria"]):
        line = lines("criteria", i)
        if not isinstance(raw, dict) or "id" not in raw:
            raise InputError("criterion entry needs an 'id'", source=name, line=line)
        cid = str(raw["id"])
        if cid in out:
            raise InputError(f"duplicate criterion id {cid!r}", source=name, line=line, field="id")
        cmap = raw.get("categorical_map")
        if cmap is not None and not isinstance(cmap, dict):
            raise InputError("categorical_map must be a mapping", source=name, line=line)
        try:
            out[cid] = CriterionSpec(cid, str(raw.get("name", cid)), raw.get("direction", BENEFICIAL),
                                     {str(k): float(v) for k, v in cmap.items()} if cmap else None)
        except (InvalidMatrixError, TypeError, ValueError) as exc:
            raise InputError(str(exc), source=name, line=line, field=cid) from None
    return out


def _parse_header(cell: str, col: int, name: str) -> tuple[str, str]:
    cell = cell.strip()
    if cell.endswith("+"):
        return cell[:-1].strip(), BENEFICIAL
    if cell.endswith("-"):
        return cell[:-1].strip(), NON_BENEFICIAL
    raise InputError(f"header column {col + 1} ({cell!r}) needs a '+' or '-' direction suffix",
                     source=name, line=None)


def load_matrix(source: Source, criteria: Optional[dict[str, CriterionSpec]] = None) -> DecisionMatrix:
    text, name = read_source(source)
    lines = strip_version_comment(text.splitlines(), name)
    rows = [(i, r) for i, r in enumerate(csv.reader(lines), start=1) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError("empty matrix file", source=name)
    header_line, header = rows[0]
    if len(header) < 2:
        raise InputError("header needs an alternative column and at least one criterion",
                         source=name, line=header_line)
    specs = []
    for col, cell in enumerate(header[1:], start=1):
        try:
            cid, direction = _parse_header(cell, col, name)
        except InputError as exc:
            raise InputError(exc.message, source=name, line=header_line) from None
        base = (criteria or {}).get(cid)
        if base is not None and base.direction != direction:
            raise InputError(f"criterion {cid!r} is {direction} in the header but {base.direction} "
                             f"in the criteria definitions", source=name, line=header_line)
        specs.append(CriterionSpec(cid, base.name if base else cid, direction,
                                   base.categorical_map if base else None))
    if len({s.id for s in specs}) != len(specs):
        raise InputError("duplicate criterion id in header", source=name, line=header_line)
    labels, values = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise InputError(f"expected {len(header)} columns, found {len(row)}", source=name, line=line)
        labels.append(row[0].strip())
        vals = []
        for spec, cell in zip(specs, row[1:]):
            cell = cell.strip()
            try:
                v = float(cell)
            except ValueError:
                try:
                    v = spec.encode(cell)
                except (InvalidMatrixError, ValueError) as exc:
                    msg = str(exc) if spec.categorical_map else f"non-numeric value {cell!r} and no categorical map"
                    raise InputError(msg, source=name, line=line, field=spec.id) from None
            if not v > 0:
                raise InputError(f"value {cell} must be strictly positive", source=name, line=line,
                                 field=spec.id)
            vals.append(v)
        values.append(vals)
    if not values:
        raise InputError("matrix has no alternatives", source=name)
    try:
        return DecisionMatrix(tuple(labels), tuple(specs), np.array(values))
    except InvalidMatrixError as exc:
        raise InputError(str(exc), source=name) from None


def dumps_matrix(m: DecisionMatrix) -> str:
    buf = io.StringIO()
    buf.write(f"# format_version: {FORMAT_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alternative"] + [c.id + ("+" if c.beneficial else "-") for c in m.criteria])
    for label, row in zip(m.alternatives, m.values):
        w.writerow([label] + [repr(float(v)) for v in row])
    return buf.getvalue()


def dumps_posterior(post: WeightPosterior, criteria: Sequence[str]) -> str:
    """Retained draws, one per line: chain, draw index, aggregate weights, concentration."""
    buf = io.StringIO()
    buf.write(f"# format_version: {FORMAT_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["chain", "draw"] + [f"w_agg[{c}]" for c in criteria] + ["gamma"])
    per_chain = post.config.retained_per_chain
    for i, (row, g) in enumerate(zip(post.agg_samples, post.gamma_samples)):
        w.writerow([i // per_chain, i % per_chain] + [repr(float(v)) for v in row] + [repr(float(g))])
    return buf.getvalue()
