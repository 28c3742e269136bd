"""Command-line front end: weights, score, solve, pareto, sweep, metrics.

Exit codes: 0 success, 1 computational failure, 2 input or validation error.
Results go to standard output (or ``--out``); diagnostics go to standard error.
``--manifest PATH`` records input digests, seed and version next to the run.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import hashlib
import io
import json
import os
import sys
from decimal import Decimal
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .ingestion import InputError, dumps_instance, load_instance, load_preferences
from .ingestion.matrix_io import dumps_posterior, load_criteria, load_matrix
from .madm import BWMConvergenceError, MCMCConfig, sample_bbwm, score_waspas, solve_bwm
from .metrics import (
    CLASSIFICATION_COLUMNS,
    REGRESSION_COLUMNS,
    assign_box_office_class,
    classification_report,
    load_predictions,
    regression_report,
)
from .optimizer import (
    ScaleError,
    SolutionInvariantError,
    budget_grid,
    enumerate_pareto,
    solve_scalarized,
    sweep_budget,
    sweep_weight,
)

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT = 0, 1, 2


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def money(x) -> str:
    return f"{Decimal(x):.1f}"


def score(x) -> str:
    return f"{float(x):.6f}"


def _json_money(x) -> float:
    return float(round(Decimal(x), 1))


def _json_score(x) -> Optional[float]:
    return None if x is None else round(float(x), 6)


@dataclasses.dataclass
class Report:
    """A command's output: a JSON document plus tabular sections.

    The first section is the primary data series and is the one written
    in ``csv`` format.
    """

    doc: dict
    sections: list  # (title, columns, rows of preformatted strings)


def _render_table(sections) -> str:
    out = []
    for title, cols, rows in sections:
        if title:
            out.append(title)
        widths = [max([len(c)] + [len(r[i]) for r in rows]) for i, c in enumerate(cols)]
        out.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        for r in rows:
            out.append("  ".join(v.rjust(w) if _numeric(v) else v.ljust(w)
                                 for v, w in zip(r, widths)).rstrip())
        out.append("")
    return "\n".join(out)


def _numeric(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


def render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.doc, indent=2) + "\n"
    if fmt == "csv":
        _, cols, rows = report.sections[0]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        return buf.getvalue()
    return _render_table(report.sections)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _mcmc_config(args) -> MCMCConfig:
    try:
        return MCMCConfig(chains=args.chains, iterations=args.iterations, burn_in=args.burn_in,
                          thinning=args.thinning, seed=args.seed, gamma_shape=args.gamma_shape,
                          gamma_rate=args.gamma_rate, dirichlet_alpha=args.alpha)
    except ValueError as exc:
        raise CLIError(f"invalid MCMC settings: {exc}") from None


def cmd_weights(args) -> Report:
    prefs = load_preferences(args.prefs)
    criteria = list(prefs[0].criteria)
    if args.mode == "bwm":
        results = [solve_bwm(p) for p in prefs]
        weights = np.mean([r.weights for r in results], axis=0)
        rows = [[p.expert_id] + [score(v) for v in r.weights] + [score(r.xi_star), str(r.consistent).lower()]
                for p, r in zip(prefs, results)]
        doc = {
            "mode": "bwm",
            "criteria": criteria,
            "weights": [_json_score(v) for v in weights],
            "experts": [
                {"expert_id": p.expert_id, "weights": [_json_score(v) for v in r.weights],
                 "xi_star": _json_score(r.xi_star), "consistent": r.consistent}
                for p, r in zip(prefs, results)
            ],
        }
        sections = [("", ["criterion", "weight"], [[c, score(v)] for c, v in zip(criteria, weights)])]
        sections.append(("experts", ["expert"] + criteria + ["xi_star", "consistent"], rows))
        return Report(doc, sections)

    cfg = _mcmc_config(args)
    post = sample_bbwm(prefs, cfg, backend=args.backend)
    lo, hi = np.percentile(post.agg_samples, [2.5, 97.5], axis=0)
    doc = {
        "mode": "bbwm",
        "criteria": criteria,
        "weights": [_json_score(v) for v in post.agg_mean],
        "interval_95": [[_json_score(a), _json_score(b)] for a, b in zip(lo, hi)],
        "experts": [{"expert_id": p.expert_id, "weights": [_json_score(v) for v in m]}
                    for p, m in zip(prefs, post.expert_means)],
        "gamma_mean": _json_score(post.gamma_samples.mean()),
        "acceptance_rate": _json_score(post.acceptance_rate),
        "draws": post.n_draws,
        "mcmc": dataclasses.asdict(cfg),
    }
    sections = [
        ("", ["criterion", "weight", "lo95", "hi95"],
         [[c, score(v), score(a), score(b)] for c, v, a, b in zip(criteria, post.agg_mean, lo, hi)]),
        ("experts", ["expert"] + criteria,
         [[p.expert_id] + [score(v) for v in m] for p, m in zip(prefs, post.expert_means)]),
        ("sampler", ["draws", "acceptance_rate", "gamma_mean"],
         [[str(post.n_draws), score(post.acceptance_rate), score(post.gamma_samples.mean())]]),
    ]
    if args.draws_out:
        Path(args.draws_out).write_text(dumps_posterior(post, criteria), encoding="utf-8")
    return Report(doc, sections)


def _parse_weights(text: str, n: int) -> np.ndarray:
    path = Path(text)
    if path.is_file():
        try:
            values = json.loads(path.read_text(encoding="utf-8"))["weights"]
        except (ValueError, KeyError, TypeError):
            raise CLIError(f"{text}: expected a JSON document with a 'weights' list") from None
    else:
        try:
            values = [float(v) for v in text.split(",")]
        except ValueError:
            raise CLIError(f"--weights: expected comma-separated numbers or a JSON file, got {text!r}") from None
    w = np.asarray(values, dtype=float)
    if w.shape != (n,):
        raise CLIError(f"--weights: {w.size} weights for {n} criteria")
    if np.any(w < 0) or w.sum() <= 0:
        raise CLIError("--weights: weights must be non-negative with a positive sum")
    if abs(w.sum() - 1.0) > 1e-6:
        raise CLIError(f"--weights: weights sum to {w.sum():g}, expected 1")
    return w / w.sum()


def _lambda(text: str):
    if text == "optimal":
        return "optimal"
    try:
        lam = float(text)
    except ValueError:
        raise CLIError(f"--lambda: expected 'optimal' or a number, got {text!r}") from None
    if not 0.0 <= lam <= 1.0:
        raise CLIError(f"--lambda: {lam} outside [0, 1]")
    return lam


def _write_preferability(instance_path: str, out_path: str, labels, q) -> None:
    inst = load_instance(instance_path)
    by_id = {str(p.id): i for i, p in enumerate(inst.projects)}
    by_name = {p.name: i for i, p in enumerate(inst.projects)}
    new = list(inst.projects)
    for label, value in zip(labels, q):
        i = by_id.get(label, by_name.get(label))
        if i is None:
            raise CLIError(f"alternative {label!r} matches no project id or name in {instance_path}")
        new[i] = dataclasses.replace(new[i], preferability=float(value))
    Path(out_path).write_text(dumps_instance(dataclasses.replace(inst, projects=tuple(new))), encoding="utf-8")


def cmd_score(args) -> Report:
    criteria = load_criteria(args.criteria) if args.criteria else None
    m = load_matrix(args.matrix, criteria)
    w = _parse_weights(args.weights, m.shape[1])
    res = score_waspas(m, w, lam=_lambda(args.lam), normalization=args.mode)
    rank_of = {i: r + 1 for r, i in enumerate(res.ranking)}
    rows = [[label, score(res.q1[i]), score(res.q2[i]), score(res.lam[i]), score(res.q[i]), str(rank_of[i])]
            for i, label in enumerate(res.alternatives)]
    ties = _ties(res.q, res.alternatives)
    doc = {
        "lambda_mode": args.lam,
        "normalization": args.mode,
        "weights": [_json_score(v) for v in w],
        "alternatives": [
            {"alternative": label, "q1": _json_score(res.q1[i]), "q2": _json_score(res.q2[i]),
             "lambda": _json_score(res.lam[i]), "q": _json_score(res.q[i]), "rank": rank_of[i]}
            for i, label in enumerate(res.alternatives)
        ],
        "ranking": res.ranked_labels(),
        "ties": ties,
    }
    sections = [("", ["alternative", "q1", "q2", "lambda", "q", "rank"], rows)]
    if ties:
        sections.append(("ties (broken by row order)", ["alternatives"], [[", ".join(t)] for t in ties]))
    if args.instance:
        if not args.write_instance:
            raise CLIError("--instance needs --write-instance to say where the updated instance goes")
        _write_preferability(args.instance, args.write_instance, res.alternatives, res.q)
    return Report(doc, sections)


def _ties(q, labels) -> list[list[str]]:
    groups: dict[str, list[str]] = {}
    for v, label in zip(q, labels):
        groups.setdefault(score(v), []).append(label)
    return [g for g in groups.values() if len(g) > 1]


def _solution_doc(sol) -> dict:
    return {
        "selected": list(sol.selected_ids),
        "profit_before_tax": _json_money(sol.profit_before_tax),
        "bracket": sol.bracket_index,
        "tax_rate": float(sol.tax_rate),
        "tax": _json_money(sol.tax_paid),
        "z1": _json_money(sol.z1),
        "z2": _json_score(sol.z2),
        "zw": _json_score(sol.zw),
        "total_cost": _json_money(sol.total_cost),
    }


def _ids(sol) -> str:
    return " ".join(str(i) for i in sol.selected_ids) or "-"


def cmd_solve(args) -> Report:
    inst = load_instance(args.instance)
    sol = solve_scalarized(inst, args.w, method=args.method, backend=args.backend)
    doc = {"w": args.w, "budget": _json_money(inst.budget), "solution": _solution_doc(sol)}
    cols = ["selected", "profit_before_tax", "bracket", "tax", "z1", "z2", "zw", "total_cost"]
    row = [_ids(sol), money(sol.profit_before_tax), str(sol.bracket_index), money(sol.tax_paid),
           money(sol.z1), score(sol.z2), score(sol.zw), money(sol.total_cost)]
    x_rows = [[str(p.id), p.name, str(int(x))] for p, x in zip(inst.projects, sol.selection)]
    return Report(doc, [("", cols, [row]), ("selection", ["id", "name", "x"], x_rows)])


def cmd_pareto(args) -> Report:
    inst = load_instance(args.instance)
    if args.exact:
        front = enumerate_pareto(inst)
    else:
        front = sweep_weight(inst, args.grid, method=args.method, backend=args.backend)
    points = []
    rows = []
    for sol in front:
        ws = sol.weights_producing
        w_range = [min(ws), max(ws)] if ws else None
        points.append({**_solution_doc(sol), "w_range": w_range})
        rows.append([_ids(sol), money(sol.z1), score(sol.z2), money(sol.tax_paid),
                     "" if not ws else score(min(ws)), "" if not ws else score(max(ws))])
    doc = {"method": "exact" if args.exact else "weight-sweep", "grid": None if args.exact else args.grid,
           "points": points}
    return Report(doc, [("", ["selected", "z1", "z2", "tax", "w_min", "w_max"], rows)])


def cmd_sweep(args) -> Report:
    inst = load_instance(args.instance)
    try:
        budgets = budget_grid(args.start, args.stop, args.step)
    except ValueError as exc:
        raise CLIError(f"budget range: {exc}") from None
    if budgets and budgets[0] < 0:
        raise CLIError("budget range: budgets must be nonnegative")
    table = sweep_budget(inst, budgets, args.w, method=args.method, backend=args.backend)
    ids = [str(p.id) for p in inst.projects]
    cols = ["budget"] + [f"x{i}" for i in ids] + ["z1", "z2", "zw", "z1_star"]
    rows, docs = [], []
    for r in table:
        s = r.solution
        rows.append([money(r.budget)] + [str(int(x)) for x in s.selection]
                    + [money(s.z1), score(s.z2), score(s.zw), money(r.z1_star)])
        docs.append({"budget": _json_money(r.budget), **_solution_doc(s), "z1_star": _json_money(r.z1_star)})
    return Report({"w": args.w, "rows": docs}, [("", cols, rows)])


def cmd_metrics(args) -> Report:
    preds = load_predictions(args.predictions)
    if args.kind == "class":
        if args.bucket:
            try:
                truth = [assign_box_office_class(v) for v in preds.actual]
                pred = [assign_box_office_class(v) for v in preds.predicted]
            except ValueError as exc:
                raise CLIError(f"{args.predictions}: {exc}") from None
        else:
            truth, pred = preds.actual.tolist(), preds.predicted.tolist()
        try:
            rep = classification_report(truth, pred)
        except ValueError as exc:
            raise CLIError(f"{args.predictions}: {exc}") from None
        doc = {"kind": "class", "n": rep.n, **{k: _json_score(v) for k, v in rep.row().items()},
               "per_class": [dataclasses.asdict(c) for c in rep.per_class]}
        for c in doc["per_class"]:
            for k in ("accuracy", "precision", "recall", "f1", "mcc"):
                c[k] = _json_score(c[k])
        per = [[str(c.label), str(c.tp), str(c.tn), str(c.fp), str(c.fn), str(c.support),
                score(c.precision), score(c.recall), score(c.f1), score(c.mcc)] for c in rep.per_class]
        return Report(doc, [
            ("", list(CLASSIFICATION_COLUMNS), [[score(v) for v in rep.row().values()]]),
            ("per class", ["class", "tp", "tn", "fp", "fn", "support", "precision", "recall", "f1", "mcc"], per),
        ])
    try:
        rep = regression_report(preds.actual, preds.predicted)
    except ValueError as exc:
        raise CLIError(f"{args.predictions}: {exc}") from None
    for d in rep.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    doc = {"kind": "regress", "n": rep.n, **{k: _json_score(v) for k, v in rep.row().items()},
           "diagnostics": list(rep.diagnostics)}
    row = ["" if v is None else score(v) for v in rep.row().values()]
    return Report(doc, [("", list(REGRESSION_COLUMNS), [row])])


# ---------------------------------------------------------------------------
# manifest and entry point
# ---------------------------------------------------------------------------

_INPUT_FLAGS = ("prefs", "matrix", "criteria", "weights", "instance", "predictions")


def _digest(path: str) -> Optional[str]:
    p = Path(path)
    if not p.is_file():
        return None
    return hashlib.sha256(p.read_bytes()).hexdigest()


def build_manifest(args, argv: Sequence[str], output: str) -> dict:
    inputs = {}
    for flag in _INPUT_FLAGS:
        value = getattr(args, flag, None)
        if value:
            d = _digest(value)
            if d:
                inputs[flag] = {"path": value, "sha256": d}
    return {
        "command": args.command,
        "argv": list(argv),
        "inputs": inputs,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "output_sha256": hashlib.sha256(output.encode("utf-8")).hexdigest(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _weight(text: str) -> float:
    try:
        w = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0.0 <= w <= 1.0:
        raise argparse.ArgumentTypeError(f"{w} outside [0, 1]")
    return w


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filmfolio", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--out", help="write results here instead of standard output")
    common.add_argument("--manifest", help="write a run manifest (JSON) here")
    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--instance", required=True)
    solver.add_argument("--method", choices=("auto", "enumerate", "bnb"), default="auto")
    solver.add_argument("--backend", choices=("auto", "numba", "numpy"), default="auto")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weights", parents=[common], help="criterion weights from expert preferences")
    p.add_argument("--prefs", required=True)
    p.add_argument("--mode", choices=("bwm", "bbwm"), default="bwm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=3)
    p.add_argument("--iterations", type=int, default=20_000)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--thinning", type=int, default=10)
    p.add_argument("--gamma-shape", type=float, default=0.1)
    p.add_argument("--gamma-rate", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=1.0, help="Dirichlet prior on the group weights")
    p.add_argument("--backend", choices=("auto", "numba", "numpy"), default="auto")
    p.add_argument("--draws-out", help="write retained posterior draws (CSV) here")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("score", parents=[common], help="WASPAS preferability scores")
    p.add_argument("--matrix", required=True)
    p.add_argument("--criteria", help="criterion definitions with categorical maps (YAML)")
    p.add_argument("--weights", required=True, help="comma-separated weights or a 'weights' JSON output")
    p.add_argument("--lambda", dest="lam", default="optimal", help="'optimal' or a fixed value in [0, 1]")
    p.add_argument("--mode", choices=("standard", "paper"), default="standard", help="normalization")
    p.add_argument("--instance", help="instance whose preferabilities are replaced by the scores")
    p.add_argument("--write-instance", help="where to write the updated instance")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("solve", parents=[common, solver], help="scalarized portfolio optimum")
    p.add_argument("--w", type=_weight, default=0.5)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pareto", parents=[common, solver], help="Pareto front points")
    p.add_argument("--grid", type=int, default=101, help="number of scalarization weights")
    p.add_argument("--exact", action="store_true", help="exhaustive front instead of a weight sweep")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("sweep", parents=[common, solver], help="budget sensitivity grid")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="stop", required=True)
    p.add_argument("--step", required=True)
    p.add_argument("--w", type=_weight, default=0.5)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", parents=[common], help="prediction validation metrics")
    p.add_argument("--predictions", required=True, help="CSV with columns id,actual,predicted")
    p.add_argument("--kind", choices=("class", "regress"), required=True)
    p.add_argument("--bucket", action="store_true", help="bucket raw box-office values into classes first")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        report = args.func(args)
        output = render(report, args.format)
        if args.out:
            Path(args.out).write_text(output, encoding="utf-8")
        else:
            sys.stdout.write(output)
        if args.manifest:
            Path(args.manifest).write_text(json.dumps(build_manifest(args, argv, output), indent=2) + "\n",
                                           encoding="utf-8")
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InputError, ValueError, OSError) as exc:
        if isinstance(exc, ScaleError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BWMConvergenceError, SolutionInvariantError, ArithmeticError, RuntimeError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
