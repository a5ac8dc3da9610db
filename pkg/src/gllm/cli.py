"""Command-line front end: ``gllm {fit,select,classify,simulate}``.

Exit status: 0 success, 2 input or parse error, 3 numeric failure
(undefined fit, IPF not converged).
"""
import argparse
import json
import os
import sys

import numpy as np

from gllm import __version__, datasets
from gllm.fit import DEFAULT_MAX_ITER, DEFAULT_TOL, FitError, fit, render_factorization
from gllm.markov import implied_independences
from gllm.model import (ModelError, classify, infer_factors, interaction_graph,
                        parse_model, render_model)
from gllm.sample import SCHEMES, SamplingScheme, rng_identity, sample
from gllm.select import TIE_RULES, backward_select
from gllm.stats import goodness_of_fit
from gllm.table import ContingencyTable, FactorSpec, TableError, read_csv, to_csv

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


class NumericFailure(Exception):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def load_table(spec: str) -> ContingencyTable:
    """A CSV path, or the name of a bundled dataset."""
    if os.path.exists(spec):
        return read_csv(spec)
    if spec in datasets.NAMES:
        return datasets.load(spec)
    raise InputError(f"no such table file or bundled dataset: {spec!r}")


def _input_digest(t: ContingencyTable) -> dict:
    return {
        "factors": [{"name": f.name, "levels": list(f.levels)} for f in t.factors],
        "N": t.total,
    }


def _test_dict(r) -> dict:
    return {"g2": r.g2, "pearson_x2": r.pearson_x2, "df": r.df, "p_g2": r.p_g2, "p_x2": r.p_x2}


def _base(command: list) -> dict:
    return {"command": command, "version": __version__}


def cmd_fit(table_path, model_string, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, command=()):
    t = load_table(table_path)
    gc = parse_model(model_string, t.factors)
    fr = fit(t, gc, tol=tol, max_iter=max_iter)
    test = goodness_of_fit(t, fr.fitted, fr.df)
    report = _base(list(command))
    report.update({
        "input": _input_digest(t),
        "model": {"string": render_model(gc), "classification": classify(gc)},
        "fit": {
            "method": fr.method,
            "iterations": fr.iterations,
            "converged": fr.converged,
            "max_margin_deviation": fr.max_margin_deviation,
            "df": fr.df,
            "cells": [
                {"labels": list(labels), "observed": obs, "fitted": float(fr.fitted.cell(labels))}
                for labels, obs in t.records()
            ],
        },
        "test": _test_dict(test),
    })
    if not fr.converged:
        raise NumericFailure(
            f"IPF did not converge in {fr.iterations} cycles "
            f"(max margin deviation {fr.max_margin_deviation:.3g} > tol {tol:g})", report)
    return report


def _trace_dict(trace) -> dict:
    steps = []
    for s in trace.steps:
        steps.append({
            "model": render_model(s.model),
            "candidates": [
                {"edge": c.label, "clique": render_model(c.reduced_model), "df": c.df,
                 "g2": c.g2, "p": c.p, "model_df": c.model_df, "model_g2": c.model_g2}
                for c in s.candidates
            ],
            "chosen": None if s.chosen is None else "".join(s.chosen),
            "stop_reason": s.stop_reason,
        })
    return {"alpha": trace.alpha, "tie_rule": trace.tie_rule, "steps": steps,
            "final_model": render_model(trace.final_model)}


def cmd_select(table_path, alpha=0.05, tie_rule="lexicographic", command=()):
    t = load_table(table_path)
    trace = backward_select(t, alpha=alpha, tie_rule=tie_rule)
    final = fit(t, trace.final_model)
    report = _base(list(command))
    report.update({
        "input": _input_digest(t),
        "trace": _trace_dict(trace),
        "model": {"string": render_model(trace.final_model),
                  "classification": classify(trace.final_model)},
        "test": _test_dict(goodness_of_fit(t, final.fitted, final.df)),
    })
    return report


def cmd_classify(model_string, factors=None, command=()):
    if factors is None:
        factors = infer_factors(model_string)
    gc = parse_model(model_string, factors)
    flags = classify(gc)
    g = interaction_graph(gc)
    order = gc.factors
    report = _base(list(command))
    report["model"] = {
        "string": render_model(gc),
        "factors": list(gc.factors),
        "classification": flags,
        "graph": g.render(),
        "independences": ([st.render(order) for st in implied_independences(gc)]
                          if flags["graphical"] else None),
        "factorization": render_factorization(gc) if flags["decomposable"] else None,
    }
    return report


def _uniform_table(levels: list, value: float) -> ContingencyTable:
    factors = [FactorSpec(str(i + 1), tuple(str(j + 1) for j in range(n)))
               for i, n in enumerate(levels)]
    shape = tuple(levels)
    return ContingencyTable(factors, np.full(shape, float(value)))


def cmd_simulate(scheme, table=None, levels=None, n=None, mean=None, fixed=(), seed=0,
                 out_path=None, command=()):
    if table is not None:
        base = load_table(table)
    elif levels:
        if scheme == "product-multinomial":
            raise InputError("product-multinomial sampling needs --table with expected counts")
        base = _uniform_table(levels, 1.0 if mean is None else mean)
    else:
        raise InputError("give --table or --levels")
    if scheme == "multinomial" and n is None and table is None:
        raise InputError("multinomial sampling needs --n")
    sch = SamplingScheme(scheme, frozenset(fixed), seed)
    drawn = sample(sch, base, n_total=n)
    report = _base(list(command))
    digest = _input_digest(base)
    if table is None:
        # generated uniform weights, not observed counts
        digest["N"] = None
    report.update({
        "input": digest,
        "sampling": {"scheme": scheme, "seed": seed, "rng": rng_identity(),
                     "fixed_factors": sorted(fixed), "N": drawn.total},
    })
    csv_text = to_csv(drawn)
    if out_path:
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(csv_text)
        report["sampling"]["out"] = out_path
    else:
        report["table"] = [{"labels": list(lab), "count": c} for lab, c in drawn.records()]
    return report


# ---------------------------------------------------------------- rendering

def _f(x) -> str:
    return f"{x:.5f}"


def _align(rows: list) -> list:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def render_text(report: dict) -> str:
    lines = [f"gllm {report['version']}: {' '.join(report['command'])}".rstrip()]
    inp = report.get("input")
    if inp:
        facs = ", ".join(f"{f['name']}({len(f['levels'])})" for f in inp["factors"])
        lines.append(f"table: {facs}" + ("" if inp["N"] is None else f"; N = {inp['N']:g}"))
    model = report.get("model")
    if model:
        lines.append(f"model: {model['string']}")
        flags = model["classification"]
        lines.append("  " + "  ".join(f"{k}: {'yes' if v else 'no'}" for k, v in sorted(flags.items())))
        if "graph" in model:
            lines.append(f"  graph: {model['graph'] or '(no edges)'}")
        if model.get("factorization"):
            lines.append(f"  closed form: {model['factorization']}")
        if model.get("independences") is not None:
            lines.append("  independences:" + ("" if model["independences"] else " none"))
            lines.extend(f"    {s}" for s in model["independences"])
    fitd = report.get("fit")
    if fitd:
        lines.append(f"method: {fitd['method']}  iterations: {fitd['iterations']}  "
                     f"converged: {'yes' if fitd['converged'] else 'no'}  "
                     f"max margin deviation: {fitd['max_margin_deviation']:.3e}")
        names = [f["name"] for f in inp["factors"]]
        rows = [names + ["observed", "fitted"]]
        rows += [c["labels"] + [_f(c["observed"]), _f(c["fitted"])] for c in fitd["cells"]]
        lines.extend(_align(rows))
    trace = report.get("trace")
    if trace:
        lines.append(f"backward elimination, alpha = {trace['alpha']:g}")
        for i, step in enumerate(trace["steps"], 1):
            lines.append(f"step {i}: {step['model']}")
            rows = [["Edge", "Clique", "d.f.", "G2", "p-value"]]
            rows += [[c["edge"], c["clique"], str(c["df"]), _f(c["g2"]), _f(c["p"])]
                     for c in step["candidates"]]
            if len(rows) > 1:
                lines.extend("  " + r for r in _align(rows))
            if step["chosen"]:
                lines.append(f"  delete {step['chosen']}")
            else:
                lines.append(f"  stop: {step['stop_reason']}")
        lines.append(f"final model: {trace['final_model']}")
    test = report.get("test")
    if test:
        lines.append(f"G2 = {_f(test['g2'])}  X2 = {_f(test['pearson_x2'])}  df = {test['df']}  "
                     f"p(G2) = {_f(test['p_g2'])}  p(X2) = {_f(test['p_x2'])}")
    smp = report.get("sampling")
    if smp:
        lines.append(f"scheme: {smp['scheme']}  seed: {smp['seed']}  rng: {smp['rng']}  "
                     f"N = {smp['N']:g}")
        if smp.get("out"):
            lines.append(f"written to {smp['out']}")
    if report.get("table"):
        names = [f["name"] for f in inp["factors"]]
        rows = [names + ["count"]] + [c["labels"] + [f"{c['count']:g}"] for c in report["table"]]
        lines.extend(_align(rows))
    return "\n".join(lines) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- argparse

def _csv_list(text: str) -> list:
    return [p.strip() for p in text.split(",") if p.strip()]


def _levels(text: str) -> list:
    try:
        out = [int(p) for p in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError("levels must be comma-separated integers") from None
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("levels must be positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gllm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gllm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("fit", help="fit a model and test it against the saturated model")
    p.add_argument("--table", required=True, help="CSV path or bundled dataset name")
    p.add_argument("--model", required=True, help="generating class, e.g. '[12][13][23]'")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common(p)

    p = sub.add_parser("select", help="backward edge elimination over decomposable models")
    p.add_argument("--table", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tie-rule", choices=TIE_RULES, default="lexicographic")
    common(p)

    p = sub.add_parser("classify", help="classify a model and list its independences")
    p.add_argument("--model", required=True)
    p.add_argument("--factors", type=_csv_list, default=None,
                   help="comma-separated factor names (default: as they appear in the model)")
    p.add_argument("--table", default=None, help="take factor names from this table")
    common(p)

    p = sub.add_parser("simulate", help="draw a synthetic table")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--table", default=None, help="means / probabilities / expected counts")
    p.add_argument("--levels", type=_levels, default=None,
                   help="uniform table with these level counts, e.g. 2,2,2")
    p.add_argument("--n", type=int, default=None, help="multinomial total")
    p.add_argument("--mean", type=float, default=None, help="per-cell Poisson mean for --levels")
    p.add_argument("--fixed", type=_csv_list, default=[], help="fixed factors (product-multinomial)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the drawn table here as CSV")
    common(p)
    return parser


def run(argv) -> tuple:
    """Parse ``argv`` and execute; returns ``(exit_code, report_or_None, message)``."""
    return _execute(build_parser().parse_args(argv), argv)


def _execute(args, argv) -> tuple:
    command = ["gllm"] + list(argv)
    try:
        if args.command == "fit":
            report = cmd_fit(args.table, args.model, args.tol, args.max_iter, command)
        elif args.command == "select":
            report = cmd_select(args.table, args.alpha, args.tie_rule, command)
        elif args.command == "classify":
            factors = args.factors
            if factors is None and args.table:
                factors = list(load_table(args.table).names)
            report = cmd_classify(args.model, factors, command)
        else:
            report = cmd_simulate(args.scheme, args.table, args.levels, args.n, args.mean,
                                  args.fixed, args.seed, args.out, command)
    except NumericFailure as exc:
        return EXIT_NUMERIC, exc.report, str(exc)
    except FitError as exc:
        return EXIT_NUMERIC, None, str(exc)
    except (InputError, TableError, ModelError, ValueError, KeyError, OSError) as exc:
        return EXIT_INPUT, None, str(exc)
    return EXIT_OK, report, ""


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    code, report, message = _execute(args, argv)
    if report is not None:
        sys.stdout.write(render_json(report) if args.format == "json" else render_text(report))
    if message:
        print(f"gllm: error: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
