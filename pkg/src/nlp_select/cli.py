"""Command-line pipeline: simulate | fit | evaluate | benchmark.

Exit codes: 0 success, 2 invalid input, 3 mode optimization did not converge
at the reported model, 4 internal numerical failure. Config precedence is
command-line flags over --config file values over built-in defaults; every
subcommand is deterministic given --seed, including under --threads.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .data import apply_standardization, model_index, standardize
from .errors import InvalidInputError, NumericalFailure
from .fileio import (
    read_coefficients,
    read_dataset,
    read_json,
    write_json,
    write_table,
)
from .laplace import log_unnormalized_posterior
from .metrics import (
    RATIO_FIELDS,
    aggregate_reports,
    mspe,
    selection_report,
    support_from_coefficients,
)
from .prior import HyperPmomConfig, default_lambda2, default_model_cap
from .search import SearchConfig, run_search
from .simulate import MODERATE, WEAK, SimDesign, generate
from .study import benchmark_run

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_NUMERICAL = 4

_SIGNALS = {"weak": WEAK, "moderate": MODERATE}


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_config(ctx: click.Context, config_path) -> dict:
    """Apply config-file values for every option the user did not set on the
    command line, then return the fully resolved parameter mapping."""
    params = dict(ctx.params)
    params.pop("config", None)
    params.pop("print_config", None)
    if config_path:
        file_vals = read_json(Path(config_path))
        unknown = set(file_vals) - set(params)
        if unknown:
            raise InvalidInputError(
                f"unknown config keys {sorted(unknown)}; valid: {sorted(params)}"
            )
        for key, val in file_vals.items():
            src = ctx.get_parameter_source(key)
            if src is not None and src.name == "DEFAULT":
                params[key] = val
    return params


def _maybe_print_config(params: dict, subcommand: str, print_config: bool):
    if print_config:
        import json

        payload = {"subcommand": subcommand, **{k: params[k] for k in sorted(params)}}
        click.echo(json.dumps(_plain(payload), indent=2, sort_keys=True))


def _plain(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


@click.group()
@click.version_option(version=__version__, prog_name="nlp-select")
def main():
    """Bayesian variable selection for sparse logistic regression under a
    hierarchical nonlocal prior."""


# --------------------------------------------------------------------------
# simulate


@main.command()
@click.option("--n", default=100, show_default=True, help="Training rows.")
@click.option("--p", default=100, show_default=True, help="Covariates.")
@click.option("--n-test", default=50, show_default=True, help="Held-out rows.")
@click.option(
    "--signal",
    default="moderate",
    show_default=True,
    help="'weak' (1.0), 'moderate' (2.0), or a positive number.",
)
@click.option(
    "--covariance",
    type=click.Choice(["isotropic", "ar1"]),
    default="isotropic",
    show_default=True,
)
@click.option("--replicates", default=1, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(), help="Output directory.")
@click.option("--config", type=click.Path(exists=False), default=None)
@click.option("--print-config", is_flag=True)
@click.pass_context
def simulate(ctx, **_kw):
    """Write seeded replicate datasets: train.csv, test.csv, truth.json."""
    try:
        params = _resolve_config(ctx, ctx.params.get("config"))
        _maybe_print_config(params, "simulate", ctx.params["print_config"])
        signal = params["signal"]
        if isinstance(signal, str):
            signal = _SIGNALS.get(signal.lower())
            if signal is None:
                try:
                    signal = float(params["signal"])
                except ValueError:
                    raise InvalidInputError(
                        f"--signal must be 'weak', 'moderate' or a number, "
                        f"got {params['signal']!r}"
                    ) from None
        out = Path(params["out"])
        for i in range(int(params["replicates"])):
            design = SimDesign(
                n=int(params["n"]),
                p=int(params["p"]),
                n_test=int(params["n_test"]),
                signal=float(signal),
                covariance=params["covariance"],
                seed=int(params["seed"]) + i,
            )
            train, test, (supp, beta0) = generate(design)
            rep_dir = out / f"rep_{i:03d}"
            try:
                rep_dir.mkdir(parents=True, exist_ok=True)
                write_table(rep_dir / "train.csv", X=train.X, y=train.y)
                write_table(rep_dir / "test.csv", X=test.X, y=test.y)
            except OSError as exc:
                _fail(EXIT_INVALID_INPUT, f"cannot write under {rep_dir}: {exc}")
            write_json(
                rep_dir / "truth.json",
                {
                    "n": design.n,
                    "p": design.p,
                    "n_test": design.n_test,
                    "signal": design.signal,
                    "covariance": design.covariance,
                    "seed": design.seed,
                    "true_indices": [j + 1 for j in supp],
                    "beta": list(beta0),
                },
            )
        click.echo(f"wrote {params['replicates']} replicate(s) under {out}")
    except InvalidInputError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))


# --------------------------------------------------------------------------
# fit


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path())
@click.option("--out", required=True, type=click.Path())
@click.option(
    "--algorithm",
    type=click.Choice(["sss", "rsss"]),
    default="rsss",
    show_default=True,
)
@click.option("--iterations", default=50, show_default=True, help="Search steps N.")
@click.option("--k1", default=10, show_default=True)
@click.option("--k2", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--r", "r_order", default=1, show_default=True)
@click.option("--lambda1", default=1.0, show_default=True)
@click.option(
    "--lambda2",
    default=None,
    type=float,
    help="Defaults to the scale schedule computed from the loaded (n, p).",
)
@click.option(
    "--m-n",
    "m_n",
    default=None,
    type=int,
    help="Model-size cap; defaults to the configured cap for (n, p).",
)
@click.option("--max-iterations", default=500, show_default=True, help="BFGS cap.")
@click.option(
    "--initial-model",
    default="random-3",
    show_default=True,
    help="'random-3' or comma-separated 1-based indices.",
)
@click.option("--config", type=click.Path(exists=False), default=None)
@click.option("--print-config", is_flag=True)
@click.pass_context
def fit(ctx, **_kw):
    """Run the model search on a train CSV and write the selection JSON."""
    try:
        params = _resolve_config(ctx, ctx.params.get("config"))
        X_raw, y = read_dataset(params["data_path"])
        data = standardize(X_raw, y)
        lam2 = params["lambda2"]
        lam2 = default_lambda2(data.n, data.p) if lam2 is None else float(lam2)
        cap = params["m_n"]
        cap = default_model_cap(data.n, data.p) if cap is None else int(cap)
        prior_cfg = HyperPmomConfig(
            r=int(params["r_order"]),
            lambda1=float(params["lambda1"]),
            lambda2=lam2,
            m_n=cap,
        )
        init = params["initial_model"]
        if init != "random-3":
            init = model_index(
                [int(tok) - 1 for tok in str(init).split(",") if tok.strip()], data.p
            )
        search_cfg = SearchConfig(
            n_iterations=int(params["iterations"]),
            seed=int(params["seed"]),
            algorithm=params["algorithm"],
            k1=int(params["k1"]),
            k2=int(params["k2"]),
            initial_model=init,
        )
        params["lambda2"], params["m_n"] = lam2, cap
        _maybe_print_config(params, "fit", ctx.params["print_config"])

        trace = run_search(
            data,
            prior_cfg,
            search_cfg,
            optimizer_max_iterations=int(params["max_iterations"]),
        )
        best = trace.best
        payload = {
            "n": data.n,
            "p": data.p,
            "algorithm": search_cfg.algorithm,
            "seed": search_cfg.seed,
            "selected_indices": [j + 1 for j in best.k],
            "beta_hat": list(best.beta_hat),
            "log_marginal": best.log_laplace_marginal,
            "log_posterior": log_unnormalized_posterior(best, prior_cfg),
            "converged": best.converged,
            "optimizer_iterations": best.iterations,
            "prior": {
                "r": prior_cfg.r,
                "lambda1": prior_cfg.lambda1,
                "lambda2": prior_cfg.lambda2,
                "m_n": prior_cfg.m_n,
            },
            "search": {
                "n_iterations": search_cfg.n_iterations,
                "k1": search_cfg.k1,
                "k2": search_cfg.k2,
                "models_scored": trace.cache_misses,
                "cache_hits": trace.cache_hits,
                "models_scored_before_best": trace.models_scored_before_best,
                "n_visited": len(trace.visited),
            },
            "standardization": {
                "means": list(data.column_means),
                "sds": list(data.column_sds),
            },
        }
        write_json(params["out"], payload)
        if not best.converged:
            click.echo("mode optimization did not converge; see diagnostics", err=True)
            sys.exit(EXIT_NOT_CONVERGED)
    except InvalidInputError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    except NumericalFailure as exc:
        _fail(EXIT_NUMERICAL, str(exc))


# --------------------------------------------------------------------------
# evaluate


def _evaluate_one(selection: dict | None, truth: dict, test_path, coef=None, threshold=0.0):
    X_test_raw, y_test = read_dataset(test_path)
    p = int(truth["p"])
    if X_test_raw.shape[1] != p:
        raise InvalidInputError(
            f"{test_path}: has p={X_test_raw.shape[1]} columns but truth says p={p}"
        )
    true_support = tuple(int(j) - 1 for j in truth["true_indices"])
    if coef is not None:
        if coef.shape != (p,):
            raise InvalidInputError(
                f"coefficient vector has length {coef.size}, expected p={p}"
            )
        selected = support_from_coefficients(coef, threshold)
        y_hat = 1.0 / (1.0 + np.exp(-(X_test_raw @ coef)))
    else:
        if int(selection["p"]) != p:
            raise InvalidInputError(
                f"selection has p={selection['p']} but truth says p={p}"
            )
        selected = tuple(int(j) - 1 for j in selection["selected_indices"])
        std = selection["standardization"]
        X_test = apply_standardization(X_test_raw, std["means"], std["sds"])
        beta = np.zeros(p)
        for j, b in zip(selected, selection["beta_hat"]):
            beta[j] = b
        y_hat = 1.0 / (1.0 + np.exp(-(X_test @ beta)))
    return selection_report(selected, true_support, p, mspe=mspe(y_test, y_hat)), selected


def _metrics_csv_lines(rows: list[dict], agg: dict) -> list[str]:
    header = "replicate,precision,sensitivity,specificity,mcc,mspe"
    fmt = lambda v: "" if v is None else repr(float(v))
    lines = [header]
    for row in rows:
        lines.append(
            ",".join(
                [str(row["replicate"])] + [fmt(row[m]) for m in RATIO_FIELDS]
            )
        )
    lines.append(",".join(["mean"] + [fmt(agg["mean"][m]) for m in RATIO_FIELDS]))
    lines.append(
        ",".join(["n_defined"] + [str(agg["n_defined"][m]) for m in RATIO_FIELDS])
    )
    return lines


@main.command()
@click.option("--run-dir", type=click.Path(), default=None, help="Directory of rep_*/ subdirs.")
@click.option("--selection", "selection_path", type=click.Path(), default=None)
@click.option("--truth", "truth_path", type=click.Path(), default=None)
@click.option("--test", "test_path", type=click.Path(), default=None)
@click.option("--coefficients", type=click.Path(), default=None, help="Competitor coefficient CSV (x1..xp, one row).")
@click.option("--threshold", default=0.0, show_default=True, help="Nonzero threshold for --coefficients.")
@click.option("--out", required=True, type=click.Path(), help="Metrics JSON path.")
@click.option("--csv", "csv_path", type=click.Path(), default=None, help="Optional metrics CSV path.")
@click.option("--config", type=click.Path(exists=False), default=None)
@click.option("--print-config", is_flag=True)
@click.pass_context
def evaluate(ctx, **_kw):
    """Score selections against the simulation truth; emit metric tables."""
    try:
        params = _resolve_config(ctx, ctx.params.get("config"))
        _maybe_print_config(params, "evaluate", ctx.params["print_config"])
        jobs = []
        if params["run_dir"]:
            base = Path(params["run_dir"])
            rep_dirs = sorted(d for d in base.glob("rep_*") if d.is_dir())
            if not rep_dirs:
                raise InvalidInputError(f"no rep_*/ directories under {base}")
            for d in rep_dirs:
                jobs.append((d.name, d / "selection.json", d / "truth.json", d / "test.csv"))
        else:
            if not (params["truth_path"] and params["test_path"]):
                raise InvalidInputError(
                    "need --run-dir, or --truth and --test (with --selection "
                    "or --coefficients)"
                )
            jobs.append((0, params["selection_path"], params["truth_path"], params["test_path"]))

        coef = None
        if params["coefficients"]:
            coef = read_coefficients(params["coefficients"])

        # parse everything before computing anything
        parsed = []
        for name, sel_path, truth_path, test_path in jobs:
            truth = read_json(truth_path)
            selection = None
            if coef is None:
                if sel_path is None:
                    raise InvalidInputError("need --selection or --coefficients")
                selection = read_json(sel_path)
            parsed.append((name, selection, truth, test_path))

        rows, reports = [], []
        for name, selection, truth, test_path in parsed:
            report, selected = _evaluate_one(
                selection, truth, test_path, coef=coef, threshold=params["threshold"]
            )
            reports.append(report)
            rows.append(
                {
                    "replicate": name,
                    "selected_indices": [j + 1 for j in selected],
                    "tp": report.tp,
                    "tn": report.tn,
                    "fp": report.fp,
                    "fn": report.fn,
                    "precision": report.precision,
                    "sensitivity": report.sensitivity,
                    "specificity": report.specificity,
                    "mcc": report.mcc,
                    "mspe": report.mspe,
                }
            )
        agg = aggregate_reports(reports)
        write_json(params["out"], {"replicates": rows, "aggregate": agg})
        if params["csv_path"]:
            Path(params["csv_path"]).write_text(
                "\n".join(_metrics_csv_lines(rows, agg)) + "\n", encoding="utf-8"
            )
    except InvalidInputError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    except NumericalFailure as exc:
        _fail(EXIT_NUMERICAL, str(exc))


# --------------------------------------------------------------------------
# benchmark


@main.command()
@click.option("--p-grid", default="100,300,500", show_default=True)
@click.option("--n", default=100, show_default=True)
@click.option("--replicates", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--iterations", default=20, show_default=True)
@click.option("--signal", default=1.0, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option(
    "--threads",
    default=1,
    show_default=True,
    envvar="NLP_SELECT_THREADS",
    help="Parallel replicate workers (env fallback NLP_SELECT_THREADS).",
)
@click.option("--config", type=click.Path(exists=False), default=None)
@click.option("--print-config", is_flag=True)
@click.pass_context
def benchmark(ctx, **_kw):
    """Compare SSS vs RSSS search effort over a grid of dimensions."""
    try:
        params = _resolve_config(ctx, ctx.params.get("config"))
        _maybe_print_config(params, "benchmark", ctx.params["print_config"])
        try:
            p_grid = tuple(int(tok) for tok in str(params["p_grid"]).split(",") if tok.strip())
        except ValueError:
            raise InvalidInputError(f"cannot parse --p-grid {params['p_grid']!r}") from None
        if not p_grid:
            raise InvalidInputError("empty --p-grid")
        rows = benchmark_run(
            p_grid,
            n=int(params["n"]),
            replicates=int(params["replicates"]),
            base_seed=int(params["seed"]),
            signal=float(params["signal"]),
            n_iterations=int(params["iterations"]),
            threads=int(params["threads"]),
        )
        lines = ["p,algorithm,mean_models_scored_before_best,replicates,best_agreement"]
        for row in rows:
            lines.append(
                f"{row['p']},{row['algorithm']},"
                f"{row['mean_models_scored_before_best']!r},"
                f"{row['replicates']},{row['best_agreement']}"
            )
        Path(params["out"]).write_text("\n".join(lines) + "\n", encoding="utf-8")
        click.echo(f"wrote {params['out']}")
    except InvalidInputError as exc:
        _fail(EXIT_INVALID_INPUT, str(exc))
    except NumericalFailure as exc:
        _fail(EXIT_NUMERICAL, str(exc))


if __name__ == "__main__":
    main()
