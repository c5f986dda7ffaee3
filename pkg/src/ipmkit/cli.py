"""Command-line front end.

Subcommands: estimate, witness-eval, classify, bench, oracle. Structured
output is JSON; tabular/sample data is CSV. Exit codes: 0 success,
1 usage error, 2 data error, 3 solver failure, 4 infeasible training set.
Verbosity on stderr is controlled by IPMKIT_LOG={error|info|debug}.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import bench as bench_mod
from .classify import LabeledSample, lipschitz_margin_train, margin_bound_check, parzen_train
from .core import GroundMetric, Kernel, SampleLabel, load_sample_csv, pool
from .estimators import dudley, mmd, tv_empirical, wasserstein
from .lp import IterationLimitError
from .oracles import (
    DistKind,
    ProductDistribution,
    dudley_population_discrete,
    mmd_population,
    wasserstein_population,
)
from .witness import Witness, evaluate

logger = logging.getLogger("ipmkit")


class DataError(Exception):
    """Unreadable or inconsistent input data (exit code 2)."""


class InfeasibleError(Exception):
    """Inseparable training data (exit code 4)."""


def _setup_logging() -> None:
    level_name = os.environ.get("IPMKIT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level_name not in levels:
        level_name = "error"
    logging.basicConfig(stream=sys.stderr, level=levels[level_name])


def _load_samples(p_path, q_path):
    try:
        sp = load_sample_csv(p_path, SampleLabel.P)
        sq = load_sample_csv(q_path, SampleLabel.Q)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    if sp.dim != sq.dim:
        raise DataError(
            f"dimension mismatch: P has d={sp.dim}, Q has d={sq.dim}"
        )
    return sp, sq


def _write_json(obj, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
def cli():
    """Estimate distances between two samples and inspect their witnesses."""
    _setup_logging()


@cli.command("estimate")
@click.option("--p", "p_path", required=True, type=click.Path(), help="CSV sample from P")
@click.option("--q", "q_path", required=True, type=click.Path(), help="CSV sample from Q")
@click.option("--metric", required=True, type=click.Choice(["wasserstein", "dudley", "mmd", "tv"]))
@click.option("--ground", default="l2", type=click.Choice(["l1", "l2", "linf"]))
@click.option("--kernel", default="gaussian", type=click.Choice(["gaussian", "laplacian"]))
@click.option("--kernel-param", default=1.0, type=float)
@click.option("--out", default=None, type=click.Path(), help="write report JSON here instead of stdout")
@click.option("--witness-out", default=None, type=click.Path(), help="also dump the witness as JSON")
def cmd_estimate(p_path, q_path, metric, ground, kernel, kernel_param, out, witness_out):
    """Estimate one metric between two CSV samples; prints a JSON report."""
    sp, sq = _load_samples(p_path, q_path)
    ps = pool(sp, sq)
    logger.info("pooled %d points (m=%d, n=%d)", ps.size, ps.m, ps.n)
    g = GroundMetric.from_name(ground)
    if metric == "wasserstein":
        report = wasserstein(ps, g)
    elif metric == "dudley":
        report = dudley(ps, g)
    elif metric == "mmd":
        report = mmd(ps, Kernel.from_name(kernel, kernel_param))
    else:
        report = tv_empirical(ps, g=g)
    _write_json(report.to_json(), out)
    if witness_out:
        if report.witness is None:
            raise DataError("zero estimate: no witness to write")
        Path(witness_out).write_text(json.dumps(report.witness.to_json()) + "\n")


@cli.command("witness-eval")
@click.option("--witness", "witness_path", required=True, type=click.Path())
@click.option("--points", "points_path", required=True, type=click.Path(), help="CSV of evaluation points")
@click.option("--ground", default="l2", type=click.Choice(["l1", "l2", "linf"]))
@click.option("--out", default=None, type=click.Path())
def cmd_witness_eval(witness_path, points_path, ground, out):
    """Evaluate a saved witness at points; one value per line."""
    try:
        wit = Witness.from_json(
            json.loads(Path(witness_path).read_text()),
            ground=GroundMetric.from_name(ground),
        )
        pts = load_sample_csv(points_path, SampleLabel.P).points
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(str(exc)) from exc
    if pts.shape[1] != wit.dim:
        raise DataError(f"points have d={pts.shape[1]}, witness expects d={wit.dim}")
    vals = np.atleast_1d(evaluate(wit, pts))
    text = "\n".join(repr(float(v)) for v in vals) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _load_labeled(path) -> LabeledSample:
    try:
        raw = load_sample_csv(path, SampleLabel.P).points
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    if raw.shape[1] < 2:
        raise DataError("training CSV needs coordinates plus a trailing +/-1 label")
    try:
        return LabeledSample(raw[:, :-1], raw[:, -1])
    except ValueError as exc:
        raise DataError(str(exc)) from exc


@cli.command("classify")
@click.option("--train", "train_path", required=True, type=click.Path(), help="CSV with trailing +/-1 label column")
@click.option("--test", "test_path", required=True, type=click.Path(), help="CSV of unlabeled test points")
@click.option("--rule", required=True, type=click.Choice(["parzen", "lipschitz", "bounded-lipschitz"]))
@click.option("--ground", default="l2", type=click.Choice(["l1", "l2", "linf"]))
@click.option("--kernel", default="gaussian", type=click.Choice(["gaussian", "laplacian"]))
@click.option("--kernel-param", default=1.0, type=float)
@click.option("--out", default=None, type=click.Path(), help="predictions CSV (default stdout)")
def cmd_classify(train_path, test_path, rule, ground, kernel, kernel_param, out):
    """Train a rule and predict labels; margin rules also report their bound."""
    ls = _load_labeled(train_path)
    try:
        test = load_sample_csv(test_path, SampleLabel.P).points
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    if test.shape[1] != ls.points.shape[1]:
        raise DataError("test dimension does not match training coordinates")
    g = GroundMetric.from_name(ground)
    report = {}
    if rule == "parzen":
        clf = parzen_train(ls, Kernel.from_name(kernel, kernel_param))
    else:
        bounded = rule == "bounded-lipschitz"
        try:
            clf = lipschitz_margin_train(ls, g, bounded=bounded)
        except ValueError as exc:
            raise InfeasibleError(str(exc)) from exc
        margin, bound, holds = margin_bound_check(ls, g, bounded=bounded)
        train_acc = float(
            (clf.predict(ls.points) == ls.labels).mean()
        )
        report = {
            "margin": margin,
            "bound": bound,
            "bound_holds": holds,
            "train_accuracy": train_acc,
        }
    preds = clf.predict(test)
    text = "\n".join(f"{int(v):+d}" for v in preds) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    if report:
        click.echo(json.dumps(report, sort_keys=True), err=True)


@cli.command("bench")
@click.option("--spec", "spec_path", required=True, type=click.Path())
@click.option("--out-dir", default=".", type=click.Path())
@click.option("--keep-timings", is_flag=True, help="write measured wall_ms instead of zeros (breaks byte-identity)")
@click.option("--no-figure", is_flag=True, help="skip the PNG figure")
def cmd_bench(spec_path, out_dir, keep_timings, no_figure):
    """Run an experiment spec; writes {id}.csv (+ {id}.png) under --out-dir."""
    try:
        spec = bench_mod.ExperimentSpec.from_file(spec_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read spec: {exc}") from exc
    except ValueError as exc:
        raise click.UsageError(f"invalid spec {spec_path}: {exc}")
    logger.info("running %s: %d sweep values x %d replications",
                spec.experiment_id, len(spec.sweep_values), spec.replications)
    result = bench_mod.run(spec)
    path = bench_mod.write_csv(result, out_dir, deterministic=not keep_timings)
    if not no_figure:
        from .plots import render_figure

        fig_path = render_figure(result, out_dir)
        logger.info("figure written to %s", fig_path)
    click.echo(f"wrote {path}")
    header = f"{'sweep':>8} {'mean':>12} {'std':>12} {'population':>12} {'mean_abs_err':>12}"
    click.echo(header)
    for row in bench_mod.summarize(result):
        pop = "-" if row["population"] is None else f"{row['population']:.4f}"
        err = "-" if row["mean_abs_error"] is None else f"{row['mean_abs_error']:.4f}"
        click.echo(
            f"{row['sweep_value']:>8} {row['mean']:>12.4f} {row['std']:>12.4f} "
            f"{pop:>12} {err:>12}"
        )


def _load_dist(text_or_path) -> ProductDistribution:
    try:
        if Path(text_or_path).exists():
            obj = json.loads(Path(text_or_path).read_text())
        else:
            obj = json.loads(text_or_path)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot parse distribution {text_or_path!r}: {exc}") from exc
    try:
        return ProductDistribution.from_json(obj)
    except (KeyError, ValueError) as exc:
        raise DataError(str(exc)) from exc


@cli.command("oracle")
@click.option("--p", "p_spec", required=True, help="distribution JSON (inline or a file path)")
@click.option("--q", "q_spec", required=True)
@click.option("--metric", required=True, type=click.Choice(["wasserstein", "dudley", "mmd"]))
@click.option("--ground", default="l1", type=click.Choice(["l1", "l2", "linf"]))
@click.option("--kernel", default="gaussian", type=click.Choice(["gaussian", "laplacian"]))
@click.option("--kernel-param", default=1.0, type=float)
def cmd_oracle(p_spec, q_spec, metric, ground, kernel, kernel_param):
    """Print the closed-form population value for a supported pairing."""
    p = _load_dist(p_spec)
    q = _load_dist(q_spec)
    try:
        if metric == "wasserstein":
            value = wasserstein_population(p, q)
        elif metric == "mmd":
            value = mmd_population(p, q, Kernel.from_name(kernel, kernel_param))
        else:
            if p.kind is not DistKind.DISCRETE:
                raise ValueError("dudley oracle supports discrete pairs only")
            value = dudley_population_discrete(p, q, GroundMetric.from_name(ground))
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    click.echo(json.dumps({"metric": metric, "population": value}))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return int(exc.exit_code)
    except (click.UsageError, click.BadParameter) as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return 1
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except IterationLimitError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        return 3
    except InfeasibleError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        return 4


if __name__ == "__main__":
    sys.exit(main())
