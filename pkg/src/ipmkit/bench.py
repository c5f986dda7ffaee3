"""Convergence-experiment harness.

Runs estimate-vs-sample-size or estimate-vs-dimension sweeps with
replications, attaches closed-form population values where an oracle
exists, and emits a deterministic CSV (one row per sweep value and
replication). Sampling follows the two-sample protocol m = n = N/2; odd
N is rejected. Replications may execute on a thread pool; per-trial
derived random streams and ordered row assembly keep the output
byte-identical regardless of scheduling.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import GroundMetric, Kernel, SampleLabel, pool
from .estimators import MetricName, dudley, mmd, tv_empirical, wasserstein
from .oracles import (
    DistKind,
    ProductDistribution,
    mmd_population,
    sample,
    wasserstein_population,
    dudley_population_discrete,
)

__all__ = [
    "SweepKind",
    "ExperimentSpec",
    "ExperimentResult",
    "run",
    "summarize",
    "write_csv",
]

CSV_HEADER = ["sweep_name", "sweep_value", "replication", "estimate", "population", "abs_error", "wall_ms"]

_LP_CAP = 2000  # pooled-size cap for the LP-backed metrics
_MMD_CAP = 20000


class SweepKind(enum.Enum):
    SAMPLE_SIZE = "sample_size"
    DIMENSION = "dimension"


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a distribution pair, a metric, a sweep, replications."""

    experiment_id: str
    dist_p: ProductDistribution
    dist_q: ProductDistribution
    metric: MetricName
    ground: Union[GroundMetric, Kernel]
    sweep: SweepKind
    sweep_values: tuple[int, ...]
    fixed_n: Optional[int] = None  # total N for dimension sweeps
    replications: int = 20
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.sweep_values:
            raise ValueError("sweep needs at least one value")
        cap = _MMD_CAP if self.metric is MetricName.MMD else _LP_CAP
        sizes = (
            self.sweep_values
            if self.sweep is SweepKind.SAMPLE_SIZE
            else (self.fixed_n,)
        )
        if self.sweep is SweepKind.DIMENSION and self.fixed_n is None:
            raise ValueError("dimension sweep requires a fixed sample size n")
        for n in sizes:
            if n % 2 != 0:
                raise ValueError(f"N={n} is odd; the protocol needs m = n = N/2")
            if n > cap:
                raise ValueError(f"N={n} exceeds the desk-scale cap {cap}")
        if self.metric is MetricName.MMD:
            if not isinstance(self.ground, Kernel):
                raise ValueError("MMD sweeps need a kernel")
        elif not isinstance(self.ground, GroundMetric):
            raise ValueError("LP metrics need a ground metric")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        try:
            metric = MetricName(obj["metric"])
            ground_obj = obj["ground"]
            if isinstance(ground_obj, str):
                ground: Union[GroundMetric, Kernel] = GroundMetric.from_name(ground_obj)
            else:
                ground = Kernel.from_name(
                    ground_obj["kernel"], float(ground_obj.get("param", 1.0))
                )
            sweep_obj = obj["sweep"]
            sweep = SweepKind(sweep_obj["kind"])
            return cls(
                experiment_id=obj["id"],
                dist_p=ProductDistribution.from_json(obj["p"]),
                dist_q=ProductDistribution.from_json(obj["q"]),
                metric=metric,
                ground=ground,
                sweep=sweep,
                sweep_values=tuple(int(v) for v in sweep_obj["values"]),
                fixed_n=int(sweep_obj["n"]) if "n" in sweep_obj else None,
                replications=int(obj.get("replications", 20)),
                seed=int(obj.get("seed", 0)),
                workers=int(obj.get("workers", 1)),
            )
        except KeyError as exc:
            raise ValueError(f"experiment spec missing field {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class ResultRow:
    sweep_name: str
    sweep_value: int
    replication: int
    estimate: float
    population: Optional[float]
    wall_ms: float

    @property
    def abs_error(self) -> Optional[float]:
        if self.population is None:
            return None
        return abs(self.estimate - self.population)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[ResultRow] = field(default_factory=list)


def _at_dimension(dist: ProductDistribution, d: int) -> ProductDistribution:
    """Rebuild a product distribution at dimension d from scalar parameters."""
    if dist.d == d:
        return dist
    params = {}
    for key, val in dist.params.items():
        arr = np.unique(np.asarray(val, dtype=float))
        if arr.size != 1:
            raise ValueError(
                "dimension sweep needs identical per-dimension parameters"
            )
        params[key] = float(arr[0])
    return ProductDistribution(dist.kind, d, params)


def _population(spec: ExperimentSpec, p, q) -> Optional[float]:
    try:
        if spec.metric is MetricName.WASSERSTEIN:
            return wasserstein_population(p, q)
        if spec.metric is MetricName.MMD:
            return mmd_population(p, q, spec.ground)
        if spec.metric is MetricName.DUDLEY and p.kind is DistKind.DISCRETE:
            return dudley_population_discrete(p, q, spec.ground)
    except ValueError:
        return None
    return None


def _estimate(spec: ExperimentSpec, ps) -> float:
    if spec.metric is MetricName.WASSERSTEIN:
        return wasserstein(ps, spec.ground).value
    if spec.metric is MetricName.DUDLEY:
        return dudley(ps, spec.ground).value
    if spec.metric is MetricName.MMD:
        return mmd(ps, spec.ground).value
    return tv_empirical(ps).value


def _one_trial(spec: ExperimentSpec, sweep_idx: int, rep: int) -> ResultRow:
    value = spec.sweep_values[sweep_idx]
    if spec.sweep is SweepKind.SAMPLE_SIZE:
        total_n, p, q = value, spec.dist_p, spec.dist_q
    else:
        total_n = spec.fixed_n
        p = _at_dimension(spec.dist_p, value)
        q = _at_dimension(spec.dist_q, value)
    half = total_n // 2
    trial = 2 * (sweep_idx * spec.replications + rep)
    sp = sample(p, half, spec.seed, trial=trial, label=SampleLabel.P)
    sq = sample(q, half, spec.seed, trial=trial + 1, label=SampleLabel.Q)
    ps = pool(sp, sq)
    t0 = time.perf_counter()
    est = _estimate(spec, ps)
    wall_ms = (time.perf_counter() - t0) * 1e3
    pop = _population(spec, p, q)
    return ResultRow(spec.sweep.value, value, rep, est, pop, wall_ms)


def run(spec: ExperimentSpec) -> ExperimentResult:
    """Execute every (sweep value, replication) pair; deterministic rows."""
    jobs = [
        (si, rep)
        for si in range(len(spec.sweep_values))
        for rep in range(spec.replications)
    ]
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool_:
            rows = list(pool_.map(lambda jr: _one_trial(spec, *jr), jobs))
    else:
        rows = [_one_trial(spec, si, rep) for si, rep in jobs]
    return ExperimentResult(spec, rows)


def summarize(result: ExperimentResult) -> list[dict]:
    """Per sweep value: mean, std over replications, mean absolute error."""
    if not result.rows:
        raise ValueError("empty result")
    out = []
    for value in result.spec.sweep_values:
        ests = np.array(
            [r.estimate for r in result.rows if r.sweep_value == value]
        )
        pops = [r.population for r in result.rows if r.sweep_value == value]
        pop = pops[0] if pops else None
        out.append(
            {
                "sweep_value": value,
                "mean": float(ests.mean()),
                "std": float(ests.std(ddof=0)),
                "population": pop,
                "mean_abs_error": None
                if pop is None
                else float(np.abs(ests - pop).mean()),
            }
        )
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(result: ExperimentResult) -> str:
    """Render result rows as CSV text (header plus one row per trial)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in result.rows:
        writer.writerow(
            [
                r.sweep_name,
                r.sweep_value,
                r.replication,
                _fmt(r.estimate),
                _fmt(r.population),
                _fmt(r.abs_error),
                _fmt(round(r.wall_ms, 3)),
            ]
        )
    return buf.getvalue()


def write_csv(result: ExperimentResult, out_dir, deterministic: bool = True) -> Path:
    """Write {experiment-id}.csv under out_dir and return the path.

    With deterministic=True (default) the wall_ms column is zeroed so that
    identical specs produce byte-identical files; pass False to keep the
    measured timings.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{result.spec.experiment_id}.csv"
    rows = result.rows
    if deterministic:
        rows = [
            ResultRow(r.sweep_name, r.sweep_value, r.replication, r.estimate, r.population, 0.0)
            for r in rows
        ]
    text = csv_text(ExperimentResult(result.spec, rows))
    path.write_text(text)
    return path
