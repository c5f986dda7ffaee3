"""Figure rendering for benchmark results.

Produces one PNG per experiment next to its CSV: mean estimate with
one-standard-deviation error bars against the sweep variable, plus the
population value as a horizontal reference line when an oracle exists.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .bench import ExperimentResult, SweepKind, summarize

__all__ = ["render_figure"]


def render_figure(result: ExperimentResult, out_dir) -> Path:
    """Write {experiment-id}.png under out_dir and return the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{result.spec.experiment_id}.png"
    rows = summarize(result)
    xs = [r["sweep_value"] for r in rows]
    means = [r["mean"] for r in rows]
    stds = [r["std"] for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3, label="estimate")
    pops = [r["population"] for r in rows if r["population"] is not None]
    if pops:
        if len(set(pops)) == 1:
            ax.axhline(pops[0], linestyle="--", color="gray", label="population")
        else:
            xs_p = [r["sweep_value"] for r in rows if r["population"] is not None]
            ax.plot(xs_p, pops, linestyle="--", color="gray", label="population")
    xlabel = (
        "sample size N"
        if result.spec.sweep is SweepKind.SAMPLE_SIZE
        else "dimension d"
    )
    ax.set_xlabel(xlabel)
    ax.set_ylabel(f"{result.spec.metric.value} estimate")
    ax.set_title(result.spec.experiment_id)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
