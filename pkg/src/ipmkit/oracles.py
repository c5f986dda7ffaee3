"""Seeded samplers and closed-form population distances.

Product distributions over R^d with independent coordinates, plus the
closed-form population values the benchmark harness converges to:

* Wasserstein (L1 ground metric) for uniform/uniform and truncated-
  exponential pairs, summed over dimensions.
* MMD for Gaussian distributions under the Gaussian kernel and for
  exponential distributions under the Laplacian kernel (product formulas).
* Dudley metric for a pair of finite discrete distributions, via the
  pooled linear program over the union of supports.
* The exact L1 area between two 1-D empirical CDFs — the independent
  oracle for the Wasserstein LP on the line.

Sampling uses the counter-based Philox generator with a per-(seed, trial,
dimension) spawned stream, so trials can run concurrently and still
produce bit-identical output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    CostMatrix,
    CostSource,
    GroundMetric,
    Kernel,
    KernelKind,
    PooledSample,
    SampleLabel,
    SampleSet,
)
from .lp import solve_metric_lp

__all__ = [
    "DistKind",
    "ProductDistribution",
    "sample",
    "wasserstein_population",
    "wasserstein_1d_cdf",
    "mmd_population",
    "dudley_population_discrete",
]


class DistKind(enum.Enum):
    UNIFORM = "uniform"
    TRUNC_EXP = "truncexp"
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"
    DISCRETE = "discrete"


def _per_dim(values, d: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 1:
        arr = np.full(d, arr[0])
    if arr.size != d:
        raise ValueError(f"{name} must have 1 or d={d} entries")
    return arr


@dataclass(frozen=True)
class ProductDistribution:
    """A product measure on R^d with independent coordinates.

    Parameter names by kind:
      uniform:     low, high (per-dim endpoints, high > low)
      truncexp:    rate, trunc (density ~ rate*exp(-rate*x) on [0, trunc])
      gaussian:    mean, std
      exponential: rate
      discrete:    support (1-D atoms), probs (d must be 1)
    """

    kind: DistKind
    d: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        p = dict(self.params)
        k = self.kind
        if k is DistKind.UNIFORM:
            lo = _per_dim(p["low"], self.d, "low")
            hi = _per_dim(p["high"], self.d, "high")
            if not np.all(hi > lo):
                raise ValueError("uniform needs high > low per dimension")
            p = {"low": lo, "high": hi}
        elif k is DistKind.TRUNC_EXP:
            rate = _per_dim(p["rate"], self.d, "rate")
            trunc = _per_dim(p["trunc"], self.d, "trunc")
            if not (np.all(rate > 0) and np.all(trunc > 0)):
                raise ValueError("truncexp needs rate > 0 and trunc > 0")
            p = {"rate": rate, "trunc": trunc}
        elif k is DistKind.GAUSSIAN:
            mean = _per_dim(p.get("mean", 0.0), self.d, "mean")
            std = _per_dim(p.get("std", 1.0), self.d, "std")
            if not np.all(std > 0):
                raise ValueError("gaussian needs std > 0")
            p = {"mean": mean, "std": std}
        elif k is DistKind.EXPONENTIAL:
            rate = _per_dim(p["rate"], self.d, "rate")
            if not np.all(rate > 0):
                raise ValueError("exponential needs rate > 0")
            p = {"rate": rate}
        elif k is DistKind.DISCRETE:
            if self.d != 1:
                raise ValueError("discrete kind is one-dimensional")
            support = np.atleast_1d(np.asarray(p["support"], dtype=float))
            probs = np.atleast_1d(np.asarray(p["probs"], dtype=float))
            if support.size != probs.size or support.size == 0:
                raise ValueError("support and probs must have equal nonzero length")
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ValueError("probs must be >= 0 and sum to 1 within 1e-12")
            p = {"support": support, "probs": probs}
        else:  # pragma: no cover
            raise ValueError(f"unknown kind {k}")
        object.__setattr__(self, "params", p)

    @classmethod
    def from_json(cls, obj: dict) -> "ProductDistribution":
        obj = dict(obj)
        kind = DistKind(obj.pop("kind"))
        d = int(obj.pop("d"))
        return cls(kind=kind, d=d, params=obj)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "d": self.d}
        for key, val in self.params.items():
            out[key] = np.asarray(val).tolist()
        return out


def _stream(seed: int, trial: int, dim: int) -> np.random.Generator:
    ss = np.random.SeedSequence((int(seed), int(trial), int(dim)))
    return np.random.Generator(np.random.Philox(ss))


def _uniform01(seed: int, trial: int, dim: int, n: int) -> np.ndarray:
    return _stream(seed, trial, dim).random(n)


def sample(
    dist: ProductDistribution,
    n: int,
    seed: int,
    trial: int = 0,
    label: SampleLabel = SampleLabel.P,
) -> SampleSet:
    """Draw n i.i.d. points; bit-identical given (dist, n, seed, trial).

    Each dimension consumes its own derived stream; Q draws should pass a
    distinct trial index (or label-offset) so the two samples are independent.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    d = dist.d
    cols = np.empty((n, d))
    p = dist.params
    for j in range(d):
        if dist.kind is DistKind.GAUSSIAN:
            # Box-Muller on the counter stream: exact and branch-free
            u = _uniform01(seed, trial, j, 2 * n)
            u1 = np.clip(u[:n], 1e-300, 1.0)
            u2 = u[n:]
            z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
            cols[:, j] = p["mean"][j] + p["std"][j] * z
            continue
        u = _uniform01(seed, trial, j, n)
        if dist.kind is DistKind.UNIFORM:
            lo, hi = p["low"][j], p["high"][j]
            cols[:, j] = lo + (hi - lo) * u
        elif dist.kind is DistKind.TRUNC_EXP:
            lam, c = p["rate"][j], p["trunc"][j]
            cols[:, j] = -np.log1p(-u * (1.0 - math.exp(-lam * c))) / lam
        elif dist.kind is DistKind.EXPONENTIAL:
            lam = p["rate"][j]
            cols[:, j] = -np.log1p(-np.clip(u, 0.0, 1.0 - 1e-16)) / lam
        elif dist.kind is DistKind.DISCRETE:
            edges = np.cumsum(p["probs"])
            idx = np.searchsorted(edges, u, side="right")
            idx = np.minimum(idx, p["support"].size - 1)
            cols[:, j] = p["support"][idx]
    return SampleSet(cols, label)


# ---------------------------------------------------------------------------
# population values
# ---------------------------------------------------------------------------


def wasserstein_population(p: ProductDistribution, q: ProductDistribution) -> float:
    """Closed-form Wasserstein distance (L1 ground metric, product measures).

    The distance of a product pair is the sum of the per-dimension 1-D
    distances. Supported pairings: uniform/uniform (with interleaved
    endpoints low_p <= low_q <= high_p <= high_q per dimension) and
    truncated-exponential pairs.
    """
    if p.d != q.d:
        raise ValueError("dimension mismatch")
    total = 0.0
    if p.kind is DistKind.UNIFORM and q.kind is DistKind.UNIFORM:
        for j in range(p.d):
            a, b = p.params["low"][j], p.params["high"][j]
            r, s = q.params["low"][j], q.params["high"][j]
            if not (a <= r <= b <= s):
                raise ValueError(
                    "uniform formula needs interleaved supports low_p <= low_q "
                    "<= high_p <= high_q"
                )
            total += (s + r - a - b) / 2.0
        return total
    if p.kind is DistKind.TRUNC_EXP and q.kind is DistKind.TRUNC_EXP:
        for j in range(p.d):
            lam, c = p.params["rate"][j], p.params["trunc"][j]
            mu, c2 = q.params["rate"][j], q.params["trunc"][j]
            if c != c2:
                raise ValueError("truncation points must match per dimension")
            el, em = math.exp(-lam * c), math.exp(-mu * c)
            total += abs(
                1.0 / lam - 1.0 / mu - c * (el - em) / ((1.0 - el) * (1.0 - em))
            )
        return total
    raise ValueError(f"no closed form for pair ({p.kind.value}, {q.kind.value})")


def wasserstein_1d_cdf(s1: SampleSet, s2: SampleSet) -> float:
    """Exact L1 area between two 1-D empirical step CDFs (sorted merge)."""
    if s1.dim != 1 or s2.dim != 1:
        raise ValueError("CDF-area oracle is one-dimensional")
    x = np.sort(s1.points[:, 0])
    y = np.sort(s2.points[:, 0])
    grid = np.sort(np.concatenate([x, y]))
    if grid.size < 2:
        return 0.0
    fx = np.searchsorted(x, grid[:-1], side="right") / x.size
    fy = np.searchsorted(y, grid[:-1], side="right") / y.size
    return float(np.sum(np.abs(fx - fy) * np.diff(grid)))


def mmd_population(p: ProductDistribution, q: ProductDistribution, k: Kernel) -> float:
    """Closed-form MMD for supported (distribution pair, kernel) families.

    Gaussian measures with the Gaussian kernel: each of the three terms of
    gamma^2 = E k(X,X') + E k(Y,Y') - 2 E k(X,Y) factorizes over dimensions
    into Gaussian convolution integrals. Exponential measures with the
    Laplacian kernel factorize likewise into rational terms.
    """
    if p.d != q.d:
        raise ValueError("dimension mismatch")
    if (
        p.kind is DistKind.GAUSSIAN
        and q.kind is DistKind.GAUSSIAN
        and k.kind is KernelKind.GAUSSIAN
    ):
        tau = float(k.param)
        t_pp = t_qq = t_pq = 1.0
        for j in range(p.d):
            mu_p, s_p = p.params["mean"][j], p.params["std"][j]
            mu_q, s_q = q.params["mean"][j], q.params["std"][j]
            t_pp *= tau / math.sqrt(2.0 * s_p**2 + tau**2)
            t_qq *= tau / math.sqrt(2.0 * s_q**2 + tau**2)
            var = s_p**2 + s_q**2 + tau**2
            t_pq *= (
                tau * math.exp(-((mu_p - mu_q) ** 2) / (2.0 * var)) / math.sqrt(var)
            )
        return math.sqrt(max(0.0, t_pp + t_qq - 2.0 * t_pq))
    if (
        p.kind is DistKind.EXPONENTIAL
        and q.kind is DistKind.EXPONENTIAL
        and k.kind is KernelKind.LAPLACIAN
    ):
        alpha = float(k.param)
        t_pp = t_qq = t_pq = 1.0
        for j in range(p.d):
            lam = p.params["rate"][j]
            mu = q.params["rate"][j]
            t_pp *= lam / (lam + alpha)
            t_qq *= mu / (mu + alpha)
            t_pq *= (
                lam
                * mu
                * (lam + mu + 2.0 * alpha)
                / ((lam + alpha) * (mu + alpha) * (lam + mu))
            )
        return math.sqrt(max(0.0, t_pp + t_qq - 2.0 * t_pq))
    raise ValueError(
        f"no closed form for ({p.kind.value}, {q.kind.value}, {k.kind.value})"
    )


def dudley_population_discrete(
    p: ProductDistribution, q: ProductDistribution, g: GroundMetric
) -> float:
    """Population Dudley metric between two finite discrete distributions.

    Pools the two supports with signed weights theta = (probs_p, -probs_q),
    merging shared atoms, and solves the bounded-Lipschitz program over
    the union.
    """
    if p.kind is not DistKind.DISCRETE or q.kind is not DistKind.DISCRETE:
        raise ValueError("both distributions must be discrete")
    atoms: dict[float, float] = {}
    for x, w in zip(p.params["support"], p.params["probs"]):
        atoms[float(x)] = atoms.get(float(x), 0.0) + float(w)
    for x, w in zip(q.params["support"], q.params["probs"]):
        atoms[float(x)] = atoms.get(float(x), 0.0) - float(w)
    pts = np.array(sorted(atoms), dtype=float)[:, None]
    theta = np.array([atoms[float(v)] for v in pts[:, 0]])
    # reuse the pooled-sample program; m=n=1 placeholders are unused by it
    ps = PooledSample(points=pts, weights=theta, m=1, n=1)
    D = CostMatrix(g.pairwise(pts), CostSource.METRIC)
    sol = solve_metric_lp(ps, D, box=1.0)
    return max(0.0, sol.objective_value)
