"""Shared domain types: samples, pooled weighted samples, metrics, kernels.

Points are dense real vectors. A two-sample problem is pooled into a single
weighted point set where points from the first sample carry weight +1/m and
points from the second carry -1/n; exact duplicates are merged with summed
weights.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "SampleLabel",
    "SampleSet",
    "PooledSample",
    "GroundMetric",
    "Kernel",
    "CostMatrix",
    "pool",
    "cost_matrix",
    "load_sample_csv",
]


class SampleLabel(enum.Enum):
    P = "P"
    Q = "Q"


def _as_points(points, name: str = "points") -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array of shape (n, d)")
    if not np.all(np.isfinite(pts)):
        raise ValueError(f"{name} contains non-finite coordinates")
    return pts


@dataclass(frozen=True)
class SampleSet:
    """An ordered i.i.d. sample from one of the two distributions."""

    points: np.ndarray
    label: SampleLabel

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class PooledSample:
    """The merged two-sample dataset with signed weights.

    ``weights[i]`` is +1/m for a point seen only in the P sample, -1/n for a
    point seen only in the Q sample, and the sum for duplicated points.
    Weights always sum to zero.
    """

    points: np.ndarray
    weights: np.ndarray
    m: int
    n: int

    def __post_init__(self):
        pts = _as_points(self.points)
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (pts.shape[0],):
            raise ValueError("weights must have one entry per pooled point")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights contain non-finite values")
        if abs(w.sum()) > 1e-12:
            raise ValueError("pooled weights must sum to zero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def pool(sp: SampleSet, sq: SampleSet) -> PooledSample:
    """Merge a P sample and a Q sample into one signed-weight point set.

    P points keep their input order, followed by Q points. Points that
    coincide exactly (coordinate equality, no tolerance) are merged into the
    first occurrence with summed weight, so the pooled size may be smaller
    than m + n.
    """
    if sp.label is not SampleLabel.P or sq.label is not SampleLabel.Q:
        raise ValueError("pool expects a P-labelled and a Q-labelled sample, in that order")
    if sp.dim != sq.dim:
        raise ValueError(f"dimension mismatch: P has d={sp.dim}, Q has d={sq.dim}")
    m, n = sp.n, sq.n
    seen: dict[bytes, int] = {}
    pts: list[np.ndarray] = []
    wts: list[float] = []
    for block, w in ((sp.points, 1.0 / m), (sq.points, -1.0 / n)):
        for row in block:
            key = row.tobytes()
            idx = seen.get(key)
            if idx is None:
                seen[key] = len(pts)
                pts.append(row)
                wts.append(w)
            else:
                wts[idx] += w
    return PooledSample(points=np.vstack(pts), weights=np.array(wts), m=m, n=n)


class MetricKind(enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"
    CUSTOM = "custom"


@dataclass(frozen=True)
class GroundMetric:
    """A ground metric on R^d. Built-in kinds are the l1, l2, linf norms."""

    kind: MetricKind = MetricKind.L1
    func: Optional[Callable[[np.ndarray, np.ndarray], float]] = None

    def __post_init__(self):
        if self.kind is MetricKind.CUSTOM and self.func is None:
            raise ValueError("custom metric requires a callable")

    @classmethod
    def from_name(cls, name: str) -> "GroundMetric":
        return cls(kind=MetricKind(name.lower()))

    def distance(self, x: np.ndarray, y: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind is MetricKind.CUSTOM:
            return float(self.func(x, y))
        diff = x - y
        if self.kind is MetricKind.L1:
            return float(np.abs(diff).sum())
        if self.kind is MetricKind.L2:
            return float(np.sqrt((diff * diff).sum()))
        return float(np.abs(diff).max())

    def pairwise(self, X: np.ndarray, Y: Optional[np.ndarray] = None) -> np.ndarray:
        """Pairwise distance matrix; with Y=None, distances within X."""
        X = np.asarray(X, dtype=float)
        Y = X if Y is None else np.asarray(Y, dtype=float)
        if self.kind is MetricKind.CUSTOM:
            out = np.empty((X.shape[0], Y.shape[0]))
            for i, x in enumerate(X):
                for j, y in enumerate(Y):
                    out[i, j] = self.func(x, y)
            return out
        diff = X[:, None, :] - Y[None, :, :]
        if self.kind is MetricKind.L1:
            return np.abs(diff).sum(axis=-1)
        if self.kind is MetricKind.L2:
            return np.sqrt((diff * diff).sum(axis=-1))
        return np.abs(diff).max(axis=-1)


class KernelKind(enum.Enum):
    GAUSSIAN = "gaussian"
    LAPLACIAN = "laplacian"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Kernel:
    """A bounded reproducing kernel.

    gaussian: k(x, y) = exp(-||x - y||_2^2 / (2 sigma^2)), param = sigma > 0
    laplacian: k(x, y) = exp(-alpha ||x - y||_1), param = alpha > 0

    Both built-ins satisfy sup_x k(x, x) = 1.
    """

    kind: KernelKind = KernelKind.GAUSSIAN
    param: float = 1.0
    func: Optional[Callable[[np.ndarray, np.ndarray], float]] = None
    bound: Optional[float] = None  # sup_x k(x, x) for custom kernels

    def __post_init__(self):
        if self.kind is KernelKind.CUSTOM:
            if self.func is None:
                raise ValueError("custom kernel requires a callable")
        elif self.param <= 0:
            raise ValueError(f"{self.kind.value} kernel parameter must be positive")

    @classmethod
    def from_name(cls, name: str, param: float = 1.0) -> "Kernel":
        return cls(kind=KernelKind(name.lower()), param=param)

    @property
    def diag_bound(self) -> float:
        """C with sup_x k(x, x) <= C."""
        if self.kind is KernelKind.CUSTOM:
            if self.bound is None:
                raise ValueError("custom kernel needs an explicit diagonal bound")
            return self.bound
        return 1.0

    def value(self, x: np.ndarray, y: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind is KernelKind.CUSTOM:
            return float(self.func(x, y))
        if self.kind is KernelKind.GAUSSIAN:
            sq = float(((x - y) ** 2).sum())
            return float(np.exp(-sq / (2.0 * self.param**2)))
        return float(np.exp(-self.param * np.abs(x - y).sum()))

    def gram(self, X: np.ndarray, Y: Optional[np.ndarray] = None) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Y = X if Y is None else np.asarray(Y, dtype=float)
        if self.kind is KernelKind.CUSTOM:
            out = np.empty((X.shape[0], Y.shape[0]))
            for i, x in enumerate(X):
                for j, y in enumerate(Y):
                    out[i, j] = self.func(x, y)
            return out
        diff = X[:, None, :] - Y[None, :, :]
        if self.kind is KernelKind.GAUSSIAN:
            return np.exp(-(diff * diff).sum(axis=-1) / (2.0 * self.param**2))
        return np.exp(-self.param * np.abs(diff).sum(axis=-1))


class CostSource(enum.Enum):
    METRIC = "metric"
    KERNEL = "kernel"


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise metric or kernel values over the pooled points."""

    entries: np.ndarray
    source: CostSource

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("cost matrix must be square")
        if not np.all(np.isfinite(e)):
            raise ValueError("cost matrix has non-finite entries")
        if not np.array_equal(e, e.T):
            raise ValueError("cost matrix must be exactly symmetric")
        if self.source is CostSource.METRIC:
            if np.any(np.diag(e) != 0.0) or np.any(e < 0.0):
                raise ValueError("metric cost matrix needs zero diagonal and non-negative entries")
        object.__setattr__(self, "entries", e)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def cost_matrix(ps: PooledSample, g: GroundMetric | Kernel) -> CostMatrix:
    """Materialize pairwise rho(X_i, X_j) or k(X_i, X_j) over the pooled points.

    Only the upper triangle is computed; the lower triangle is mirrored, so
    the result is exactly symmetric.
    """
    if isinstance(g, GroundMetric):
        full = g.pairwise(ps.points)
        source = CostSource.METRIC
        np.fill_diagonal(full, 0.0)
    elif isinstance(g, Kernel):
        full = g.gram(ps.points)
        source = CostSource.KERNEL
    else:
        raise TypeError("expected a GroundMetric or Kernel")
    upper = np.triu(full, k=1)
    entries = upper + upper.T + np.diag(np.diag(full))
    if not np.all(np.isfinite(entries)):
        raise ValueError("non-finite metric/kernel value encountered")
    return CostMatrix(entries=entries, source=source)


def load_sample_csv(path, label: SampleLabel) -> SampleSet:
    """Read a sample file: one point per row, d numeric columns.

    A single leading non-numeric row is treated as a header and skipped.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty sample file")
    start = 0
    try:
        [float(tok) for tok in lines[0].split(",")]
    except ValueError:
        start = 1
    rows = []
    for ln in lines[start:]:
        rows.append([float(tok) for tok in ln.split(",")])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: inconsistent column counts {sorted(widths)}")
    return SampleSet(points=np.array(rows, dtype=float), label=label)
