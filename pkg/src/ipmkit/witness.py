"""Witness functions attaining the empirical metric suprema.

Three representations, each evaluable at arbitrary points:

* Lipschitz extension: f_alpha(x) = alpha * min_i(a_i + L rho(x, X_i))
  + (1 - alpha) * max_i(a_i - L rho(x, X_i)). It interpolates the anchor
  coefficients exactly and carries the same Lipschitz constant L.
* Bounded-Lipschitz extension: the analogous extension built from the
  tightest induced constant, clipped to [-cap, +cap].
* RKHS expansion: f(x) = sum_i w_i k(x, X_i) with w_i = weight_i / norm,
  a unit-norm element of the kernel's Hilbert space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import GroundMetric, Kernel, KernelKind, PooledSample

__all__ = [
    "WitnessVariant",
    "Witness",
    "lipschitz_extension",
    "bounded_lipschitz_extension",
    "rkhs_witness",
    "evaluate",
    "induced_lipschitz_constant",
]

_SLACK = 1e-6  # absorbs LP round-off in the extension precondition


class WitnessVariant(enum.Enum):
    LIPSCHITZ_EXT = "lipschitz-extension"
    BOUNDED_LIPSCHITZ_EXT = "bounded-lipschitz-extension"
    RKHS_EXPANSION = "rkhs-expansion"


@dataclass(frozen=True)
class Witness:
    """An evaluable witness function.

    anchors holds the sample points; coefficients carry the potentials
    a_i (extension variants) or expansion weights w_i (RKHS variant).
    """

    variant: WitnessVariant
    anchors: np.ndarray
    coefficients: np.ndarray
    alpha: float = 0.5
    L: Optional[float] = None
    cap: Optional[float] = None
    ground: Optional[GroundMetric] = None
    kernel: Optional[Kernel] = None

    def __post_init__(self):
        pts = np.asarray(self.anchors, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        coef = np.asarray(self.coefficients, dtype=float)
        if coef.ndim != 1 or coef.size != pts.shape[0]:
            raise ValueError("one coefficient per anchor required")
        object.__setattr__(self, "anchors", pts)
        object.__setattr__(self, "coefficients", coef)

    @property
    def dim(self) -> int:
        return self.anchors.shape[1]

    def __call__(self, x) -> np.ndarray | float:
        return evaluate(self, x)

    def to_json(self) -> dict:
        out = {
            "variant": self.variant.value,
            "alpha": self.alpha,
            "L": self.L,
            "cap": self.cap,
            "anchors": [
                [*map(float, pt), float(c)]
                for pt, c in zip(self.anchors, self.coefficients)
            ],
            "kernel": None,
        }
        if self.kernel is not None:
            out["kernel"] = {"kind": self.kernel.kind.value, "param": self.kernel.param}
        return out

    @classmethod
    def from_json(cls, obj: dict, ground: Optional[GroundMetric] = None) -> "Witness":
        rows = np.asarray(obj["anchors"], dtype=float)
        kernel = None
        if obj.get("kernel"):
            kernel = Kernel.from_name(obj["kernel"]["kind"], obj["kernel"]["param"])
        variant = WitnessVariant(obj["variant"])
        if variant is not WitnessVariant.RKHS_EXPANSION and ground is None:
            ground = GroundMetric.from_name("l2")
        return cls(
            variant=variant,
            anchors=rows[:, :-1],
            coefficients=rows[:, -1],
            alpha=obj.get("alpha", 0.5),
            L=obj.get("L"),
            cap=obj.get("cap"),
            ground=ground,
            kernel=kernel,
        )


def induced_lipschitz_constant(
    anchors: np.ndarray, coefficients: np.ndarray, g: GroundMetric
) -> float:
    """max over pairs of |a_i - a_j| / rho(X_i, X_j), zero-distance pairs skipped."""
    a = np.asarray(coefficients, dtype=float)
    D = g.pairwise(np.asarray(anchors, dtype=float))
    diffs = np.abs(a[:, None] - a[None, :])
    mask = D > 0
    if not mask.any():
        return 0.0
    return float((diffs[mask] / D[mask]).max())


def lipschitz_extension(anchors, coefficients, L: float, alpha: float, g: GroundMetric) -> Witness:
    """Extend anchor values to all of R^d with Lipschitz constant L."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    anchors = np.asarray(anchors, dtype=float)
    induced = induced_lipschitz_constant(anchors, coefficients, g)
    if L < induced - _SLACK:
        raise ValueError(
            f"L={L:g} smaller than the constant {induced:g} induced by the anchors"
        )
    return Witness(
        variant=WitnessVariant.LIPSCHITZ_EXT,
        anchors=anchors,
        coefficients=coefficients,
        alpha=float(alpha),
        L=float(L),
        ground=g,
    )


def bounded_lipschitz_extension(
    anchors, coefficients, L: float, cap: float, alpha: float, g: GroundMetric
) -> Witness:
    """Lipschitz extension clipped to [-cap, +cap]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    coef = np.asarray(coefficients, dtype=float)
    if coef.size and np.abs(coef).max() > cap + _SLACK:
        raise ValueError("cap smaller than the largest anchor magnitude")
    anchors = np.asarray(anchors, dtype=float)
    induced = induced_lipschitz_constant(anchors, coef, g)
    if L < induced - _SLACK:
        raise ValueError(
            f"L={L:g} smaller than the constant {induced:g} induced by the anchors"
        )
    return Witness(
        variant=WitnessVariant.BOUNDED_LIPSCHITZ_EXT,
        anchors=anchors,
        coefficients=coef,
        alpha=float(alpha),
        L=float(L),
        cap=float(cap),
        ground=g,
    )


def rkhs_witness(ps: PooledSample, k: Kernel, norm: float) -> Witness:
    """Unit-norm kernel expansion with weights w_i = weight_i / norm."""
    if norm <= 0.0:
        raise ValueError("norm must be positive; a zero estimate has no witness")
    return Witness(
        variant=WitnessVariant.RKHS_EXPANSION,
        anchors=ps.points,
        coefficients=ps.weights / norm,
        kernel=k,
    )


def _as_batch(w: Witness, x) -> tuple[np.ndarray, bool]:
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != w.dim:
        raise ValueError(f"expected points of dimension {w.dim}")
    return pts, single


def evaluate(w: Witness, x) -> np.ndarray | float:
    """Evaluate the witness at a point or a batch of points (rows)."""
    pts, single = _as_batch(w, x)
    a = w.coefficients
    if w.variant is WitnessVariant.RKHS_EXPANSION:
        vals = w.kernel.gram(pts, w.anchors) @ a
    else:
        D = w.ground.pairwise(pts, w.anchors)
        lower = (a[None, :] + w.L * D).min(axis=1)
        upper = (a[None, :] - w.L * D).max(axis=1)
        vals = w.alpha * lower + (1.0 - w.alpha) * upper
        if w.variant is WitnessVariant.BOUNDED_LIPSCHITZ_EXT:
            vals = np.clip(vals, -w.cap, w.cap)
    return float(vals[0]) if single else vals
