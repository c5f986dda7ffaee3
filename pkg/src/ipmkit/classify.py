"""Binary-classification readings of the metric estimators.

The estimate of each metric is (up to sign) the optimal risk of a binary
classification problem with the class-conditional losses
L_{+1}(a) = -a / eps and L_{-1}(a) = a / (1 - eps), eps = m / (m + n):
``l_risk_check`` re-computes that risk from a witness and must return the
negative of the reported estimate. The MMD witness's sign is the Parzen
window rule; the Wasserstein and Dudley programs become large-margin
Lipschitz classifiers when the potentials are constrained to classify
the training labels.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import GroundMetric, Kernel, PooledSample
from .estimators import EstimateReport, dudley, wasserstein
from .lp import IterationLimitError
from .witness import (
    Witness,
    WitnessVariant,
    bounded_lipschitz_extension,
    evaluate,
    lipschitz_extension,
)

__all__ = [
    "LabeledSample",
    "ClassifierKind",
    "Classifier",
    "l_risk_check",
    "parzen_train",
    "mean_distance_interpretation",
    "lipschitz_margin_train",
    "margin_bound_check",
]


@dataclass(frozen=True)
class LabeledSample:
    """Training points with +/-1 labels and the positive-class prior."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        lab = np.asarray(self.labels, dtype=float)
        if lab.ndim != 1 or lab.size != pts.shape[0]:
            raise ValueError("one label per point required")
        if not np.all(np.isin(lab, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")
        if not ((lab > 0).any() and (lab < 0).any()):
            raise ValueError("both classes must be present")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)

    @property
    def eps(self) -> float:
        """Positive-class prior (#positive / N); always in (0, 1)."""
        return float((self.labels > 0).sum() / self.labels.size)

    @property
    def n(self) -> int:
        return self.labels.size


class ClassifierKind(enum.Enum):
    PARZEN = "parzen"
    LIPSCHITZ_MARGIN = "lipschitz-margin"
    BOUNDED_LIPSCHITZ_MARGIN = "bounded-lipschitz-margin"


@dataclass(frozen=True)
class Classifier:
    """sign-of-discriminant rule; sign(0) is defined as -1."""

    kind: ClassifierKind
    discriminant: Witness
    margin: Optional[float] = None

    def predict(self, x) -> np.ndarray:
        vals = np.atleast_1d(evaluate(self.discriminant, x))
        return np.where(vals > 0.0, 1.0, -1.0)

    def to_json(self) -> dict:
        out = self.discriminant.to_json()
        out["kind"] = self.kind.value
        out["margin"] = self.margin
        return out


def l_risk_check(ps: PooledSample, est: EstimateReport) -> float:
    """Empirical classification risk of a witness under the metric's losses.

    Labels are +1 on P points and -1 on Q points, with losses
    L_{+1}(a) = -a/eps, L_{-1}(a) = a/(1-eps), eps = m/(m+n). The risk is
    the label-weighted average of the losses at the witness values; for an
    optimal witness it equals -(estimate).
    """
    if est.witness is None:
        raise ValueError("estimate carries no witness (zero value?)")
    vals = np.atleast_1d(evaluate(est.witness, ps.points))
    # the signed weights already encode eps: w_i = +1/m on P, -1/n on Q,
    # and the risk eps*mean(L_+1) + (1-eps)*mean(L_-1) telescopes to -sum w_i f(X_i)
    # times (m+n)/(m+n) after the priors cancel the class sizes
    m, n = ps.m, ps.n
    eps = m / (m + n)
    # empirical risk = (1/(m+n)) sum_i L_{Y_i}(f(X_i)). The per-loss scale
    # factors collapse: -1/(eps (m+n)) = -1/m and 1/((1-eps)(m+n)) = 1/n,
    # so on the pooled signed weights (which already carry +1/m and -1/n,
    # duplicates merged) the risk is exactly -(sum_i w_i f(X_i)).
    scale_p = -1.0 / (eps * (m + n))
    scale_q = 1.0 / ((1.0 - eps) * (m + n))
    pos_part = float(vals @ np.clip(ps.weights, 0.0, None)) * m  # sum over P copies
    neg_part = float(vals @ np.clip(-ps.weights, 0.0, None)) * n  # sum over Q copies
    return scale_p * pos_part + scale_q * neg_part


def parzen_train(ls: LabeledSample, k: Kernel) -> Classifier:
    """Kernel rule sign((1/m) sum_{Y=+1} k(x,X_i) - (1/n) sum_{Y=-1} k(x,X_i))."""
    m = int((ls.labels > 0).sum())
    n = int((ls.labels < 0).sum())
    weights = np.where(ls.labels > 0, 1.0 / m, -1.0 / n)
    disc = Witness(
        variant=WitnessVariant.RKHS_EXPANSION,
        anchors=ls.points,
        coefficients=weights,
        kernel=k,
    )
    return Classifier(ClassifierKind.PARZEN, disc)


def mean_distance_interpretation(ls: LabeledSample, k: Kernel, x) -> tuple[float, float]:
    """Squared RKHS distances from k(., x) to the two class means.

    Returns (||k(.,x) - mu_plus||^2, ||k(.,x) - mu_minus||^2), expanded via
    Gram sums. When the class means have equal RKHS norm, choosing the
    nearer mean reproduces the kernel rule's predictions.
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    pos = ls.points[ls.labels > 0]
    neg = ls.points[ls.labels < 0]
    kxx = float(k.gram(x, x)[0, 0])
    kxp = float(k.gram(x, pos).mean())
    kxn = float(k.gram(x, neg).mean())
    mu_pp = float(k.gram(pos, pos).mean())
    mu_nn = float(k.gram(neg, neg).mean())
    return (kxx - 2.0 * kxp + mu_pp, kxx - 2.0 * kxn + mu_nn)


def _margin_lp(ls: LabeledSample, g: GroundMetric, bounded: bool):
    """min L (or L + c) s.t. |a_i - a_j| <= L rho_ij, Y_i a_i >= 1, |a_i| <= c."""
    from scipy import sparse
    from scipy.optimize import linprog

    pts = ls.points
    N = ls.n
    D = g.pairwise(pts)
    iu, ju = np.triu_indices(N, k=1)
    zero_pair = D[iu, ju] <= 0.0
    if np.any(zero_pair & (ls.labels[iu] != ls.labels[ju])):
        return None  # identical points, conflicting labels: inseparable
    keep = ~zero_pair
    iu, ju = iu[keep], ju[keep]
    rho = D[iu, ju]
    nvar = N + (2 if bounded else 1)  # [a_1..a_N, L, (c)]
    nc = len(iu)
    rows = np.repeat(np.arange(2 * nc), 3)
    cols = np.concatenate(
        [
            np.stack([iu, ju, np.full(nc, N)], 1).ravel(),
            np.stack([ju, iu, np.full(nc, N)], 1).ravel(),
        ]
    )
    vals = np.concatenate(
        [
            np.stack([np.ones(nc), -np.ones(nc), -rho], 1).ravel(),
            np.stack([np.ones(nc), -np.ones(nc), -rho], 1).ravel(),
        ]
    )
    A = sparse.csr_matrix((vals, (rows, cols)), shape=(2 * nc, nvar))
    b = np.zeros(2 * nc)
    # -Y_i a_i <= -1
    Ay = sparse.csr_matrix(
        (-ls.labels, (np.arange(N), np.arange(N))), shape=(N, nvar)
    )
    A = sparse.vstack([A, Ay])
    b = np.concatenate([b, -np.ones(N)])
    c_obj = np.zeros(nvar)
    c_obj[N] = 1.0
    bounds = [(None, None)] * N + [(0, None)]
    if bounded:
        c_obj[N + 1] = 1.0
        bounds.append((0, None))
        eye = sparse.eye(N, format="csr")
        pad = sparse.csr_matrix((N, 1))
        ccol = sparse.csr_matrix(np.full((N, 1), -1.0))
        Ac = sparse.vstack(
            [sparse.hstack([eye, pad, ccol]), sparse.hstack([-eye, pad, ccol])]
        )
        A = sparse.vstack([A, Ac])
        b = np.concatenate([b, np.zeros(2 * N)])
    res = linprog(c_obj, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status == 2:
        return None
    if res.status != 0:
        raise IterationLimitError(f"margin LP failed: {res.message}")
    return res.x


def lipschitz_margin_train(
    ls: LabeledSample, g: GroundMetric, bounded: bool = False
) -> Classifier:
    """Large-margin Lipschitz classifier.

    Minimizes the Lipschitz constant L subject to Y_i a_i >= 1, then extends
    the potentials to a discriminant with constant L; margin = 1/L. The
    bounded variant minimizes L + c with the extra cap |a_i| <= c;
    margin = 1/(L + c).

    Raises ValueError when the data are inseparable (an identical point
    carries both labels).
    """
    x = _margin_lp(ls, g, bounded)
    if x is None:
        raise ValueError("training set inseparable: conflicting labels at a point")
    N = ls.n
    a, L = x[:N], float(x[N])
    if bounded:
        c = float(x[N + 1])
        disc = bounded_lipschitz_extension(
            ls.points, a, L=max(L, 1e-30), cap=c, alpha=0.5, g=g
        )
        return Classifier(
            ClassifierKind.BOUNDED_LIPSCHITZ_MARGIN, disc, margin=1.0 / (L + c)
        )
    disc = lipschitz_extension(ls.points, a, L=max(L, 1e-30), alpha=0.5, g=g)
    return Classifier(ClassifierKind.LIPSCHITZ_MARGIN, disc, margin=1.0 / L)


def margin_bound_check(
    ls: LabeledSample, g: GroundMetric, bounded: bool = False
) -> tuple[float, float, bool]:
    """Compare a margin against its metric bound.

    Returns (margin, bound, holds) with bound = W_mn/2 for the Lipschitz
    classifier or beta_mn/2 for the bounded variant, where the metric is
    estimated from the two classes as the P and Q samples.
    """
    clf = lipschitz_margin_train(ls, g, bounded=bounded)
    pos = ls.points[ls.labels > 0]
    neg = ls.points[ls.labels < 0]
    from .core import SampleLabel, SampleSet, pool

    ps = pool(SampleSet(pos, SampleLabel.P), SampleSet(neg, SampleLabel.Q))
    est = dudley(ps, g) if bounded else wasserstein(ps, g)
    bound = est.value / 2.0
    margin = clf.margin
    return margin, bound, bool(margin <= bound + 1e-9)
