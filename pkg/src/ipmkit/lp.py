"""Dense linear programming and the metric-constrained programs.

Two layers live here:

* ``solve`` -- a small, deterministic LP solver. Tiny problems run on a
  self-contained dense two-phase simplex with Bland's anti-cycling rule;
  larger ones are delegated to scipy's HiGHS backend behind the same
  ``LpProblem``/``LpSolution`` contract.
* ``solve_metric_lp`` -- builds the Lipschitz-constrained program over a
  pooled sample (optionally with the sup-norm box that defines the
  bounded-Lipschitz variant) and solves it. Structurally special instances
  take exact shortcuts: a sorted-adjacency reduction on the line, and an
  assignment-plus-shortest-path dual recovery for balanced uniform weights.
  Every path returns an optimal, dual-feasible potential vector.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linear_sum_assignment, linprog

from .core import CostMatrix, CostSource, PooledSample

__all__ = [
    "Relation",
    "LpProblem",
    "LpStatus",
    "LpSolution",
    "IterationLimitError",
    "solve",
    "solve_metric_lp",
    "dump_lp_text",
]

FEAS_TOL = 1e-7
OPT_TOL = 1e-9
PIVOT_TOL = 1e-10


class Relation(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class IterationLimitError(RuntimeError):
    """The pivot cap was exceeded; indicates a solver bug, not a bad model."""


@dataclass
class LpProblem:
    """maximize c @ x subject to row constraints and per-variable bounds.

    ``bounds[i]`` is a (lower, upper) pair where None means unbounded on
    that side; the default is fully free variables.
    """

    objective: np.ndarray
    rows: np.ndarray
    relations: Sequence[Relation]
    rhs: np.ndarray
    bounds: Optional[Sequence[tuple[Optional[float], Optional[float]]]] = None

    def __post_init__(self):
        self.objective = np.atleast_1d(np.asarray(self.objective, dtype=float))
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, self.objective.size)
        self.rhs = np.atleast_1d(np.asarray(self.rhs, dtype=float))
        if self.objective.size == 0:
            raise ValueError("at least one variable required")
        if len(self.relations) != self.rows.shape[0] or self.rhs.size != self.rows.shape[0]:
            raise ValueError("rows, relations and rhs must agree in length")
        for arr in (self.objective, self.rows, self.rhs):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite coefficient in LP")
        if self.bounds is None:
            self.bounds = [(None, None)] * self.objective.size
        elif len(self.bounds) != self.objective.size:
            raise ValueError("one bounds pair per variable required")

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    objective_value: float
    status: LpStatus
    iterations: int


def dump_lp_text(p: LpProblem) -> str:
    """Render the problem in a plain LP text format for external cross-checks."""
    buf = io.StringIO()

    def term(coef: float, j: int) -> str:
        return f"{coef:+g} x{j}"

    buf.write("maximize: " + " ".join(term(c, j) for j, c in enumerate(p.objective)) + "\n")
    buf.write("subject to:\n")
    for row, rel, b in zip(p.rows, p.relations, p.rhs):
        lhs = " ".join(term(c, j) for j, c in enumerate(row) if c != 0.0) or "0"
        buf.write(f"  {lhs} {rel.value} {b:g}\n")
    buf.write("bounds:\n")
    for j, (lo, up) in enumerate(p.bounds):
        lo_s = "-inf" if lo is None else f"{lo:g}"
        up_s = "+inf" if up is None else f"{up:g}"
        buf.write(f"  {lo_s} <= x{j} <= {up_s}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# dense two-phase simplex
# ---------------------------------------------------------------------------


def _pivot_loop(T, basis, cost, cap, blocked, iters):
    """Bland-rule pivoting on the tableau until optimal or unbounded.

    Returns (status_str, iterations). ``blocked`` columns may never enter.
    """
    n_cols = T.shape[1] - 1
    while True:
        cb = cost[basis]
        reduced = cost - cb @ T[:, :-1]
        enter = -1
        for j in range(n_cols):
            if not blocked[j] and basis_mask_safe(basis, j) and reduced[j] > OPT_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal", iters
        col = T[:, enter]
        ratios = np.full(T.shape[0], np.inf)
        ok = col > PIVOT_TOL
        ratios[ok] = T[ok, -1] / col[ok]
        if not ok.any():
            return "unbounded", iters
        best = np.min(ratios)
        # Bland tie-break: smallest basis variable index among minimizers
        cand = np.where(ratios <= best + 1e-15)[0]
        leave = cand[np.argmin(np.asarray(basis)[cand])]
        piv = T[leave, enter]
        T[leave] /= piv
        for i in range(T.shape[0]):
            if i != leave and T[i, enter] != 0.0:
                T[i] -= T[i, enter] * T[leave]
        basis[leave] = enter
        iters += 1
        if iters > cap:
            raise IterationLimitError(f"simplex exceeded {cap} pivots")


def basis_mask_safe(basis, j) -> bool:
    # entering a column already basic is a no-op; skip it
    return j not in basis


def _solve_simplex(p: LpProblem) -> LpSolution:
    """Two-phase dense simplex on the canonicalized standard form."""
    n = p.n_vars
    # variable transformation to x' >= 0
    # col_map[j] -> list of (column, sign, shift) contributions
    cols: list[np.ndarray] = []
    obj: list[float] = []
    recover: list[tuple[int, str, float]] = []  # (orig var, mode, shift)
    extra_rows: list[tuple[np.ndarray, Relation, float]] = []
    A = p.rows
    b = p.rhs.copy().astype(float)
    rels = list(p.relations)
    offset = 0.0
    for j, (lo, up) in enumerate(p.bounds):
        a_col = A[:, j]
        if lo is None and up is None:
            cols.append(a_col)
            obj.append(p.objective[j])
            recover.append((j, "pos", 0.0))
            cols.append(-a_col)
            obj.append(-p.objective[j])
            recover.append((j, "neg", 0.0))
        elif lo is not None:
            # x = lo + x'
            cols.append(a_col)
            obj.append(p.objective[j])
            recover.append((j, "pos", lo))
            b -= a_col * lo
            offset += p.objective[j] * lo
            if up is not None:
                row = np.zeros(len(p.bounds))
                row[j] = 1.0
                extra_rows.append((row, Relation.LE, up))
        else:
            # x = up - x'
            cols.append(-a_col)
            obj.append(-p.objective[j])
            recover.append((j, "neg", up))
            b -= a_col * up
            offset += p.objective[j] * up
    ncols0 = len(cols)
    A2 = np.column_stack(cols) if ncols0 else np.zeros((A.shape[0], 0))
    # append bound rows (expressed in original vars, re-map)
    for row, rel, rhs_v in extra_rows:
        new_row = np.zeros(ncols0)
        rhs_adj = rhs_v
        k = 0
        for jj, (lo, up) in enumerate(p.bounds):
            if lo is None and up is None:
                new_row[k] = row[jj]
                new_row[k + 1] = -row[jj]
                k += 2
            elif lo is not None:
                new_row[k] = row[jj]
                rhs_adj -= row[jj] * lo
                k += 1
            else:
                new_row[k] = -row[jj]
                rhs_adj -= row[jj] * up
                k += 1
        A2 = np.vstack([A2, new_row])
        b = np.append(b, rhs_adj)
        rels.append(rel)
    m_rows = A2.shape[0]
    # orient rows to b >= 0
    for i in range(m_rows):
        if b[i] < 0:
            A2[i] = -A2[i]
            b[i] = -b[i]
            if rels[i] is Relation.LE:
                rels[i] = Relation.GE
            elif rels[i] is Relation.GE:
                rels[i] = Relation.LE
    # slacks / artificials
    slack_cols = []
    art_cols = []
    for i, rel in enumerate(rels):
        if rel is Relation.LE:
            e = np.zeros(m_rows)
            e[i] = 1.0
            slack_cols.append((e, i, False))
        elif rel is Relation.GE:
            e = np.zeros(m_rows)
            e[i] = -1.0
            slack_cols.append((e, i, True))
        # EQ adds nothing here
    M = [A2] + [c[0][:, None] for c in slack_cols]
    T_body = np.hstack(M) if len(M) > 1 else A2
    n_struct = T_body.shape[1]
    basis = [-1] * m_rows
    # slack columns of LE rows form partial initial basis
    for idx, (e, i, needs_art) in enumerate(slack_cols):
        if not needs_art:
            basis[i] = ncols0 + idx
    for i in range(m_rows):
        if basis[i] < 0:
            e = np.zeros(m_rows)
            e[i] = 1.0
            art_cols.append(e)
            basis[i] = n_struct + len(art_cols) - 1
    if art_cols:
        T_body = np.hstack([T_body, np.column_stack(art_cols)])
    T = np.hstack([T_body, b[:, None]])
    n_total = T.shape[1] - 1
    cap = 50 * (p.n_vars + p.n_rows) + 200
    iters = 0
    blocked = np.zeros(n_total, dtype=bool)
    if art_cols:
        c1 = np.zeros(n_total)
        c1[n_struct:] = -1.0
        status, iters = _pivot_loop(T, basis, c1, cap, blocked, iters)
        phase1 = -(c1[basis] @ T[:, -1])
        if phase1 > FEAS_TOL:
            return LpSolution(np.full(n, np.nan), np.nan, LpStatus.INFEASIBLE, iters)
        # drive remaining artificials out of the basis
        for i in range(m_rows):
            if basis[i] >= n_struct:
                row = T[i, :n_struct]
                pivots = np.where(np.abs(row) > PIVOT_TOL)[0]
                if pivots.size:
                    enter = int(pivots[0])
                    piv = T[i, enter]
                    T[i] /= piv
                    for r in range(m_rows):
                        if r != i and T[r, enter] != 0.0:
                            T[r] -= T[r, enter] * T[i]
                    basis[i] = enter
        blocked[n_struct:] = True
    c2 = np.zeros(n_total)
    c2[: len(obj)] = obj
    status, iters = _pivot_loop(T, basis, c2, cap, blocked, iters)
    if status == "unbounded":
        return LpSolution(np.full(n, np.nan), np.nan, LpStatus.UNBOUNDED, iters)
    xprime = np.zeros(n_total)
    for i, bv in enumerate(basis):
        xprime[bv] = T[i, -1]
    x = np.zeros(n)
    for k, (j, mode, shift) in enumerate(recover):
        if mode == "pos":
            x[j] += xprime[k] + shift
        else:
            x[j] += -xprime[k] + (shift if shift else 0.0)
    obj_val = float(p.objective @ x)
    return LpSolution(x, obj_val, LpStatus.OPTIMAL, iters)


def _solve_highs(p: LpProblem) -> LpSolution:
    le = [i for i, r in enumerate(p.relations) if r is Relation.LE]
    ge = [i for i, r in enumerate(p.relations) if r is Relation.GE]
    eq = [i for i, r in enumerate(p.relations) if r is Relation.EQ]
    A_ub = b_ub = A_eq = b_eq = None
    if le or ge:
        A_ub = np.vstack([p.rows[le], -p.rows[ge]]) if ge else p.rows[le]
        b_ub = np.concatenate([p.rhs[le], -p.rhs[ge]]) if ge else p.rhs[le]
    if eq:
        A_eq = p.rows[eq]
        b_eq = p.rhs[eq]
    res = linprog(
        -p.objective,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=list(p.bounds),
        method="highs",
    )
    iters = int(getattr(res, "nit", 0) or 0)
    if res.status == 2:
        return LpSolution(np.full(p.n_vars, np.nan), np.nan, LpStatus.INFEASIBLE, iters)
    if res.status == 3:
        return LpSolution(np.full(p.n_vars, np.nan), np.nan, LpStatus.UNBOUNDED, iters)
    if res.status != 0:
        raise IterationLimitError(f"HiGHS did not converge: {res.message}")
    return LpSolution(res.x, float(p.objective @ res.x), LpStatus.OPTIMAL, iters)


def solve(p: LpProblem, backend: str = "auto") -> LpSolution:
    """Solve an LP deterministically.

    backend: "simplex" (self-contained dense two-phase, Bland's rule),
    "highs" (scipy), or "auto" which uses the simplex for small problems.
    """
    if backend == "auto":
        backend = "simplex" if (p.n_vars <= 20 and p.n_rows <= 80) else "highs"
    if backend == "simplex":
        sol = _solve_simplex(p)
    elif backend == "highs":
        sol = _solve_highs(p)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if sol.status is LpStatus.OPTIMAL:
        _verify_feasible(p, sol.x)
    return sol


def _verify_feasible(p: LpProblem, x: np.ndarray, tol: float = FEAS_TOL) -> None:
    lhs = p.rows @ x
    for i, rel in enumerate(p.relations):
        if rel is Relation.LE and lhs[i] > p.rhs[i] + tol:
            raise IterationLimitError(f"row {i} violated by {lhs[i] - p.rhs[i]:.2e}")
        if rel is Relation.GE and lhs[i] < p.rhs[i] - tol:
            raise IterationLimitError(f"row {i} violated by {p.rhs[i] - lhs[i]:.2e}")
        if rel is Relation.EQ and abs(lhs[i] - p.rhs[i]) > tol:
            raise IterationLimitError(f"row {i} violated by {abs(lhs[i] - p.rhs[i]):.2e}")
    for j, (lo, up) in enumerate(p.bounds):
        if lo is not None and x[j] < lo - tol:
            raise IterationLimitError(f"bound {j} violated")
        if up is not None and x[j] > up + tol:
            raise IterationLimitError(f"bound {j} violated")


# ---------------------------------------------------------------------------
# metric-constrained programs
# ---------------------------------------------------------------------------

_FULL_LIMIT = 260  # direct all-pairs formulation beyond this gets too big


def _cost_entries(D: CostMatrix | np.ndarray) -> np.ndarray:
    if isinstance(D, CostMatrix):
        if D.source is not CostSource.METRIC:
            raise ValueError("metric LP needs a metric-sourced cost matrix")
        return D.entries
    return np.asarray(D, dtype=float)


def _pair_constraint_matrix(iu, ju, N, extra=0):
    """Sparse rows for a_i - a_j <= rho and a_j - a_i <= rho on given pairs."""
    nc = len(iu)
    rows = np.repeat(np.arange(2 * nc), 2)
    cols = np.concatenate(
        [np.stack([iu, ju], 1).ravel(), np.stack([ju, iu], 1).ravel()]
    )
    data = np.tile([1.0, -1.0], 2 * nc)
    return sparse.csr_matrix((data, (rows, cols)), shape=(2 * nc, N + extra))


def _highs_pairs_wasserstein(w, rho_pairs, iu, ju, N):
    A = _pair_constraint_matrix(iu, ju, N)
    b = np.concatenate([rho_pairs, rho_pairs])
    res = linprog(-w, A_ub=A, b_ub=b, bounds=(None, None), method="highs")
    if res.status != 0:
        raise IterationLimitError(f"metric LP failed: {res.message}")
    return res.x, int(res.nit or 0)


def _line_metric_coords(points: np.ndarray, D: np.ndarray) -> Optional[np.ndarray]:
    """If D equals |x_i - x_j| for the 1-D coordinates, return them."""
    if points.shape[1] != 1:
        return None
    x = points[:, 0]
    expect = np.abs(x[:, None] - x[None, :])
    if np.allclose(D, expect, rtol=1e-12, atol=1e-12):
        return x
    return None


def _assignment_potentials(w: np.ndarray, D: np.ndarray):
    """Exact dual potentials for balanced uniform two-sided weights.

    The program's optimum equals the cost of an optimal assignment between
    the positive- and negative-weight points; feasible optimal potentials
    follow from a Bellman-Ford pass over the pooled graph where matched
    pairs carry negated costs.
    """
    pos = np.where(w > 0)[0]
    neg = np.where(w < 0)[0]
    if len(pos) != len(neg) or len(pos) == 0:
        return None
    if not (np.allclose(w[pos], w[pos][0]) and np.allclose(w[neg], w[neg][0])):
        return None
    C = D[np.ix_(pos, neg)]
    ri, ci = linear_sum_assignment(C)
    optimum = float(w[pos][0]) * float(C[ri, ci].sum())
    graph = D.copy()
    graph[pos[ri], neg[ci]] = -C[ri, ci]
    N = len(w)
    f = np.zeros(N)
    scale = max(1.0, float(np.abs(D).max()))
    for sweep in range(N + 2):
        fn = np.minimum(f, (f[:, None] + graph).min(axis=0))
        if np.abs(fn - f).max() <= 1e-12 * scale:
            f = fn
            break
        f = fn
    else:
        return None  # did not settle: fall back to the generic solver
    viol = np.abs(f[:, None] - f[None, :]) - D
    np.fill_diagonal(viol, -1.0)
    if viol.max() > 1e-9 or abs(float(w @ f) - optimum) > 1e-7 * scale:
        return None
    return f, sweep + 1


def _wasserstein_lp(ps: PooledSample, D: np.ndarray) -> LpSolution:
    w = ps.weights
    N = len(w)
    if N == 1 or not np.any(w):
        return LpSolution(np.zeros(N), 0.0, LpStatus.OPTIMAL, 0)
    x = _line_metric_coords(ps.points, D)
    if x is not None:
        # on the line the sorted-adjacency constraints imply all others
        order = np.argsort(x, kind="stable")
        iu, ju = order[:-1], order[1:]
        a, nit = _highs_pairs_wasserstein(w, D[iu, ju], iu, ju, N)
        return LpSolution(a, float(w @ a), LpStatus.OPTIMAL, nit)
    if N > _FULL_LIMIT:
        got = _assignment_potentials(w, D)
        if got is not None:
            a, sweeps = got
            return LpSolution(a, float(w @ a), LpStatus.OPTIMAL, sweeps)
        return _wasserstein_constraint_generation(ps, D)
    iu, ju = np.triu_indices(N, k=1)
    a, nit = _highs_pairs_wasserstein(w, D[iu, ju], iu, ju, N)
    return LpSolution(a, float(w @ a), LpStatus.OPTIMAL, nit)


def _seed_pairs(ps: PooledSample, D: np.ndarray) -> set[tuple[int, int]]:
    N = D.shape[0]
    order = np.argsort(D, axis=1)
    pairs: set[tuple[int, int]] = set()
    for k in range(1, min(4, N)):
        for i in range(N):
            j = int(order[i, k])
            pairs.add((min(i, j), max(i, j)))
    chain = np.argsort(ps.points.sum(axis=1), kind="stable")
    for i, j in zip(chain[:-1], chain[1:]):
        pairs.add((min(int(i), int(j)), max(int(i), int(j))))
    return pairs


def _wasserstein_constraint_generation(ps: PooledSample, D: np.ndarray) -> LpSolution:
    w = ps.weights
    N = len(w)
    pairs = _seed_pairs(ps, D)
    got = _assignment_potentials(w, D)
    # matched edges are tight at the optimum; seeding them speeds convergence
    total = 0
    for _ in range(200):
        iu = np.fromiter((p[0] for p in pairs), int, len(pairs))
        ju = np.fromiter((p[1] for p in pairs), int, len(pairs))
        a, nit = _highs_pairs_wasserstein(w, D[iu, ju], iu, ju, N)
        total += nit
        V = np.abs(a[:, None] - a[None, :]) - D
        np.fill_diagonal(V, -1.0)
        vi, vj = np.where(V > 1e-9)
        if vi.size == 0:
            return LpSolution(a, float(w @ a), LpStatus.OPTIMAL, total)
        rowmax = V.argmax(axis=1)
        for i in range(N):
            if V[i, rowmax[i]] > 1e-9:
                j = int(rowmax[i])
                pairs.add((min(i, j), max(i, j)))
        top = np.argsort(V[vi, vj])[::-1][: 4 * N]
        for i, j in zip(vi[top], vj[top]):
            pairs.add((min(int(i), int(j)), max(int(i), int(j))))
    raise IterationLimitError("constraint generation did not converge")


def _dudley_rows(iu, ju, rho_pairs, N):
    """Rows a_i - a_j - b rho <= 0 (both orientations) over given pairs.

    Variable layout: [a_1 .. a_N, b, c].
    """
    nc = len(iu)
    rows = np.repeat(np.arange(2 * nc), 3)
    cols = np.concatenate(
        [
            np.stack([iu, ju, np.full(nc, N)], 1).ravel(),
            np.stack([ju, iu, np.full(nc, N)], 1).ravel(),
        ]
    )
    data = np.concatenate(
        [
            np.stack([np.ones(nc), -np.ones(nc), -rho_pairs], 1).ravel(),
            np.stack([np.ones(nc), -np.ones(nc), -rho_pairs], 1).ravel(),
        ]
    )
    return sparse.csr_matrix((data, (rows, cols)), shape=(2 * nc, N + 2))


def _dudley_box_rows(N, box):
    """|a_i| <= c and b + c <= box."""
    blocks = []
    rhs = []
    eye = sparse.eye(N, format="csr")
    ccol = sparse.csr_matrix(np.full((N, 1), -1.0))
    zcol = sparse.csr_matrix((N, 1))
    blocks.append(sparse.hstack([eye, zcol, ccol]))  # a_i - c <= 0
    rhs.extend([0.0] * N)
    blocks.append(sparse.hstack([-eye, zcol, ccol]))  # -a_i - c <= 0
    rhs.extend([0.0] * N)
    last = sparse.csr_matrix(
        (np.array([1.0, 1.0]), (np.array([0, 0]), np.array([N, N + 1]))),
        shape=(1, N + 2),
    )
    blocks.append(last)  # b + c <= box
    rhs.append(float(box))
    return sparse.vstack(blocks).tocsr(), np.array(rhs)


def _solve_dudley_pairs(w, D, iu, ju, N, box):
    A1 = _dudley_rows(iu, ju, D[iu, ju], N)
    A2, b2 = _dudley_box_rows(N, box)
    A = sparse.vstack([A1, A2])
    b = np.concatenate([np.zeros(A1.shape[0]), b2])
    c = np.concatenate([w, [0.0, 0.0]])
    bounds = [(None, None)] * N + [(0, None), (0, None)]
    res = linprog(-c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise IterationLimitError(f"bounded-Lipschitz LP failed: {res.message}")
    return res.x, int(res.nit or 0)


def _dudley_lp(ps: PooledSample, D: np.ndarray, box: float) -> LpSolution:
    w = ps.weights
    N = len(w)
    if N == 1 or not np.any(w):
        x = np.zeros(N + 2)
        return LpSolution(x, 0.0, LpStatus.OPTIMAL, 0)
    coords = _line_metric_coords(ps.points, D)
    if coords is not None:
        order = np.argsort(coords, kind="stable")
        iu, ju = order[:-1], order[1:]
        x, nit = _solve_dudley_pairs(w, D, iu, ju, N, box)
        return LpSolution(x, float(w @ x[:N]), LpStatus.OPTIMAL, nit)
    if N <= _FULL_LIMIT:
        iu, ju = np.triu_indices(N, k=1)
        x, nit = _solve_dudley_pairs(w, D, iu, ju, N, box)
        return LpSolution(x, float(w @ x[:N]), LpStatus.OPTIMAL, nit)
    pairs = _seed_pairs(ps, D)
    total = 0
    for _ in range(200):
        iu = np.fromiter((p[0] for p in pairs), int, len(pairs))
        ju = np.fromiter((p[1] for p in pairs), int, len(pairs))
        x, nit = _solve_dudley_pairs(w, D, iu, ju, N, box)
        total += nit
        a, bvar = x[:N], x[N]
        V = np.abs(a[:, None] - a[None, :]) - bvar * D
        np.fill_diagonal(V, -1.0)
        vi, vj = np.where(V > 1e-9)
        if vi.size == 0:
            return LpSolution(x, float(w @ a), LpStatus.OPTIMAL, total)
        top = np.argsort(V[vi, vj])[::-1][: 4 * N]
        for i, j in zip(vi[top], vj[top]):
            pairs.add((min(int(i), int(j)), max(int(i), int(j))))
        rowmax = V.argmax(axis=1)
        for i in range(N):
            if V[i, rowmax[i]] > 1e-9:
                j = int(rowmax[i])
                pairs.add((min(i, j), max(i, j)))
    raise IterationLimitError("constraint generation did not converge")


def solve_metric_lp(
    ps: PooledSample,
    D: CostMatrix | np.ndarray,
    box: Optional[float] = None,
) -> LpSolution:
    """Solve the Lipschitz-constrained program over a pooled sample.

    With ``box`` omitted: maximize sum w_i a_i subject to
    |a_i - a_j| <= rho_ij; the solution vector holds the N potentials.
    With ``box`` given: the bounded-Lipschitz form with the extra variables
    (b, c), constraints |a_i - a_j| <= b rho_ij, |a_i| <= c, b + c <= box;
    the solution vector is [a_1 .. a_N, b, c].

    The optimum is verified feasible within 1e-7 before returning.
    """
    entries = _cost_entries(D)
    if entries.shape[0] != ps.size:
        raise ValueError("cost matrix size does not match the pooled sample")
    if box is None:
        sol = _wasserstein_lp(ps, entries)
        a = sol.x
        viol = np.abs(a[:, None] - a[None, :]) - entries
    else:
        if box <= 0:
            raise ValueError("box must be positive")
        sol = _dudley_lp(ps, entries, float(box))
        a, bvar, cvar = sol.x[: ps.size], sol.x[ps.size], sol.x[ps.size + 1]
        viol = np.abs(a[:, None] - a[None, :]) - bvar * entries
        if np.abs(a).max(initial=0.0) > cvar + FEAS_TOL or bvar + cvar > box + FEAS_TOL:
            raise IterationLimitError("bounded-Lipschitz box constraints violated")
    np.fill_diagonal(viol, -1.0)
    if viol.max(initial=-1.0) > FEAS_TOL:
        raise IterationLimitError(f"pairwise constraints violated by {viol.max():.2e}")
    return sol
