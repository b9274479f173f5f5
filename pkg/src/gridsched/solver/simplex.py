"""Revised primal simplex with explicit variable bounds.

Each row ``a_i x (sense) b_i`` gets a logical column ``s_i = a_i x`` whose
bounds encode the sense, so the working system is ``[A, -I] (x, s) = 0``
with every column boxed.  Nonbasic columns sit at a finite bound (or at
zero when free).  Phase 1 minimizes the total bound infeasibility of the
basic columns from whatever basis it starts in, which is what lets
branch-and-bound warm start a child node from its parent's basis.

Pricing is Dantzig's largest reduced cost; after a run of degenerate
pivots the solver switches to Bland's smallest-index rule until it makes
progress again.  The basis is held as a sparse LU factorization plus a
product-form eta file, refactorized periodically.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..milp import EQ, GE, LE, MILPModel

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
STUCK = "numerically_stuck"

PRIMAL_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 60
DEGENERATE_RUN = 50

AT_LOWER, AT_UPPER, AT_ZERO, BASIC = 0, 1, 2, 3


@dataclass
class Basis:
    """Basic column indices (augmented numbering) and nonbasic-at-upper flags."""
    head: np.ndarray
    at_upper: np.ndarray


@dataclass
class LPResult:
    status: str
    objective: float = math.nan
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    dual_objective: float = math.nan
    iterations: int = 0
    basis: Basis | None = field(default=None, repr=False)

    @property
    def primal(self) -> dict[int, float]:
        return {} if self.x is None else {j: float(v) for j, v in enumerate(self.x)}

    @property
    def dual(self) -> dict[int, float]:
        return {} if self.y is None else {i: float(v) for i, v in enumerate(self.y)}

    @property
    def duality_gap(self) -> float:
        return abs(self.objective - self.dual_objective)


class _Factor:
    """LU of the basis matrix with product-form updates."""

    def __init__(self, B: sp.csc_matrix):
        self.lu = splu(B, permc_spec="COLAMD")
        self.etas: list[tuple[int, np.ndarray]] = []

    def ftran(self, v: np.ndarray) -> np.ndarray:
        w = self.lu.solve(v)
        for r, alpha in self.etas:
            wr = w[r] / alpha[r]
            w -= alpha * wr
            w[r] = wr
        return w

    def btran(self, v: np.ndarray) -> np.ndarray:
        w = v.astype(float, copy=True)
        for r, alpha in reversed(self.etas):
            wr = w[r]
            w[r] = (wr - (w @ alpha - wr * alpha[r])) / alpha[r]
        return self.lu.solve(w, trans="T")

    def update(self, r: int, alpha: np.ndarray):
        self.etas.append((r, alpha.copy()))


class _Problem:
    """Augmented column data shared by every solve on one constraint matrix."""

    def __init__(self, A: sp.csc_matrix, senses, rhs, c):
        self.A = A.tocsc()
        self.AT = self.A.T.tocsr()
        self.m, self.n = self.A.shape
        self.c = np.asarray(c, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        slo = np.full(self.m, -np.inf)
        shi = np.full(self.m, np.inf)
        for i, sense in enumerate(senses):
            if sense == LE:
                shi[i] = rhs[i]
            elif sense == GE:
                slo[i] = rhs[i]
            elif sense == EQ:
                slo[i] = shi[i] = rhs[i]
            else:
                raise ValueError(f"unknown sense {sense!r}")
        self.slack_lower, self.slack_upper = slo, shi

    def column(self, j: int) -> np.ndarray:
        v = np.zeros(self.m)
        if j < self.n:
            lo, hi = self.A.indptr[j], self.A.indptr[j + 1]
            v[self.A.indices[lo:hi]] = self.A.data[lo:hi]
        else:
            v[j - self.n] = -1.0
        return v

    def basis_matrix(self, head: np.ndarray) -> sp.csc_matrix:
        indptr = [0]
        indices, data = [], []
        A = self.A
        for j in head:
            if j < self.n:
                lo, hi = A.indptr[j], A.indptr[j + 1]
                indices.append(A.indices[lo:hi])
                data.append(A.data[lo:hi])
                indptr.append(indptr[-1] + hi - lo)
            else:
                indices.append(np.array([j - self.n]))
                data.append(np.array([-1.0]))
                indptr.append(indptr[-1] + 1)
        return sp.csc_matrix((np.concatenate(data), np.concatenate(indices), indptr),
                             shape=(self.m, self.m))

    def times(self, x: np.ndarray) -> np.ndarray:
        """``[A, -I] @ x`` for an augmented vector."""
        return self.A @ x[:self.n] - x[self.n:]


def _resting_value(lo: float, hi: float, at_upper: bool) -> tuple[float, int]:
    if at_upper and math.isfinite(hi):
        return hi, AT_UPPER
    if math.isfinite(lo):
        return lo, AT_LOWER
    if math.isfinite(hi):
        return hi, AT_UPPER
    return 0.0, AT_ZERO


def simplex(problem: _Problem, lower, upper, basis: Basis | None = None,
            max_iter: int | None = None) -> LPResult:
    """Solve ``min c x`` over the problem rows with column bounds ``lower/upper``."""
    n, m = problem.n, problem.m
    lo = np.concatenate([np.asarray(lower, dtype=float), problem.slack_lower])
    hi = np.concatenate([np.asarray(upper, dtype=float), problem.slack_upper])
    if np.any(lo > hi):
        return LPResult(INFEASIBLE)
    cost = np.concatenate([problem.c, np.zeros(m)])
    if max_iter is None:
        max_iter = 50 * (n + m) + 1000

    if m == 0:
        return _solve_rowless(problem, lo, hi, cost)

    head = np.arange(n, n + m) if basis is None else basis.head.copy()
    flags = np.zeros(n + m, dtype=bool) if basis is None else basis.at_upper
    status = np.empty(n + m, dtype=np.int8)
    x = np.zeros(n + m)
    pos = np.full(n + m, -1)
    pos[head] = np.arange(m)
    for j in np.flatnonzero(pos < 0):
        x[j], status[j] = _resting_value(lo[j], hi[j], bool(flags[j]))
    status[head] = BASIC

    try:
        factor = _Factor(problem.basis_matrix(head))
    except RuntimeError:
        if basis is None:
            raise
        log.debug("warm-start basis singular; falling back to the slack basis")
        return simplex(problem, lower, upper, None, max_iter)

    def recompute_basics():
        xn = x.copy()
        xn[head] = 0.0
        x[head] = factor.ftran(-problem.times(xn))

    recompute_basics()
    since_refactor = 0
    degenerate = 0
    bland = False
    verified = 0

    for it in range(max_iter):
        if since_refactor >= REFACTOR_EVERY:
            try:
                factor = _Factor(problem.basis_matrix(head))
            except RuntimeError:
                return LPResult(STUCK, iterations=it)
            recompute_basics()
            since_refactor = 0

        xb = x[head]
        lob, hib = lo[head], hi[head]
        below = xb < lob - PRIMAL_TOL
        above = xb > hib + PRIMAL_TOL
        phase1 = bool(below.any() or above.any())
        if phase1:
            cb = above.astype(float) - below.astype(float)
            y = factor.btran(cb)
            d = np.concatenate([-(problem.AT @ y), y])
        else:
            y = factor.btran(cost[head])
            d = np.concatenate([problem.c - problem.AT @ y, y])

        movable = (status != BASIC) & (hi > lo)
        can_up = movable & (status != AT_UPPER) & (d < -DUAL_TOL)
        can_down = movable & (status != AT_LOWER) & (d > DUAL_TOL)
        score = np.where(can_up, -d, 0.0) + np.where(can_down, d, 0.0)
        candidates = np.flatnonzero(score > 0)

        if candidates.size == 0:
            # confirm on a fresh factorization before declaring either outcome
            if since_refactor > 0 and verified < 3:
                verified += 1
                try:
                    factor = _Factor(problem.basis_matrix(head))
                except RuntimeError:
                    return LPResult(STUCK, iterations=it)
                recompute_basics()
                since_refactor = 0
                continue
            if phase1:
                return LPResult(INFEASIBLE, iterations=it)
            return _finish(problem, x, y, d, lo, hi, head, status, it)

        q = int(candidates[0]) if bland else int(candidates[np.argmax(score[candidates])])
        direction = 1.0 if d[q] < 0 else -1.0
        alpha = factor.ftran(problem.column(q))
        rate = -direction * alpha

        # target each basic column may travel to; phase 1 relaxes the violated side
        down_target = np.where(above, hib, np.where(below, -np.inf, lob))
        up_target = np.where(below, lob, np.where(above, np.inf, hib))
        dec = rate < -PIVOT_TOL
        inc = rate > PIVOT_TOL
        with np.errstate(divide="ignore", invalid="ignore"):
            relaxed = np.full(m, np.inf)
            relaxed[dec] = (xb[dec] - down_target[dec] + PRIMAL_TOL) / -rate[dec]
            relaxed[inc] = (up_target[inc] - xb[inc] + PRIMAL_TOL) / rate[inc]
        theta_max = relaxed.min() if m else np.inf
        span = hi[q] - lo[q]

        if not math.isfinite(theta_max) and not math.isfinite(span):
            if phase1:
                return LPResult(STUCK, iterations=it)
            return LPResult(UNBOUNDED, iterations=it)

        leave = -1
        if math.isfinite(theta_max) and not (math.isfinite(span) and span <= theta_max):
            ties = np.flatnonzero(relaxed <= theta_max)
            if bland:
                leave = int(ties[np.argmin(head[ties])])
            else:
                leave = int(ties[np.argmax(np.abs(rate[ties]))])
            if rate[leave] < 0:
                theta = (xb[leave] - down_target[leave]) / -rate[leave]
            else:
                theta = (up_target[leave] - xb[leave]) / rate[leave]
            theta = max(theta, 0.0)
        else:
            theta = span

        x[q] += direction * theta
        x[head] += rate * theta

        if leave < 0:
            # bound flip of the entering column
            if direction > 0:
                x[q], status[q] = hi[q], AT_UPPER
            else:
                x[q], status[q] = lo[q], AT_LOWER
        else:
            if abs(alpha[leave]) < PIVOT_TOL:
                return LPResult(STUCK, iterations=it)
            out = int(head[leave])
            if rate[leave] < 0:
                x[out] = down_target[leave]
                status[out] = AT_LOWER if x[out] == lo[out] else AT_UPPER
            else:
                x[out] = up_target[leave]
                status[out] = AT_UPPER if x[out] == hi[out] else AT_LOWER
            head[leave] = q
            pos[out] = -1
            pos[q] = leave
            status[q] = BASIC
            factor.update(leave, alpha)
            since_refactor += 1

        if theta <= 1e-12:
            degenerate += 1
            if degenerate >= DEGENERATE_RUN:
                bland = True
        else:
            degenerate = 0
            bland = False

    log.warning("simplex hit the iteration limit (%d)", max_iter)
    return LPResult(STUCK, iterations=max_iter)


def _dual_objective(d, x, lo, hi) -> float:
    total = 0.0
    for dj, xj, l, u in zip(d, x, lo, hi):
        if abs(dj) <= DUAL_TOL:
            total += dj * xj
        elif dj > 0:
            total += dj * l if math.isfinite(l) else -math.inf
        else:
            total += dj * u if math.isfinite(u) else -math.inf
    return total


def _finish(problem, x, y, d, lo, hi, head, status, iterations) -> LPResult:
    n = problem.n
    xs = x[:n].copy()
    # snap nonbasic columns exactly onto their bounds
    obj = float(problem.c @ xs)
    basis = Basis(head.copy(), status == AT_UPPER)
    return LPResult(OPTIMAL, obj, xs, y.copy(), _dual_objective(d, x, lo, hi),
                    iterations, basis)


def _solve_rowless(problem, lo, hi, cost) -> LPResult:
    x = np.zeros(problem.n)
    for j in range(problem.n):
        cj = cost[j]
        if cj > 0:
            x[j] = lo[j]
        elif cj < 0:
            x[j] = hi[j]
        else:
            x[j], _ = _resting_value(lo[j], hi[j], False)
        if not math.isfinite(x[j]):
            return LPResult(UNBOUNDED)
    obj = float(problem.c @ x)
    return LPResult(OPTIMAL, obj, x, np.zeros(0), obj, 0,
                    Basis(np.zeros(0, dtype=int), np.zeros(problem.n, dtype=bool)))


def problem_of(model: MILPModel) -> _Problem:
    A, senses, rhs, c, _, _ = model.arrays()
    return _Problem(A, senses, rhs, c)


def solve_lp(model: MILPModel, basis: Basis | None = None) -> LPResult:
    """Solve the LP over ``model`` with binaries relaxed to their bounds."""
    A, senses, rhs, c, lower, upper = model.arrays()
    result = simplex(_Problem(A, senses, rhs, c), lower, upper, basis)
    if result.status == OPTIMAL:
        result.objective += model.objective_constant
        result.dual_objective += model.objective_constant
    return result
