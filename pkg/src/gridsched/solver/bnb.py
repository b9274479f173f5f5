"""Best-first branch-and-bound over binary columns, and its brute-force twin."""
from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..milp import MILPModel
from .simplex import INFEASIBLE, OPTIMAL, STUCK, UNBOUNDED, LPResult, problem_of, simplex

log = logging.getLogger(__name__)

FEASIBLE_GAP = "feasible_gap"
TIMEOUT_NO_SOLUTION = "timeout_no_solution"

INTEGRALITY_TOL = 1e-6
GAP_EPS = 1e-10


class SolverError(RuntimeError):
    pass


class TooManyBinaries(ValueError):
    pass


@dataclass
class MIPResult:
    status: str
    objective: float = math.inf
    bound: float = -math.inf
    gap: float = math.inf
    x: np.ndarray | None = None
    nodes_explored: int = 0
    walltime: float = 0.0
    bound_trace: list[float] = field(default_factory=list, repr=False)

    @property
    def assignment(self) -> dict[int, float]:
        return {} if self.x is None else {j: float(v) for j, v in enumerate(self.x)}

    @property
    def has_solution(self) -> bool:
        return self.x is not None


def relative_gap(objective: float, bound: float) -> float:
    if not math.isfinite(objective):
        return math.inf
    return max(0.0, (objective - bound) / max(abs(objective), GAP_EPS))


def _lp(problem, lower, upper, basis) -> LPResult:
    res = simplex(problem, lower, upper, basis)
    if res.status == STUCK and basis is not None:
        res = simplex(problem, lower, upper, None)
    if res.status == STUCK:
        raise SolverError("LP relaxation stalled numerically")
    return res


@dataclass(order=True)
class _Node:
    bound: float
    order: int
    fixes: tuple = field(compare=False)
    basis: object = field(compare=False, default=None)


def solve_mip(model: MILPModel, gap_target: float = 0.0, node_limit: int | None = None,
              time_limit: float | None = None,
              on_node: Callable[[LPResult], None] | None = None) -> MIPResult:
    """Minimize ``model`` by LP-based branch-and-bound.

    Stops once the relative gap is at most ``gap_target`` or a limit is hit;
    with ``gap_target=0`` and no limits the result is optimal.  ``on_node``
    receives every node LP result.
    """
    start = time.monotonic()
    problem = problem_of(model)
    *_, lower0, upper0 = model.arrays()
    binaries = np.array(model.free_binaries(), dtype=int)
    const = model.objective_constant

    incumbent = math.inf
    best_x = None
    heap: list[_Node] = [_Node(-math.inf, 0, ())]
    counter = itertools.count(1)
    nodes = 0
    trace: list[float] = []
    hit_limit = False

    def prune_tol():
        return 1e-9 * max(1.0, abs(incumbent))

    while heap:
        global_bound = min(heap[0].bound, incumbent)
        if math.isfinite(incumbent) and relative_gap(incumbent, global_bound) <= gap_target \
                and global_bound > -math.inf:
            break
        if node_limit is not None and nodes >= node_limit:
            hit_limit = True
            break
        if time_limit is not None and time.monotonic() - start > time_limit:
            hit_limit = True
            break

        node = heapq.heappop(heap)
        if node.bound >= incumbent - prune_tol():
            continue
        trace.append(min(node.bound, incumbent))
        lower, upper = lower0.copy(), upper0.copy()
        for col, val in node.fixes:
            lower[col] = upper[col] = val
        res = _lp(problem, lower, upper, node.basis)
        nodes += 1
        if res.status == OPTIMAL:
            res.objective += const
            res.dual_objective += const
        if on_node is not None:
            on_node(res)
        if res.status == INFEASIBLE:
            continue
        if res.status == UNBOUNDED:
            raise SolverError("LP relaxation is unbounded")
        if res.objective >= incumbent - prune_tol():
            continue

        vals = res.x[binaries]
        frac = np.abs(vals - np.round(vals))
        fractional = np.flatnonzero(frac > INTEGRALITY_TOL)
        if fractional.size == 0:
            # re-solve with binaries pinned to clean up near-integral values
            lower[binaries] = upper[binaries] = np.round(vals)
            polished = _lp(problem, lower, upper, res.basis)
            if polished.status == OPTIMAL:
                obj = polished.objective + const
                if obj < incumbent:
                    incumbent, best_x = obj, polished.x
                    log.debug("incumbent %.6f after %d nodes", incumbent, nodes)
            continue

        # most fractional; argmin keeps the lowest column index on ties
        pick = fractional[np.argmin(np.abs(vals[fractional] - 0.5))]
        col = int(binaries[pick])
        up_first = vals[pick] >= 0.5
        for val in ((1.0, 0.0) if up_first else (0.0, 1.0)):
            heapq.heappush(heap, _Node(res.objective, -next(counter),
                                       node.fixes + ((col, val),), res.basis))

    walltime = time.monotonic() - start
    if heap:
        bound = min(heap[0].bound, incumbent)
    else:
        bound = incumbent if best_x is not None else math.inf
    if best_x is None:
        if hit_limit:
            return MIPResult(TIMEOUT_NO_SOLUTION, bound=bound, nodes_explored=nodes,
                             walltime=walltime, bound_trace=trace)
        return MIPResult(INFEASIBLE, nodes_explored=nodes, walltime=walltime,
                         bound_trace=trace)
    gap = relative_gap(incumbent, bound)
    status = OPTIMAL if gap <= gap_target or not heap else FEASIBLE_GAP
    return MIPResult(status, incumbent, bound, gap, best_x, nodes, walltime, trace)


def brute_force_mip(model: MILPModel, max_binaries: int = 20) -> MIPResult:
    """Enumerate every 0/1 assignment of the free binaries and keep the best LP.

    Independent of :func:`solve_mip`: no bounding, no branching order, only
    the LP solver is shared.
    """
    start = time.monotonic()
    binaries = model.free_binaries()
    if len(binaries) > max_binaries:
        raise TooManyBinaries(f"{len(binaries)} free binaries exceed the limit of {max_binaries}")
    problem = problem_of(model)
    *_, lower0, upper0 = model.arrays()
    best, best_x = math.inf, None
    basis = None
    count = 0
    for bits in itertools.product((0.0, 1.0), repeat=len(binaries)):
        lower, upper = lower0.copy(), upper0.copy()
        lower[binaries] = upper[binaries] = bits
        res = _lp(problem, lower, upper, basis)
        count += 1
        if res.status == UNBOUNDED:
            raise SolverError("pinned LP is unbounded")
        if res.status != OPTIMAL:
            continue
        basis = res.basis
        obj = res.objective + model.objective_constant
        if obj < best:
            best, best_x = obj, res.x
    walltime = time.monotonic() - start
    if best_x is None:
        return MIPResult(INFEASIBLE, nodes_explored=count, walltime=walltime)
    return MIPResult(OPTIMAL, best, best, 0.0, best_x, count, walltime)
