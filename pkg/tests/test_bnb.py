import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridsched.milp import BINARY, CONTINUOUS, EQ, GE, LE, MILPModel, evaluate
from gridsched.solver import (FEASIBLE_GAP, INFEASIBLE, OPTIMAL, TIMEOUT_NO_SOLUTION,
                              TooManyBinaries, brute_force_mip, relative_gap, solve_lp, solve_mip)

VALUES = [10, 13, 18, 31, 7, 15, 21, 14]
WEIGHTS = [11, 15, 20, 35, 10, 33, 24, 12]
CAPACITY = 60


def knapsack():
    m = MILPModel("knap")
    cols = [m.add_variable(f"z{i}", BINARY, 0, 1) for i in range(len(VALUES))]
    m.add_constraint(list(zip(cols, WEIGHTS)), LE, CAPACITY, "cap")
    m.set_objective([(c, -v) for c, v in zip(cols, VALUES)])
    return m.freeze()


def enumerate_knapsack():
    best = 0
    for bits in itertools.product((0, 1), repeat=len(VALUES)):
        if np.dot(bits, WEIGHTS) <= CAPACITY:
            best = max(best, int(np.dot(bits, VALUES)))
    return -best


def test_knapsack_golden():
    assert enumerate_knapsack() == -55
    res = solve_mip(knapsack())
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(-55)
    assert res.gap == 0.0
    assert brute_force_mip(knapsack()).objective == pytest.approx(-55)
    assert evaluate(knapsack(), res.x).violations == []


def test_bound_trace_is_monotone():
    res = solve_mip(knapsack())
    assert res.bound_trace
    assert all(b >= a - 1e-9 for a, b in zip(res.bound_trace, res.bound_trace[1:]))
    assert res.bound == pytest.approx(res.objective)


def test_node_lps_satisfy_strong_duality():
    seen = []
    solve_mip(knapsack(), on_node=seen.append)
    optimal = [r for r in seen if r.status == OPTIMAL]
    assert optimal
    assert all(r.duality_gap <= 1e-6 * max(1.0, abs(r.objective)) for r in optimal)


def test_pinned_binaries_equal_lp():
    m = knapsack()
    pinned = m.with_bounds({j: (1, 1) if j in (0, 3) else (0, 0) for j in m.binaries()})
    mip, lp = solve_mip(pinned), solve_lp(pinned)
    assert mip.nodes_explored == 1
    assert mip.objective == pytest.approx(lp.objective) == pytest.approx(-41)


def test_zero_binaries_brute_force_is_lp():
    m = MILPModel()
    x = m.add_variable("x", CONTINUOUS, 0, 10)
    m.add_constraint([(x, 1)], GE, 3)
    m.set_objective([(x, 2)])
    m.freeze()
    assert brute_force_mip(m).objective == pytest.approx(solve_lp(m).objective) == 6


def test_single_feasible_assignment():
    m = MILPModel()
    a = m.add_variable("a", BINARY, 0, 1)
    b = m.add_variable("b", BINARY, 0, 1)
    m.add_constraint([(a, 1), (b, -1)], GE, 1)  # only a=1, b=0
    m.set_objective([(a, 1), (b, 1)])
    m.freeze()
    res = brute_force_mip(m)
    assert res.status == OPTIMAL and list(res.x) == [1, 0]
    assert res.gap == 0


def test_infeasible_mip():
    m = MILPModel()
    a = m.add_variable("a", BINARY, 0, 1)
    m.add_constraint([(a, 2)], EQ, 1)
    m.freeze()
    assert solve_mip(m).status == INFEASIBLE
    assert brute_force_mip(m).status == INFEASIBLE


def test_too_many_binaries():
    with pytest.raises(TooManyBinaries):
        brute_force_mip(knapsack(), max_binaries=4)


def test_node_limit_without_incumbent():
    res = solve_mip(knapsack(), node_limit=1)
    assert res.status in (TIMEOUT_NO_SOLUTION, FEASIBLE_GAP)
    if res.status == TIMEOUT_NO_SOLUTION:
        assert not res.has_solution
    else:
        assert res.gap > 0


def test_gap_target_stops_early():
    res = solve_mip(knapsack(), gap_target=0.5)
    assert res.has_solution
    assert res.gap <= 0.5
    assert res.bound <= -55 + 1e-9 <= res.objective + 1e-9


def test_relative_gap():
    assert relative_gap(100.0, 99.0) == pytest.approx(0.01)
    assert relative_gap(0.0, 0.0) == 0.0
    assert relative_gap(math.inf, 0.0) == math.inf


@st.composite
def small_mips(draw):
    nb = draw(st.integers(1, 5))
    nc = draw(st.integers(0, 2))
    m = MILPModel()
    cols = [m.add_variable(f"b{i}", BINARY, 0, 1) for i in range(nb)]
    cols += [m.add_variable(f"x{i}", CONTINUOUS, 0, draw(st.integers(1, 8))) for i in range(nc)]
    ints = st.integers(-5, 5)
    for r in range(draw(st.integers(1, 4))):
        terms = [(c, draw(ints)) for c in cols]
        m.add_constraint(terms, draw(st.sampled_from([LE, GE])), draw(st.integers(-6, 6)))
    m.set_objective([(c, draw(ints)) for c in cols])
    return m.freeze()


@settings(max_examples=120, deadline=None)
@given(small_mips())
def test_branch_and_bound_matches_enumeration(m):
    bb, bf = solve_mip(m), brute_force_mip(m)
    assert bb.status == bf.status
    if bf.status == OPTIMAL:
        assert bb.objective == pytest.approx(bf.objective, abs=1e-6)
        assert evaluate(m, bb.x).violations == []
        assert evaluate(m, bf.x).violations == []
