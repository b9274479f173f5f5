import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridsched.milp import (BINARY, CONTINUOUS, EQ, GE, LE, FrozenModelError, MILPModel,
                            ModelError, equation_of, evaluate, lp_relaxation)


def one_row():
    m = MILPModel("tiny")
    x = m.add_variable("x", CONTINUOUS, 0, 10)
    m.add_constraint([(x, 1.0)], GE, 1.0)
    m.set_objective([(x, 1.0)])
    return m.freeze()


def test_first_column_is_zero():
    m = MILPModel()
    assert m.add_variable("u/g=1/t=0", BINARY, 0, 1) == 0


def test_bounds_carry_through():
    m = MILPModel()
    m.add_variable("u/g=1/t=0", BINARY, 0, 1)
    col = m.add_variable("theta/n=2/t=0/s=0", CONTINUOUS, -0.6, 0.6)
    assert col == 1
    var = m.variable(col)
    assert (var.lower, var.upper) == (-0.6, 0.6)
    assert m.column("theta/n=2/t=0/s=0") == col


def test_duplicate_name_rejected():
    m = MILPModel()
    m.add_variable("u/g=1/t=0", BINARY, 0, 1)
    with pytest.raises(ModelError, match="duplicate"):
        m.add_variable("u/g=1/t=0", BINARY, 0, 1)


@pytest.mark.parametrize("kind,lo,hi", [(CONTINUOUS, 2, 1), (BINARY, 0, 2), (BINARY, -1, 1),
                                        (CONTINUOUS, math.nan, 1)])
def test_bad_bounds(kind, lo, hi):
    with pytest.raises(ModelError):
        MILPModel().add_variable("x", kind, lo, hi)


def test_pinned_binary_allowed():
    m = MILPModel()
    col = m.add_variable("z", BINARY, 1, 1)
    assert m.variable(col).is_fixed


def test_constraint_tag_and_lookup():
    m = MILPModel()
    u = m.add_variable("u/g=1/t=0", BINARY, 0, 1)
    p = m.add_variable("P/g=1/t=0/s=0", CONTINUOUS, 0, 100)
    row = m.add_constraint([(u, -20.0), (p, 1.0)], GE, 0, "eq2/g=1/t=0/s=0")
    assert m.row("eq2/g=1/t=0/s=0") == row
    assert equation_of(m.constraint(row).tag) == 2


def test_vacuous_row():
    m = MILPModel()
    row = m.add_constraint([], LE, 0)
    m.freeze()
    assert m.constraint(row).terms == ()
    assert evaluate(m, {}).violations == []


def test_unknown_column_and_bad_coefficient():
    m = MILPModel()
    for i in range(10):
        m.add_variable(f"x{i}")
    with pytest.raises(ModelError, match="unknown column"):
        m.add_constraint([(9999, 1.0)], LE, 0)
    with pytest.raises(ModelError, match="non-finite"):
        m.add_constraint([(0, math.inf)], LE, 0)
    with pytest.raises(ModelError, match="non-finite"):
        m.add_constraint([(0, 1.0)], LE, math.nan)


def test_duplicate_terms_merge_and_zero_drop():
    m = MILPModel()
    x = m.add_variable("x")
    y = m.add_variable("y")
    row = m.add_constraint([(x, 1.0), (x, 2.0), (y, 1e-12)], EQ, 3)
    assert m.constraint(row).terms == ((x, 3.0),)


def test_frozen_rejects_mutation():
    m = one_row()
    with pytest.raises(FrozenModelError):
        m.add_variable("y")
    with pytest.raises(FrozenModelError):
        m.add_constraint([], LE, 0)
    with pytest.raises(FrozenModelError):
        m.set_objective([])


def test_evaluate_examples():
    m = one_row()
    ok = evaluate(m, {0: 1.0})
    assert ok.objective == 1.0 and ok.violations == []
    bad = evaluate(m, {0: 0.5}, tol=1e-6)
    assert bad.violations == [("row0", 0.5)]


def test_evaluate_bounds_and_integrality():
    m = MILPModel()
    m.add_variable("z", BINARY, 0, 1)
    m.add_variable("x", CONTINUOUS, 0, 1)
    m.freeze()
    tags = [t for t, _ in evaluate(m, [0.5, 1.5]).violations]
    assert tags == ["integrality/z", "bound/x"]


def test_evaluate_missing_column():
    with pytest.raises(ModelError, match="misses"):
        evaluate(one_row(), {})


def test_relaxation_keeps_structure():
    m = MILPModel()
    z = m.add_variable("z", BINARY, 0, 1)
    x = m.add_variable("x", CONTINUOUS, 0, 5)
    m.add_constraint([(x, 1), (z, -5)], LE, 0, "link")
    m.freeze()
    r = lp_relaxation(m)
    assert r.binaries() == [] and m.binaries() == [z]
    assert r.n_rows == m.n_rows and r.n_vars == m.n_vars
    assert [(v.lower, v.upper) for v in r.variables] == [(v.lower, v.upper) for v in m.variables]

    plain = one_row()
    same = lp_relaxation(plain)
    assert same.variables == plain.variables and same.constraints == plain.constraints


def test_with_bounds_leaves_original():
    m = one_row()
    other = m.with_bounds({0: (2, 2)})
    assert m.variable(0).lower == 0 and other.variable(0).lower == 2
    with pytest.raises(ModelError):
        m.with_bounds({0: (3, 2)})


@st.composite
def sparse_models(draw):
    n = draw(st.integers(1, 6))
    rows = draw(st.integers(0, 6))
    m = MILPModel()
    for j in range(n):
        m.add_variable(f"x{j}", CONTINUOUS, -10, 10)
    coef = st.floats(-50, 50, allow_nan=False).filter(lambda a: abs(a) > 1e-6)
    for _ in range(rows):
        terms = draw(st.lists(st.tuples(st.integers(0, n - 1), coef), max_size=n))
        m.add_constraint(terms, draw(st.sampled_from([LE, EQ, GE])), draw(st.floats(-20, 20)))
    x = draw(st.lists(st.floats(-10, 10), min_size=n, max_size=n))
    return m.freeze(), np.array(x)


@settings(max_examples=60, deadline=None)
@given(sparse_models())
def test_sparse_arrays_agree_with_row_activity(case):
    m, x = case
    A, senses, rhs, *_ = m.arrays()
    act = A @ x
    for con in m.constraints:
        assert act[con.id] == pytest.approx(con.activity(x), abs=1e-9)
        assert con.residual(con.activity(x)) >= 0
    flagged = {tag for tag, _ in evaluate(m, x).violations}
    for con in m.constraints:
        assert (con.tag in flagged) == (con.residual(con.activity(x)) > 1e-6)
