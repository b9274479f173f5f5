"""Sparse mixed-integer linear model: construction, evaluation, relaxation.

Every decision variable and row of the scheduling models lands in a
:class:`MILPModel`.  Rows carry a structured tag (``"eq25/n=4/t=7/s=2"``)
that names the equation family and index tuple; columns carry their own
bounds, and a column whose bounds realize an equation (a flow limit, a
state-of-charge window) records that equation in ``Variable.origin``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

CONTINUOUS = "continuous"
BINARY = "binary"
KINDS = (CONTINUOUS, BINARY)

LE = "<="
EQ = "="
GE = ">="
SENSES = (LE, EQ, GE)

ZERO_DROP = 1e-9
FEAS_TOL = 1e-6


class ModelError(ValueError):
    """Raised on an invalid model mutation or lookup."""


class FrozenModelError(ModelError):
    pass


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    kind: str
    lower: float
    upper: float
    origin: str | None = None

    @property
    def is_binary(self) -> bool:
        return self.kind == BINARY

    @property
    def is_fixed(self) -> bool:
        return self.lower == self.upper


@dataclass(frozen=True)
class LinearConstraint:
    id: int
    terms: tuple[tuple[int, float], ...]
    sense: str
    rhs: float
    tag: str

    def activity(self, x: np.ndarray) -> float:
        return math.fsum(a * x[j] for j, a in self.terms)

    def residual(self, activity: float) -> float:
        """Amount by which ``activity`` violates the row (0 when satisfied)."""
        if self.sense == LE:
            return max(0.0, activity - self.rhs)
        if self.sense == GE:
            return max(0.0, self.rhs - activity)
        return abs(activity - self.rhs)


def equation_of(tag: str) -> int | None:
    """Equation number encoded in a tag such as ``"eq21/k=3/t=0/s=1"``."""
    head = tag.split("/", 1)[0]
    if head.startswith("eq") and head[2:].isdigit():
        return int(head[2:])
    return None


class MILPModel:
    """Minimization MILP with named columns and tagged rows.

    The model is mutable until :meth:`freeze`; afterwards every mutation
    raises :class:`FrozenModelError` and the cached sparse arrays from
    :meth:`arrays` are safe to share between readers.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self._variables: list[Variable] = []
        self._constraints: list[LinearConstraint] = []
        self._objective: dict[int, float] = {}
        self.objective_constant = 0.0
        self._by_name: dict[str, int] = {}
        self._by_tag: dict[str, int] = {}
        self._frozen = False
        self._matrix = None

    # construction -------------------------------------------------------

    def _check_mutable(self):
        if self._frozen:
            raise FrozenModelError(f"model {self.name!r} is frozen")

    def add_variable(self, name: str, kind: str = CONTINUOUS, lower: float = 0.0,
                     upper: float = math.inf, origin: str | None = None) -> int:
        self._check_mutable()
        if kind not in KINDS:
            raise ModelError(f"unknown variable kind {kind!r}")
        if name in self._by_name:
            raise ModelError(f"duplicate variable name {name!r}")
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ModelError(f"inverted bounds for {name!r}: [{lower}, {upper}]")
        if kind == BINARY and not (lower in (0.0, 1.0) and upper in (0.0, 1.0)):
            raise ModelError(f"binary {name!r} needs bounds within {{0, 1}}")
        col = len(self._variables)
        self._variables.append(Variable(col, name, kind, lower, upper, origin))
        self._by_name[name] = col
        return col

    def add_constraint(self, terms: Iterable[tuple[int, float]], sense: str, rhs: float,
                       tag: str | None = None) -> int:
        self._check_mutable()
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ModelError(f"non-finite rhs in {tag!r}")
        merged: dict[int, float] = {}
        n = len(self._variables)
        for col, coef in terms:
            coef = float(coef)
            if not (0 <= col < n):
                raise ModelError(f"unknown column {col} in {tag!r}")
            if not math.isfinite(coef):
                raise ModelError(f"non-finite coefficient on column {col} in {tag!r}")
            merged[col] = merged.get(col, 0.0) + coef
        row = len(self._constraints)
        tag = tag if tag is not None else f"row{row}"
        if tag in self._by_tag:
            raise ModelError(f"duplicate constraint tag {tag!r}")
        clean = tuple((j, a) for j, a in merged.items() if abs(a) > ZERO_DROP)
        self._constraints.append(LinearConstraint(row, clean, sense, rhs, tag))
        self._by_tag[tag] = row
        return row

    def set_objective(self, terms: Iterable[tuple[int, float]], constant: float = 0.0):
        self._check_mutable()
        obj: dict[int, float] = {}
        for col, coef in terms:
            if not (0 <= col < len(self._variables)):
                raise ModelError(f"unknown objective column {col}")
            obj[col] = obj.get(col, 0.0) + float(coef)
        self._objective = {j: a for j, a in obj.items() if abs(a) > ZERO_DROP}
        self.objective_constant = float(constant)

    def freeze(self) -> "MILPModel":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # access -------------------------------------------------------------

    @property
    def variables(self) -> Sequence[Variable]:
        return tuple(self._variables)

    @property
    def constraints(self) -> Sequence[LinearConstraint]:
        return tuple(self._constraints)

    @property
    def objective(self) -> dict[int, float]:
        return dict(self._objective)

    @property
    def n_vars(self) -> int:
        return len(self._variables)

    @property
    def n_rows(self) -> int:
        return len(self._constraints)

    def column(self, name: str) -> int:
        try:
            return self._by_name[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def has_column(self, name: str) -> bool:
        return name in self._by_name

    def variable(self, col: int) -> Variable:
        return self._variables[col]

    def row(self, tag: str) -> int:
        try:
            return self._by_tag[tag]
        except KeyError:
            raise ModelError(f"unknown constraint tag {tag!r}") from None

    def constraint(self, row: int) -> LinearConstraint:
        return self._constraints[row]

    def binaries(self) -> list[int]:
        return [v.id for v in self._variables if v.kind == BINARY]

    def free_binaries(self) -> list[int]:
        return [v.id for v in self._variables if v.kind == BINARY and v.lower < v.upper]

    def arrays(self):
        """Return ``(A, senses, rhs, c, lower, upper)`` with ``A`` in CSC form.

        The row data is cached once the model is frozen and shared with
        re-bounded copies.
        """
        if self._matrix is None or not self._frozen:
            rows, cols, vals = [], [], []
            for con in self._constraints:
                for j, a in con.terms:
                    rows.append(con.id)
                    cols.append(j)
                    vals.append(a)
            A = sp.csc_matrix((vals, (rows, cols)), shape=(self.n_rows, self.n_vars))
            senses = np.array([con.sense for con in self._constraints], dtype=object)
            rhs = np.array([con.rhs for con in self._constraints], dtype=float)
            c = np.zeros(self.n_vars)
            for j, a in self._objective.items():
                c[j] = a
            matrix = (A, senses, rhs, c)
            if not self._frozen:
                return matrix + self._bounds()
            self._matrix = matrix
        return self._matrix + self._bounds()

    def _bounds(self):
        lower = np.array([v.lower for v in self._variables], dtype=float)
        upper = np.array([v.upper for v in self._variables], dtype=float)
        return lower, upper

    # derived models -----------------------------------------------------

    def _copy(self, name: str | None = None) -> "MILPModel":
        if self._frozen:
            self.arrays()
        other = MILPModel(name or self.name)
        other._variables = list(self._variables)
        other._constraints = self._constraints  # rows are immutable, share them
        other._objective = dict(self._objective)
        other.objective_constant = self.objective_constant
        other._matrix = self._matrix if self._frozen else None
        other._by_name = self._by_name if self._frozen else dict(self._by_name)
        other._by_tag = self._by_tag if self._frozen else dict(self._by_tag)
        return other

    def with_bounds(self, changes: Mapping[int, tuple[float, float]]) -> "MILPModel":
        """Frozen copy with the given columns re-bounded; ``self`` is untouched."""
        other = self._copy()
        for col, (lo, hi) in changes.items():
            var = other._variables[col]
            lo, hi = float(lo), float(hi)
            if lo > hi:
                raise ModelError(f"inverted bounds for {var.name!r}: [{lo}, {hi}]")
            other._variables[col] = replace(var, lower=lo, upper=hi)
        return other.freeze()

    def objective_value(self, x) -> float:
        return self.objective_constant + math.fsum(a * x[j] for j, a in self._objective.items())

    def __repr__(self):
        nb = sum(1 for v in self._variables if v.kind == BINARY)
        state = "frozen" if self._frozen else "open"
        return (f"MILPModel({self.name!r}, vars={self.n_vars}, binaries={nb}, "
                f"rows={self.n_rows}, {state})")


@dataclass
class Evaluation:
    objective: float
    violations: list[tuple[str, float]]

    @property
    def feasible(self) -> bool:
        return not self.violations


def as_vector(model: MILPModel, assignment) -> np.ndarray:
    """Dense column vector from a ``column -> value`` mapping or a sequence."""
    if isinstance(assignment, Mapping):
        x = np.empty(model.n_vars)
        missing = [j for j in range(model.n_vars) if j not in assignment]
        if missing:
            names = ", ".join(model.variable(j).name for j in missing[:5])
            raise ModelError(f"assignment misses {len(missing)} column(s): {names}")
        for j in range(model.n_vars):
            x[j] = assignment[j]
        return x
    x = np.asarray(assignment, dtype=float)
    if x.shape != (model.n_vars,):
        raise ModelError(f"assignment has shape {x.shape}, expected ({model.n_vars},)")
    return x


def evaluate(model: MILPModel, assignment, tol: float = FEAS_TOL) -> Evaluation:
    """Objective value and every violated row, bound and integrality condition."""
    x = as_vector(model, assignment)
    violations: list[tuple[str, float]] = []
    for con in model.constraints:
        res = con.residual(con.activity(x))
        if res > tol:
            violations.append((con.tag, res))
    for var in model.variables:
        val = x[var.id]
        if val < var.lower - tol:
            violations.append((f"bound/{var.name}", var.lower - val))
        elif val > var.upper + tol:
            violations.append((f"bound/{var.name}", val - var.upper))
        if var.kind == BINARY:
            dist = min(abs(val), abs(val - 1.0))
            if dist > tol:
                violations.append((f"integrality/{var.name}", dist))
    return Evaluation(model.objective_value(x), violations)


def lp_relaxation(model: MILPModel) -> MILPModel:
    """Copy of ``model`` with every binary turned continuous on its bounds."""
    other = model._copy(name=f"{model.name}-lp")
    other._variables = [replace(v, kind=CONTINUOUS) if v.kind == BINARY else v
                        for v in other._variables]
    return other.freeze()
