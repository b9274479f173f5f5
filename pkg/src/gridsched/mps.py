"""Fixed-format MPS export.

Fixed MPS allows eight characters per name, far too few for names like
``Pc/g=12/c=31/t=17/s=3``, so every column and row is written under a
positional alias (``C0000042``, ``R0000007``) and the alias map goes into
a sidecar file of ``<alias> <full-name>`` lines.  Output depends only on
the model, so identical models give identical bytes.
"""
from __future__ import annotations

import math
from pathlib import Path

from .milp import BINARY, EQ, GE, LE, MILPModel

OBJECTIVE_ROW = "COST"
NAME_WIDTH = 8
VALUE_WIDTH = 12

_ROW_TYPE = {LE: "L", GE: "G", EQ: "E"}


def column_alias(col: int) -> str:
    return f"C{col:07d}"


def row_alias(row: int) -> str:
    return f"R{row:07d}"


def format_number(value: float) -> str:
    """Shortest rendering of ``value`` that fits the 12-character value field."""
    if value == int(value) and abs(value) < 1e11:
        text = str(int(value))
        if len(text) <= VALUE_WIDTH:
            return text
    for digits in range(12, 0, -1):
        text = f"{value:.{digits}g}"
        if len(text) <= VALUE_WIDTH:
            return text
    raise ValueError(f"cannot fit {value!r} into an MPS value field")


def _entry(name: str, row: str, value: float) -> str:
    return f"    {name:<{NAME_WIDTH}}  {row:<{NAME_WIDTH}}  {format_number(value):>{VALUE_WIDTH}}"


def _bound(kind: str, col: str, value: float | None = None) -> str:
    line = f" {kind} {'BND':<{NAME_WIDTH}}  {col:<{NAME_WIDTH}}"
    if value is not None:
        line += f"  {format_number(value):>{VALUE_WIDTH}}"
    return line


def _marker(which: str) -> str:
    return f"    {'MARKER':<{NAME_WIDTH}}  {chr(39) + 'MARKER' + chr(39):<{NAME_WIDTH}}" \
           f"{'':>17}{chr(39) + which + chr(39)}"


def write_problem_file(model: MILPModel) -> str:
    """Render a frozen model as fixed-format MPS text."""
    if not model.frozen:
        raise ValueError("only frozen models can be written")
    lines = [f"NAME          {model.name[:NAME_WIDTH * 2]}", "ROWS", f" N  {OBJECTIVE_ROW}"]
    for con in model.constraints:
        lines.append(f" {_ROW_TYPE[con.sense]}  {row_alias(con.id)}")

    by_column: dict[int, list[tuple[str, float]]] = {j: [] for j in range(model.n_vars)}
    objective = model.objective
    for j in range(model.n_vars):
        if j in objective:
            by_column[j].append((OBJECTIVE_ROW, objective[j]))
    for con in model.constraints:
        for j, a in con.terms:
            by_column[j].append((row_alias(con.id), a))

    lines.append("COLUMNS")
    in_int = False
    for var in model.variables:
        if var.kind == BINARY and not in_int:
            lines.append(_marker("INTORG"))
            in_int = True
        elif var.kind != BINARY and in_int:
            lines.append(_marker("INTEND"))
            in_int = False
        entries = by_column[var.id] or [(OBJECTIVE_ROW, 0.0)]
        alias = column_alias(var.id)
        lines.extend(_entry(alias, row, a) for row, a in entries)
    if in_int:
        lines.append(_marker("INTEND"))

    lines.append("RHS")
    if model.objective_constant:
        lines.append(_entry("RHS", OBJECTIVE_ROW, -model.objective_constant))
    for con in model.constraints:
        if con.rhs != 0.0:
            lines.append(_entry("RHS", row_alias(con.id), con.rhs))

    lines.append("BOUNDS")
    for var in model.variables:
        alias = column_alias(var.id)
        lo, hi = var.lower, var.upper
        if lo == hi:
            lines.append(_bound("FX", alias, lo))
        elif math.isinf(lo) and math.isinf(hi):
            lines.append(_bound("FR", alias))
        else:
            lines.append(_bound("LO", alias, lo) if math.isfinite(lo) else _bound("MI", alias))
            if math.isfinite(hi):
                lines.append(_bound("UP", alias, hi))
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def alias_map(model: MILPModel) -> str:
    """Sidecar text mapping every alias back to its full column or row name."""
    lines = [f"{column_alias(v.id)} {v.name}" for v in model.variables]
    lines += [f"{row_alias(c.id)} {c.tag}" for c in model.constraints]
    return "\n".join(lines) + "\n"


def read_alias_map(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line:
            alias, name = line.split(maxsplit=1)
            out[alias] = name
    return out


def export(model: MILPModel, directory: Path, stem: str = "model") -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    mps_path = directory / f"{stem}.mps"
    map_path = directory / f"{stem}.aliases"
    mps_path.write_text(write_problem_file(model))
    map_path.write_text(alias_map(model))
    return mps_path, map_path
