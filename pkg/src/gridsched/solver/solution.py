"""Plain-text solution files: ``<name-or-alias> <value>`` per line.

This is the only way solutions computed outside the package come back in;
vendor-specific output has to be converted to this form first.
"""
from __future__ import annotations

import logging
import math

from ..milp import MILPModel
from ..mps import column_alias

log = logging.getLogger(__name__)


class SolutionFileError(ValueError):
    pass


def parse_solution_file(text: str, model: MILPModel,
                        aliases: dict[str, str] | None = None) -> dict[int, float]:
    """Full ``column -> value`` assignment from solution text.

    Names may be full variable names or MPS aliases (``C0000012``).  Columns
    the file does not mention default to their lower bound (or the finite
    bound nearest zero) and each default is logged.
    """
    aliases = aliases or {}
    values: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionFileError(f"line {lineno}: expected '<name> <value>', got {raw!r}")
        name, value = parts
        try:
            val = float(value)
        except ValueError:
            raise SolutionFileError(f"line {lineno}: unparsable value {value!r}") from None
        if not math.isfinite(val):
            raise SolutionFileError(f"line {lineno}: non-finite value {value!r}")
        name = aliases.get(name, name)
        if model.has_column(name):
            col = model.column(name)
        elif name[:1] == "C" and name[1:].isdigit() and int(name[1:]) < model.n_vars:
            col = int(name[1:])
        else:
            raise SolutionFileError(f"line {lineno}: unknown variable {name!r}")
        values[col] = val
    for var in model.variables:
        if var.id not in values:
            default = _default(var.lower, var.upper)
            values[var.id] = default
            log.info("solution file omits %s; defaulting to %g", var.name, default)
    return values


def _default(lower: float, upper: float) -> float:
    if math.isfinite(lower):
        return lower
    if math.isfinite(upper):
        return min(upper, 0.0)
    return 0.0


def write_solution_file(model: MILPModel, assignment, use_aliases: bool = False) -> str:
    lines = []
    for var in model.variables:
        name = column_alias(var.id) if use_aliases else var.name
        lines.append(f"{name} {float(assignment[var.id])!r}")
    return "\n".join(lines) + "\n"
