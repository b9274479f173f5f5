"""Solve an exported model.mps with HiGHS and write a gridsched solution file.

    python tools/solve_highs.py out/model.mps --gap 0.01 --time-limit 3600 \
        [--start previous.sol] > out/model.sol

The solution file uses the MPS column aliases, so it is read back with
``gridsched solve ... --solver import --solution out/model.sol`` (the
``model.aliases`` sidecar beside it supplies the names).  ``--start``
takes a solution file of another variant (aliases or full names, with
``model.aliases`` beside it) and seeds HiGHS with it; switching statuses
the start does not mention default to closed.  The achieved gap and
bound go to stderr and, with ``--report``, to a small key/value file.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import highspy

from gridsched.mps import read_alias_map


def read_start(path: Path) -> dict[str, float]:
    """``{full name: value}`` from a solution file, resolving aliases when a sidecar exists."""
    sidecar = path.with_name("model.aliases")
    aliases = read_alias_map(sidecar.read_text()) if sidecar.is_file() else {}
    values = {}
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            name, value = line.split()
            values[aliases.get(name, name)] = float(value)
    return values


def start_vector(names: list[str], start: dict[str, float], lower, upper) -> list[float]:
    out = []
    for name, lo, hi in zip(names, lower, upper):
        if name in start:
            value = start[name]
        elif name.startswith(("zp/", "zc/")):
            value = 1.0  # a poorer variant has every line in service
        else:
            value = lo if math.isfinite(lo) else 0.0
        out.append(min(max(value, lo), hi))
    return out


def solve(mps: Path, gap: float, time_limit: float, start: Path | None = None,
          threads: int | None = None, verbose: bool = False):
    aliases = read_alias_map(mps.with_name("model.aliases").read_text())
    h = highspy.Highs()
    h.setOptionValue("output_flag", verbose)
    h.setOptionValue("mip_rel_gap", gap)
    h.setOptionValue("time_limit", time_limit)
    if threads:
        h.setOptionValue("threads", threads)
    if h.readModel(str(mps)) != highspy.HighsStatus.kOk:
        raise SystemExit(f"HiGHS could not read {mps}")
    lp = h.getLp()
    col_names = [f"C{j:07d}" for j in range(lp.num_col_)]
    if start is not None:
        full = [aliases[c] for c in col_names]
        seed = highspy.HighsSolution()
        seed.col_value = start_vector(full, read_start(start), lp.col_lower_, lp.col_upper_)
        seed.value_valid = True
        h.setSolution(seed)
    h.run()
    info = h.getInfo()
    status = h.modelStatusToString(h.getModelStatus())
    if info.primal_solution_status != 2:  # no feasible point
        return status, None, math.inf, -math.inf, math.inf
    x = h.getSolution().col_value
    text = "".join(f"{c} {float(v)!r}\n" for c, v in zip(col_names, x))
    return status, text, info.objective_function_value, info.mip_dual_bound, info.mip_gap


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("mps", type=Path)
    p.add_argument("--gap", type=float, default=0.01)
    p.add_argument("--time-limit", type=float, default=2500.0)
    p.add_argument("--start", type=Path)
    p.add_argument("--threads", type=int)
    p.add_argument("--report", type=Path, help="write status, objective, bound, gap here")
    p.add_argument("-v", "--verbose", action="store_true")
    args = p.parse_args(argv)
    status, text, obj, bound, gap = solve(args.mps, args.gap, args.time_limit, args.start,
                                          args.threads, args.verbose)
    summary = f"status: {status}\nobjective: {obj!r}\nbound: {bound!r}\ngap: {gap!r}\n"
    print(summary, end="", file=sys.stderr)
    if args.report:
        args.report.write_text(summary)
    if text is None:
        return 3
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
