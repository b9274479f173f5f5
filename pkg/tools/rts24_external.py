"""Four-variant rts24 study through the export / external-solve / import bridge.

    python tools/rts24_external.py OUTDIR [--contingencies 31,38] [--time-limit 3600]

Each variant is exported with ``gridsched export``, solved by HiGHS via
``solve_highs.py`` (seeded with the best poorer variant's solution, which
stays feasible because closing every switch embeds the poorer model),
imported back and checked at 1e-4, and the four results are compared.
Writes ``OUTDIR/external.csv`` with one row per variant.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from solve_highs import solve  # noqa: E402

from gridsched import analysis  # noqa: E402
from gridsched.case import case_from_file  # noqa: E402
from gridsched.cli import resolve_case  # noqa: E402
from gridsched.formulation import VARIANTS, build  # noqa: E402
from gridsched.mps import export, read_alias_map  # noqa: E402
from gridsched.solver import parse_solution_file  # noqa: E402

SEEDS = {"SSCUC": [], "SSCUC-P": ["SSCUC"], "SSCUC-C": ["SSCUC"],
         "SSCUC-PC": ["SSCUC-P", "SSCUC-C"]}


def run(out: Path, contingencies, gap: float, time_limit: float, case_name="rts24.case"):
    case = case_from_file(resolve_case(case_name))
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for variant in VARIANTS:
        name = variant.name
        sub = out / name.lower()
        form = build(case, variant, contingencies)
        mps, _ = export(form.model, sub)
        seeds = [results[s] for s in SEEDS[name] if results.get(s, {}).get("solution")]
        start = min(seeds, key=lambda r: r["objective"])["solution"] if seeds else None
        tic = time.perf_counter()
        status, text, obj, bound, achieved = solve(mps, gap, time_limit, start)
        wall = time.perf_counter() - tic
        row = {"variant": name, "status": status, "objective": obj, "bound": bound,
               "gap": achieved, "walltime_s": wall, "violations": None, "total": None,
               "curtailment_mw": None, "solution": None}
        if text is not None:
            sol = sub / "model.sol"
            sol.write_text(text)
            aliases = read_alias_map((sub / "model.aliases").read_text())
            x = analysis.named(form.model, parse_solution_file(text, form.model, aliases))
            report = analysis.schedule_report(case, variant, x, 1e-4, contingencies)
            row.update(solution=sol, violations=len(report.violations),
                       total=report.costs["total"],
                       curtailment_mw=report.curtailment.average_mw, report=report)
        results[name] = row
        print(f"{name:9s} {status:22s} cost {row['total']} gap {achieved:.4g} "
              f"curtailment {row['curtailment_mw']} violations {row['violations']} "
              f"{wall:.0f}s", flush=True)
    fields = ["variant", "status", "objective", "bound", "gap", "walltime_s", "violations",
              "total", "curtailment_mw"]
    with open(out / "external.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(results.values())
    return results


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out", type=Path)
    p.add_argument("--contingencies", default="31,38",
                   help="comma list of line ids, all_lines or none")
    p.add_argument("--gap", type=float, default=0.01)
    p.add_argument("--time-limit", type=float, default=3600.0)
    args = p.parse_args(argv)
    policy = args.contingencies
    if policy not in ("all_lines", "none"):
        policy = [int(k) for k in policy.split(",")]
    run(args.out, policy, args.gap, args.time_limit)
    return 0


if __name__ == "__main__":
    sys.exit(main())
