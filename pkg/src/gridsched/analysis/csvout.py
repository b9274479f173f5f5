"""Report CSVs.  Numbers are fixed to six decimals so reruns are byte-identical."""
from __future__ import annotations

import csv
import io
from pathlib import Path


def num(x) -> str:
    if x is None:
        return ""
    text = f"{float(x):.6f}"
    return "0.000000" if text == "-0.000000" else text


def _write(path: Path, header, rows) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    tmp = Path(path).with_suffix(".tmp")
    tmp.write_text(buf.getvalue())
    tmp.replace(path)
    return Path(path)


def write_costs(path, runs) -> Path:
    """``runs``: iterable of (variant, costs dict, gap, walltime seconds or None)."""
    return _write(path, ["variant", "total", "no_load", "start_up", "energy", "gap", "walltime_s"],
                  [[v, num(c["total"]), num(c["no_load"]), num(c["start_up"]), num(c["energy"]),
                    num(gap), num(wall)] for v, c, gap, wall in runs])


def write_curtailment(path, variant, curtailment) -> Path:
    return _write(path, ["variant", "scenario", "mw"],
                  [[variant, s, num(mw)] for s, mw in enumerate(curtailment.per_scenario_mw)])


def write_soc(path, variant, ess) -> Path:
    rows = [[variant, e, s, t, num(x)]
            for e in sorted(ess) for s in sorted(ess[e]) for t, x in enumerate(ess[e][s].soc)]
    return _write(path, ["variant", "ess", "scenario", "period", "soc"], rows)


def write_switching(path, variant, events) -> Path:
    return _write(path, ["variant", "kind", "line", "contingency", "period", "scenario"],
                  [[variant, e.kind, e.line, "" if e.contingency is None else e.contingency,
                    e.period, e.scenario] for e in events])


def write_violations(path, violations) -> Path:
    return _write(path, ["equation", "coords", "residual"],
                  [[v.equation, v.coords, f"{v.residual:.6g}"] for v in violations])


def write_comparison(path, comparison) -> Path:
    header = ["variant", "total", "no_load", "start_up", "energy", "curtailment_mw", "gap",
              "walltime_s"]
    return _write(path, header, [[r["variant"]] + [num(r[k]) for k in header[1:]]
                                 for r in comparison.rows])
