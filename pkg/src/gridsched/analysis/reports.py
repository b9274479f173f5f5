"""Cost, curtailment, storage and switching reports over a named assignment."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping

from ..case import Case
from ..network import contingency_list
from .checker import Violation, check_feasibility, nodal_residual

BINDING_THRESHOLD = 0.99
PNR, CNR = "PNR", "CNR"


def named(model, x) -> dict[str, float]:
    """``{variable name: value}`` from a model and a column-indexed vector or mapping."""
    return {var.name: float(x[var.id]) for var in model.variables}


def cost_breakdown(case: Case, assignment: Mapping[str, float]) -> dict[str, float]:
    no_load = start_up = energy = 0.0
    probs = case.scenarios.probabilities
    for g in case.generators:
        for t in range(case.horizon):
            no_load += g.cost_no_load * assignment[f"u/g={g.id}/t={t}"]
            start_up += g.cost_startup * assignment[f"v/g={g.id}/t={t}"]
            for s in range(case.scenarios.count):
                energy += float(probs[s]) * g.cost * assignment[f"P/g={g.id}/t={t}/s={s}"]
    return {"no_load": no_load, "start_up": start_up, "energy": energy,
            "total": no_load + start_up + energy}


@dataclass
class Curtailment:
    per_scenario_mw: list[float]
    average_mw: float
    # scenario-averaged curtailment in each period; sums to average_mw
    profile_mw: list[float]
    average_per_period_mw: float
    post_contingency_average_mw: float | None = None


def curtailment_report(case: Case, assignment: Mapping[str, float],
                       contingencies=None) -> Curtailment:
    """Unused RES capacity in the base-case dispatch.

    The headline ``average_mw`` is the per-scenario sum over units and
    periods, averaged over scenarios with equal weight.  Post-outage
    curtailment is averaged over (outage, scenario) pairs and reported
    separately when those variables exist.
    """
    S, T = case.scenarios.count, case.horizon
    per_s, profile = [], [0.0] * T
    for s in range(S):
        total = 0.0
        for t in range(T):
            spill = sum(case.scenarios.available(w.id, t, s) - assignment[f"W/w={w.id}/t={t}/s={s}"]
                        for w in case.res_units)
            total += spill
            profile[t] += spill / S
        per_s.append(total)
    average = sum(per_s) / S if S else 0.0
    post = None
    outages = contingency_list(case, contingencies).lines
    if outages and case.res_units:
        totals = []
        for c in outages:
            for s in range(S):
                totals.append(sum(case.scenarios.available(w.id, t, s)
                                  - assignment[f"Wc/w={w.id}/c={c}/t={t}/s={s}"]
                                  for w in case.res_units for t in range(T)))
        post = sum(totals) / len(totals)
    return Curtailment(per_s, average, profile, average / T if T else 0.0, post)


@dataclass
class SocSeries:
    soc: list[float]
    cycle_depth: float


def ess_report(case: Case, assignment: Mapping[str, float]) -> dict[int, dict[int, SocSeries]]:
    """SOC per unit and scenario with its cycle depth.

    Cycle depth is half the total variation of SOC, starting from the
    initial state: a full 0 -> 1 -> 0 swing counts as one.
    """
    out = {}
    for e in case.ess_units:
        out[e.id] = {}
        for s in range(case.scenarios.count):
            soc = [assignment[f"E/e={e.id}/t={t}/s={s}"] / e.energy_max
                   for t in range(case.horizon)]
            prev, variation = e.init_energy / e.energy_max, 0.0
            for x in soc:
                variation += abs(x - prev)
                prev = x
            out[e.id][s] = SocSeries(soc, variation / 2.0)
    return out


@dataclass(frozen=True, order=True)
class SwitchEvent:
    kind: str
    line: int
    contingency: int | None
    period: int
    scenario: int


def switching_schedule(assignment: Mapping[str, float]) -> tuple[list[SwitchEvent], Counter]:
    """Open-line events (status below 0.5) and how often each line is opened.

    The outaged line itself is not an event.
    """
    events = []
    for name, value in assignment.items():
        if value >= 0.5 or not name.startswith(("zp/", "zc/")):
            continue
        parts = dict(p.split("=") for p in name.split("/")[1:])
        k, t, s = int(parts["k"]), int(parts["t"]), int(parts["s"])
        if name.startswith("zp/"):
            events.append(SwitchEvent(PNR, k, None, t, s))
        elif int(parts["c"]) != k:
            events.append(SwitchEvent(CNR, k, int(parts["c"]), t, s))
    events.sort(key=lambda e: (e.kind, e.line, e.contingency or 0, e.period, e.scenario))
    return events, Counter((e.kind, e.line) for e in events)


def binding_lines(case: Case, assignment: Mapping[str, float], contingencies=None,
                  threshold: float = BINDING_THRESHOLD,
                  contingency_limit: str | None = None) -> Counter:
    """How many (period, scenario[, outage]) states load each line to ``threshold`` of its limit."""
    counts = Counter()
    mode = contingency_limit or case.options.contingency_limit
    outages = contingency_list(case, contingencies).lines
    for s in range(case.scenarios.count):
        for t in range(case.horizon):
            for ln in case.lines:
                if abs(assignment[f"F/k={ln.id}/t={t}/s={s}"]) >= threshold * ln.limit_normal:
                    counts[ln.id] += 1
                limit = ln.limit_emergency if mode == "emergency" else ln.limit_normal
                for c in outages:
                    if c != ln.id and abs(assignment[f"Fc/k={ln.id}/c={c}/t={t}/s={s}"]) >= \
                            threshold * limit:
                        counts[ln.id] += 1
    return counts


@dataclass
class ScheduleReport:
    costs: dict[str, float]
    per_scenario_cost: list[float]
    curtailment: Curtailment
    ess: dict[int, dict[int, SocSeries]]
    switching: list[SwitchEvent]
    switching_frequency: Counter
    binding: Counter
    nodal_residual: float
    violations: list[Violation] = field(default_factory=list)


def per_scenario_cost(case: Case, assignment: Mapping[str, float]) -> list[float]:
    """Commitment cost plus each scenario's own energy cost."""
    fixed = sum(g.cost_no_load * assignment[f"u/g={g.id}/t={t}"]
                + g.cost_startup * assignment[f"v/g={g.id}/t={t}"]
                for g in case.generators for t in range(case.horizon))
    return [fixed + sum(g.cost * assignment[f"P/g={g.id}/t={t}/s={s}"]
                        for g in case.generators for t in range(case.horizon))
            for s in range(case.scenarios.count)]


def schedule_report(case: Case, variant, assignment: Mapping[str, float], tol: float = 1e-6,
                    contingencies=None, **options) -> ScheduleReport:
    violations = check_feasibility(case, variant, assignment, tol, contingencies, **options)
    events, freq = switching_schedule(assignment)
    return ScheduleReport(
        costs=cost_breakdown(case, assignment),
        per_scenario_cost=per_scenario_cost(case, assignment),
        curtailment=curtailment_report(case, assignment, contingencies),
        ess=ess_report(case, assignment),
        switching=events,
        switching_frequency=freq,
        binding=binding_lines(case, assignment, contingencies,
                              contingency_limit=options.get("contingency_limit")),
        nodal_residual=nodal_residual(case, assignment, contingencies),
        violations=violations,
    )


# ---------------------------------------------------------------------------

@dataclass
class VariantRun:
    variant: str
    report: ScheduleReport
    gap: float = 0.0
    walltime: float | None = None
    fingerprint: str = ""


@dataclass
class Comparison:
    rows: list[dict]
    verdict: bool
    checks: list[tuple[str, str, bool, float]]

    def render(self) -> str:
        lines = [f"{'variant':<10} {'total cost':>14} {'avg curtailed MW':>17} {'gap':>8}"]
        for r in self.rows:
            lines.append(f"{r['variant']:<10} {r['total']:>14.2f} {r['curtailment_mw']:>17.2f} "
                         f"{r['gap']:>8.4f}")
        for lo, hi, ok, slack in self.checks:
            lines.append(f"{'ok  ' if ok else 'FAIL'} cost({lo}) <= cost({hi}) "
                         f"(slack {slack:.4g})")
        lines.append("verdict: " + ("pass" if self.verdict else "fail"))
        return "\n".join(lines)


# richer model first; each pair must not cost more than its poorer partner
CHAIN = [("SSCUC-P", "SSCUC"), ("SSCUC-C", "SSCUC"),
         ("SSCUC-PC", "SSCUC-P"), ("SSCUC-PC", "SSCUC-C")]


def compare_variants(runs: list[VariantRun], abs_tol: float = 1e-6) -> Comparison:
    """Cost table and the relaxation-chain verdict over whichever variants are present.

    Each inequality may be violated by at most the two runs' relative gaps
    applied to the poorer model's cost, plus ``abs_tol``.
    """
    prints = {r.fingerprint for r in runs}
    if len(prints) > 1:
        raise ValueError("runs come from different cases")
    by_name = {r.variant: r for r in runs}
    rows = [{"variant": r.variant, "total": r.report.costs["total"],
             "no_load": r.report.costs["no_load"], "start_up": r.report.costs["start_up"],
             "energy": r.report.costs["energy"], "curtailment_mw": r.report.curtailment.average_mw,
             "gap": r.gap, "walltime_s": r.walltime} for r in runs]
    checks = []
    for lo, hi in CHAIN:
        if lo in by_name and hi in by_name:
            a, b = by_name[lo], by_name[hi]
            cost_hi = b.report.costs["total"]
            slack = (a.gap + b.gap) * abs(cost_hi) + abs_tol
            checks.append((lo, hi, a.report.costs["total"] <= cost_hi + slack, slack))
    return Comparison(rows, all(ok for *_, ok, _ in checks), checks)
