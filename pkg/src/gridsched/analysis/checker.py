"""Feasibility check of a named assignment against the scheduling model.

Written directly from the constraint definitions and the case data; it
does not import the model builder, so a defect in one shows up as a
disagreement with the other.  Assignments are keyed by variable name.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from ..case import Case
from ..network import bridges, contingency_list


@dataclass(frozen=True)
class Violation:
    equation: str
    coords: str
    residual: float

    def __str__(self):
        return f"{self.equation} [{self.coords}] residual {self.residual:.3g}"


class MissingVariables(KeyError):
    def __init__(self, names):
        self.names = sorted(names)
        shown = ", ".join(self.names[:5]) + (" ..." if len(self.names) > 5 else "")
        super().__init__(f"{len(self.names)} variable(s) missing from assignment: {shown}")


def _fmt(**coords) -> str:
    return "/".join(f"{k}={v}" for k, v in coords.items())


class _Check:
    """Collects residuals; absolute tolerance on each scalar relation."""

    def __init__(self, values: Mapping[str, float], tol: float):
        self.values = values
        self.tol = tol
        self.found: list[Violation] = []
        self.missing: set[str] = set()

    def __call__(self, name: str) -> float:
        try:
            return float(self.values[name])
        except KeyError:
            self.missing.add(name)
            return math.nan

    def le(self, lhs, rhs, eq, coords):
        if lhs - rhs > self.tol:
            self.found.append(Violation(eq, coords, lhs - rhs))

    def ge(self, lhs, rhs, eq, coords):
        self.le(rhs, lhs, eq, coords)

    def eq(self, lhs, rhs, eq, coords):
        if abs(lhs - rhs) > self.tol:
            self.found.append(Violation(eq, coords, abs(lhs - rhs)))

    def binary(self, value, name):
        if math.isnan(value):  # missing; reported together at the end
            return
        if abs(value - round(value)) > self.tol:
            self.found.append(Violation("integrality", name, abs(value - round(value))))


def check_feasibility(case: Case, variant, assignment: Mapping[str, float], tol: float = 1e-6,
                      contingencies=None, contingency_limit: str | None = None,
                      tie_pnr_across_scenarios: bool | None = None) -> list[Violation]:
    """Every violated relation of ``variant`` at ``assignment``.

    ``variant`` is anything with boolean ``pnr`` and ``cnr`` attributes.
    Raises :class:`MissingVariables` if a required variable is absent.
    """
    pnr, cnr = bool(variant.pnr), bool(variant.cnr)
    outages = contingency_list(case, contingencies).lines
    mode = contingency_limit or case.options.contingency_limit
    tie = case.options.tie_pnr_across_scenarios if tie_pnr_across_scenarios is None \
        else tie_pnr_across_scenarios
    ck = _Check(assignment, tol)
    T, S = case.horizon, case.scenarios.count
    dT = case.period_length
    cap = case.options.theta_cap
    no_switch = set(bridges(case))

    def u(g, t):
        return ck(f"u/g={g}/t={t}")

    def v(g, t):
        return ck(f"v/g={g}/t={t}")

    for g in case.generators:
        u0 = 1.0 if g.init_on else 0.0
        for t in range(T):
            ck.binary(u(g.id, t), f"u/g={g.id}/t={t}")
            ck.binary(v(g.id, t), f"v/g={g.id}/t={t}")
            where = _fmt(g=g.id, t=t)
            window = range(max(0, t - g.min_up + 1), t + 1)
            ck.le(sum(v(g.id, q) for q in window), u(g.id, t), "eq8", where)
            if t <= T - 1 - g.min_down:
                ahead = range(t + 1, t + g.min_down + 1)
                ck.le(sum(v(g.id, q) for q in ahead), 1.0 - u(g.id, t), "eq9", where)
            prev = u(g.id, t - 1) if t > 0 else u0
            ck.ge(v(g.id, t), u(g.id, t) - prev, "eq10", where)

    for s in range(S):
        for t in range(T):
            _base(case, ck, t, s, pnr, dT, cap, no_switch)
            for c in outages:
                _post(case, ck, c, t, s, cnr, dT, cap, mode, no_switch)
    if pnr and tie:
        for ln in case.lines:
            for t in range(T):
                for s in range(1, S):
                    ck.eq(ck(f"zp/k={ln.id}/t={t}/s={s}"), ck(f"zp/k={ln.id}/t={t}/s=0"),
                          "tiepnr", _fmt(k=ln.id, t=t, s=s))
    if ck.missing:
        raise MissingVariables(ck.missing)
    return ck.found


def _base(case, ck, t, s, pnr, dT, cap, no_switch):
    gens = case.generators
    P = {g.id: ck(f"P/g={g.id}/t={t}/s={s}") for g in gens}
    r = {g.id: ck(f"r/g={g.id}/t={t}/s={s}") for g in gens}
    total_r = sum(r.values())
    for g in gens:
        w = _fmt(g=g.id, t=t, s=s)
        ug, vg = ck(f"u/g={g.id}/t={t}"), ck(f"v/g={g.id}/t={t}")
        ck.ge(P[g.id], g.p_min * ug, "eq2", w)
        ck.le(P[g.id] + r[g.id], g.p_max * ug, "eq3", w)
        ck.ge(r[g.id], 0.0, "eq4", w)
        ck.le(r[g.id], g.ramp_10 * ug, "eq4", w)
        ck.ge(total_r, P[g.id] + r[g.id], "eq5", w)
        if t > 0:
            P_prev, u_prev = ck(f"P/g={g.id}/t={t - 1}/s={s}"), ck(f"u/g={g.id}/t={t - 1}")
        else:
            P_prev, u_prev = g.init_power, (1.0 if g.init_on else 0.0)
        ck.le(P[g.id] - P_prev, g.ramp_hr * u_prev + g.ramp_su * vg, "eq6", w)
        ck.le(P_prev - P[g.id], g.ramp_hr * ug + g.ramp_sd * (vg - ug + u_prev), "eq7", w)

    for wu in case.res_units:
        W = ck(f"W/w={wu.id}/t={t}/s={s}")
        avail = case.scenarios.available(wu.id, t, s)
        ck.ge(W, 0.0, "eq11", _fmt(w=wu.id, t=t, s=s))
        ck.le(W, avail, "eq11", _fmt(w=wu.id, t=t, s=s))

    for e in case.ess_units:
        w = _fmt(e=e.id, t=t, s=s)
        bc, bd = ck(f"bcha/e={e.id}/t={t}/s={s}"), ck(f"bdis/e={e.id}/t={t}/s={s}")
        ck.binary(bc, f"bcha/{w}")
        ck.binary(bd, f"bdis/{w}")
        ch, dis = ck(f"cha/e={e.id}/t={t}/s={s}"), ck(f"dis/e={e.id}/t={t}/s={s}")
        E = ck(f"E/e={e.id}/t={t}/s={s}")
        ck.le(bc + bd, 1.0, "eq12", w)
        ck.ge(ch, 0.0, "eq13", w)
        ck.le(ch, e.p_max_charge * bc, "eq13", w)
        ck.ge(dis, 0.0, "eq15", w)
        ck.le(dis, e.p_max_discharge * bd, "eq15", w)
        if t > 0:
            ch_prev = ck(f"cha/e={e.id}/t={t - 1}/s={s}")
            dis_prev = ck(f"dis/e={e.id}/t={t - 1}/s={s}")
            E_prev = ck(f"E/e={e.id}/t={t - 1}/s={s}")
        else:
            ch_prev, dis_prev, E_prev = 0.0, 0.0, e.init_energy
        ck.le(abs((ch - ch_prev) * dT), e.ramp_charge, "eq14", w)
        ck.le(abs((dis - dis_prev) * dT), e.ramp_discharge, "eq16", w)
        ck.ge(E, e.soc_min * e.energy_max, "eq17", w)
        ck.le(E, e.soc_max * e.energy_max, "eq17", w)
        ck.eq(E, E_prev + e.eff_charge * ch - dis / e.eff_discharge, "eq18", w)

    theta = {b.id: ck(f"th/n={b.id}/t={t}/s={s}") for b in case.buses}
    flows = {ln.id: ck(f"F/k={ln.id}/t={t}/s={s}") for ln in case.lines}
    _angles(case, ck, theta, _fmt(t=t, s=s))
    opened = 0.0
    for ln in case.lines:
        w = _fmt(k=ln.id, t=t, s=s)
        mismatch = flows[ln.id] - case.base_mva * ln.susceptance * (
            theta[ln.from_bus] - theta[ln.to_bus])
        if not pnr:
            ck.eq(mismatch, 0.0, "eq19", w)
            ck.le(abs(flows[ln.id]), ln.limit_normal, "eq20", w)
            continue
        z = ck(f"zp/k={ln.id}/t={t}/s={s}")
        ck.binary(z, f"zp/{w}")
        if not ln.switchable or ln.id in no_switch:
            ck.eq(z, 1.0, "switchable", w)
        M = _big_m(case, ln, ln.limit_normal)
        ck.ge(mismatch + (1.0 - z) * M, 0.0, "eq21", w)
        ck.le(mismatch - (1.0 - z) * M, 0.0, "eq22", w)
        ck.le(abs(flows[ln.id]), z * ln.limit_normal, "eq23", w)
        opened += 1.0 - z
    if pnr:
        ck.le(opened, 1.0, "eq24", _fmt(t=t, s=s))

    inj = _injections(case, ck, t, "P/g={g}/t={t}/s={s}", "W/w={w}/t={t}/s={s}",
                      "cha/e={e}/t={t}/s={s}", "dis/e={e}/t={t}/s={s}", s=s)
    for b in case.buses:
        net = inj[b.id] + _net_inflow(case, b.id, flows)
        ck.eq(net, b.demand[t], "eq25", _fmt(n=b.id, t=t, s=s))


def _post(case, ck, c, t, s, cnr, dT, cap, mode, no_switch):
    for g in case.generators:
        w = _fmt(g=g.id, c=c, t=t, s=s)
        ug = ck(f"u/g={g.id}/t={t}")
        P, Pc = ck(f"P/g={g.id}/t={t}/s={s}"), ck(f"Pc/g={g.id}/c={c}/t={t}/s={s}")
        ck.le(P - Pc, g.ramp_10 * ug, "eq26", w)
        ck.le(Pc - P, g.ramp_10 * ug, "eq27", w)
        ck.ge(Pc, g.p_min * ug, "eq28", w)
        ck.le(Pc, g.p_max * ug, "eq29", w)
    for wu in case.res_units:
        Wc = ck(f"Wc/w={wu.id}/c={c}/t={t}/s={s}")
        w = _fmt(w=wu.id, c=c, t=t, s=s)
        ck.ge(Wc, 0.0, "eq30", w)
        ck.le(Wc, case.scenarios.available(wu.id, t, s), "eq30", w)
    for e in case.ess_units:
        w = _fmt(e=e.id, c=c, t=t, s=s)
        bc, bd = ck(f"bcha/e={e.id}/t={t}/s={s}"), ck(f"bdis/e={e.id}/t={t}/s={s}")
        ch, dis = ck(f"cha/e={e.id}/t={t}/s={s}"), ck(f"dis/e={e.id}/t={t}/s={s}")
        chc = ck(f"chac/e={e.id}/c={c}/t={t}/s={s}")
        disc = ck(f"disc/e={e.id}/c={c}/t={t}/s={s}")
        E, Ec = ck(f"E/e={e.id}/t={t}/s={s}"), ck(f"Ec/e={e.id}/c={c}/t={t}/s={s}")
        ck.ge(chc, 0.0, "eq31", w)
        ck.le(chc, e.p_max_charge * bc, "eq31", w)
        ck.le(abs((chc - ch) * dT), e.ramp_charge, "eq32", w)
        ck.ge(disc, 0.0, "eq33", w)
        ck.le(disc, e.p_max_discharge * bd, "eq33", w)
        ck.le(abs((disc - dis) * dT), e.ramp_discharge, "eq34", w)
        # the window holds for every outage, not only per (e, t, s)
        ck.ge(Ec, e.soc_min * e.energy_max, "eq35", w)
        ck.le(Ec, e.soc_max * e.energy_max, "eq35", w)
        ck.eq(Ec, E + e.eff_charge * chc - disc / e.eff_discharge, "eq36", w)

    theta = {b.id: ck(f"thc/n={b.id}/c={c}/t={t}/s={s}") for b in case.buses}
    flows = {ln.id: ck(f"Fc/k={ln.id}/c={c}/t={t}/s={s}") for ln in case.lines}
    _angles(case, ck, theta, _fmt(c=c, t=t, s=s))
    ck.eq(flows[c], 0.0, "outage", _fmt(k=c, c=c, t=t, s=s))
    if cnr:
        z_out = ck(f"zc/k={c}/c={c}/t={t}/s={s}")
        ck.eq(z_out, 0.0, "outage", _fmt(k=c, c=c, t=t, s=s))
    opened = 0.0
    for ln in case.lines:
        if ln.id == c:
            continue
        w = _fmt(k=ln.id, c=c, t=t, s=s)
        limit = ln.limit_emergency if mode == "emergency" else ln.limit_normal
        mismatch = flows[ln.id] - case.base_mva * ln.susceptance * (
            theta[ln.from_bus] - theta[ln.to_bus])
        if not cnr:
            ck.eq(mismatch, 0.0, "eq37", w)
            ck.le(abs(flows[ln.id]), limit, "eq38", w)
            continue
        z = ck(f"zc/k={ln.id}/c={c}/t={t}/s={s}")
        ck.binary(z, f"zc/{w}")
        if not ln.switchable or ln.id in no_switch:
            ck.eq(z, 1.0, "switchable", w)
        M = _big_m(case, ln, limit)
        ck.ge(mismatch + (1.0 - z) * M, 0.0, "eq39", w)
        ck.le(mismatch - (1.0 - z) * M, 0.0, "eq40", w)
        ck.le(abs(flows[ln.id]), z * limit, "eq41", w)
        opened += 1.0 - z
    if cnr:
        ck.le(opened, 1.0, "eq42", _fmt(c=c, t=t, s=s))

    inj = _injections(case, ck, t, f"Pc/g={{g}}/c={c}/t={{t}}/s={{s}}",
                      f"Wc/w={{w}}/c={c}/t={{t}}/s={{s}}", f"chac/e={{e}}/c={c}/t={{t}}/s={{s}}",
                      f"disc/e={{e}}/c={c}/t={{t}}/s={{s}}", s=s)
    for b in case.buses:
        net = inj[b.id] + _net_inflow(case, b.id, flows)
        ck.eq(net, b.demand[t], "eq43", _fmt(n=b.id, c=c, t=t, s=s))


def _big_m(case, line, limit_mw) -> float:
    """MW-scaled disjunctive constant: angle spread under the box plus the flow limit."""
    return case.base_mva * abs(line.susceptance) * 2.0 * case.options.theta_cap + limit_mw


def _angles(case, ck, theta, where):
    cap = case.options.theta_cap
    for n, value in theta.items():
        if n == case.reference_bus:
            ck.eq(value, 0.0, "angle", f"n={n}/{where}")
        else:
            ck.le(abs(value), cap, "angle", f"n={n}/{where}")


def _injections(case, ck, t, gen_fmt, res_fmt, cha_fmt, dis_fmt, s):
    """Generation + RES + discharge - charge at each bus."""
    inj = {b.id: 0.0 for b in case.buses}
    for g in case.generators:
        inj[g.bus] += ck(gen_fmt.format(g=g.id, t=t, s=s))
    for w in case.res_units:
        inj[w.bus] += ck(res_fmt.format(w=w.id, t=t, s=s))
    for e in case.ess_units:
        inj[e.bus] += ck(dis_fmt.format(e=e.id, t=t, s=s)) - ck(cha_fmt.format(e=e.id, t=t, s=s))
    return inj


def _net_inflow(case, bus, flows):
    total = 0.0
    for ln in case.lines:
        if ln.to_bus == bus:
            total += flows[ln.id]
        elif ln.from_bus == bus:
            total -= flows[ln.id]
    return total


def nodal_residual(case: Case, assignment: Mapping[str, float], contingencies=None) -> float:
    """Largest absolute nodal-balance mismatch over base and post-outage states."""
    ck = _Check(assignment, 0.0)
    worst = 0.0
    outages = contingency_list(case, contingencies).lines
    for s in range(case.scenarios.count):
        for t in range(case.horizon):
            states = [(None, "P/g={g}/t={t}/s={s}", "W/w={w}/t={t}/s={s}",
                       "cha/e={e}/t={t}/s={s}", "dis/e={e}/t={t}/s={s}")]
            states += [(c, f"Pc/g={{g}}/c={c}/t={{t}}/s={{s}}", f"Wc/w={{w}}/c={c}/t={{t}}/s={{s}}",
                        f"chac/e={{e}}/c={c}/t={{t}}/s={{s}}",
                        f"disc/e={{e}}/c={c}/t={{t}}/s={{s}}") for c in outages]
            for c, *fmts in states:
                if c is None:
                    flows = {ln.id: ck(f"F/k={ln.id}/t={t}/s={s}") for ln in case.lines}
                else:
                    flows = {ln.id: ck(f"Fc/k={ln.id}/c={c}/t={t}/s={s}") for ln in case.lines}
                inj = _injections(case, ck, t, *fmts, s=s)
                for b in case.buses:
                    gap = inj[b.id] + _net_inflow(case, b.id, flows) - b.demand[t]
                    worst = max(worst, abs(gap))
    if ck.missing:
        raise MissingVariables(ck.missing)
    return worst
