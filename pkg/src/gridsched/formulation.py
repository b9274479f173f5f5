"""Compile a case and a model variant into a frozen MILP.

Four variants share one builder: the base stochastic SCUC, and the same
model with preventive switching (line status per period and scenario in
the base case), corrective switching (line status per contingency), or
both.  Every row is tagged ``eq<N>/<coord>=<value>/...`` after the
equation it realizes; pure bound constraints are stored on the column and
recorded in ``Variable.origin`` with the same tag format.

Power quantities are MW, angles radians; flow definitions multiply the
per-unit susceptance by ``base_mva``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .case import Case, CaseError, validate_case
from .milp import BINARY, CONTINUOUS, EQ, GE, LE, MILPModel, ModelError
from .network import bridges, contingency_list


@dataclass(frozen=True)
class Variant:
    pnr: bool = False
    cnr: bool = False

    @property
    def name(self) -> str:
        return {(False, False): "SSCUC", (True, False): "SSCUC-P",
                (False, True): "SSCUC-C", (True, True): "SSCUC-PC"}[(self.pnr, self.cnr)]

    @classmethod
    def parse(cls, text: str) -> "Variant":
        key = text.strip().upper().replace("_", "-")
        for v in VARIANTS:
            if v.name == key:
                return v
        raise ValueError(f"unknown variant {text!r}; expected one of "
                         f"{', '.join(v.name.lower() for v in VARIANTS)}")

    def equations(self) -> set[int]:
        """Equation numbers whose constraints (rows or column bounds) the variant carries."""
        eqs = set(range(2, 19)) | {25} | set(range(26, 37)) | {43}
        eqs |= set(range(21, 25)) if self.pnr else {19, 20}
        eqs |= set(range(39, 43)) if self.cnr else {37, 38}
        return eqs

    def __str__(self):
        return self.name


SSCUC = Variant(False, False)
SSCUC_P = Variant(True, False)
SSCUC_C = Variant(False, True)
SSCUC_PC = Variant(True, True)
VARIANTS = (SSCUC, SSCUC_P, SSCUC_C, SSCUC_PC)

# family -> (name prefix, coordinate keys)
FAMILIES = {
    "P_g": ("P", ("g", "t", "s")),
    "P_g_c": ("Pc", ("g", "c", "t", "s")),
    "P_k": ("F", ("k", "t", "s")),
    "P_k_c": ("Fc", ("k", "c", "t", "s")),
    "P_w": ("W", ("w", "t", "s")),
    "P_w_c": ("Wc", ("w", "c", "t", "s")),
    "p_cha": ("cha", ("e", "t", "s")),
    "p_cha_c": ("chac", ("e", "c", "t", "s")),
    "p_dis": ("dis", ("e", "t", "s")),
    "p_dis_c": ("disc", ("e", "c", "t", "s")),
    "E": ("E", ("e", "t", "s")),
    "E_c": ("Ec", ("e", "c", "t", "s")),
    "r": ("r", ("g", "t", "s")),
    "u": ("u", ("g", "t")),
    "v": ("v", ("g", "t")),
    "z_pnr": ("zp", ("k", "t", "s")),
    "z_cnr": ("zc", ("k", "c", "t", "s")),
    "theta": ("th", ("n", "t", "s")),
    "theta_c": ("thc", ("n", "c", "t", "s")),
    "b_cha": ("bcha", ("e", "t", "s")),
    "b_dis": ("bdis", ("e", "t", "s")),
}
_PREFIX_TO_FAMILY = {prefix: fam for fam, (prefix, _) in FAMILIES.items()}


def variable_name(family: str, coords: tuple) -> str:
    prefix, keys = FAMILIES[family]
    return prefix + "".join(f"/{k}={v}" for k, v in zip(keys, coords))


def parse_variable_name(name: str) -> tuple[str, tuple[int, ...]]:
    """Inverse of :func:`variable_name`: ``"Fc/k=2/c=3/t=0/s=1"`` -> ``("P_k_c", (2, 3, 0, 1))``."""
    prefix, *parts = name.split("/")
    family = _PREFIX_TO_FAMILY.get(prefix)
    if family is None:
        raise KeyError(f"unknown variable family in {name!r}")
    keys = FAMILIES[family][1]
    if len(parts) != len(keys):
        raise KeyError(f"malformed variable name {name!r}")
    coords = []
    for key, part in zip(keys, parts):
        k, _, v = part.partition("=")
        if k != key:
            raise KeyError(f"malformed variable name {name!r}")
        coords.append(int(v))
    return family, tuple(coords)


def _tag(eq: int, **coords) -> str:
    return f"eq{eq}" + "".join(f"/{k}={v}" for k, v in coords.items())


class VariableIndex:
    """Bidirectional map between ``(family, coords)`` and model columns."""

    def __init__(self):
        self._col: dict[tuple[str, tuple], int] = {}
        self._key: list[tuple[str, tuple]] = []

    def add(self, family: str, coords: tuple, col: int):
        self._col[(family, coords)] = col
        if col != len(self._key):
            raise ModelError("columns must be registered in creation order")
        self._key.append((family, coords))

    def col(self, family: str, *coords) -> int:
        return self._col[(family, tuple(coords))]

    def get(self, family: str, *coords) -> int | None:
        return self._col.get((family, tuple(coords)))

    def key(self, col: int) -> tuple[str, tuple]:
        return self._key[col]

    def family(self, family: str) -> dict[tuple, int]:
        return {coords: c for (fam, coords), c in self._col.items() if fam == family}

    def families(self) -> set[str]:
        return {fam for fam, _ in self._key}

    def __len__(self):
        return len(self._key)

    def __contains__(self, item):
        return item in self._col


@dataclass
class Formulation:
    """Everything needed to interpret a built model's columns."""
    case: Case
    variant: Variant
    contingencies: list[int]
    model: MILPModel
    index: VariableIndex


def big_m_value(case: Case, line, limit: float | None = None) -> float:
    """Per-unit disjunctive constant for one line's switched flow definition.

    ``|b_k| * 2 * theta_cap`` bounds the angle term under the angle box, and
    the flow itself never exceeds the line limit (``limit`` in MW, default
    the normal rating), so the relaxed rows can never bind when the line is
    open.
    """
    if not hasattr(line, "susceptance"):
        line = case.line(line)
    limit_mw = line.limit_normal if limit is None else limit
    return abs(line.susceptance) * 2.0 * case.options.theta_cap + limit_mw / case.base_mva


def expected_variable_count(case: Case, variant: Variant, n_contingencies: int) -> int:
    """Closed-form column count of :func:`build`, used to catch index drift."""
    G, K, E = len(case.generators), len(case.lines), len(case.ess_units)
    W, N, T, S = len(case.res_units), len(case.buses), case.horizon, case.scenarios.count
    C = n_contingencies
    base = T * S * (2 * G + W + 5 * E + K + N + (K if variant.pnr else 0))
    commitment = 2 * G * T
    post = C * T * S * (G + W + 3 * E + K + N + (K if variant.cnr else 0))
    return base + commitment + post


def build(case: Case, variant: Variant, contingencies=None, *,
          contingency_limit: str | None = None,
          tie_pnr_across_scenarios: bool | None = None) -> Formulation:
    """Build the frozen MILP for ``variant`` on ``case``.

    ``contingencies`` takes a policy (``"all_lines"``, ``"none"``, list of
    line ids); the default comes from the case options.  The keyword flags
    override the matching case options.
    """
    report = validate_case(case)
    if report.errors:
        raise CaseError(report.errors)
    C = contingency_list(case, contingencies).lines
    limit_mode = contingency_limit or case.options.contingency_limit
    if limit_mode not in ("emergency", "normal"):
        raise ValueError(f"contingency_limit must be 'emergency' or 'normal', got {limit_mode!r}")
    tie = case.options.tie_pnr_across_scenarios if tie_pnr_across_scenarios is None \
        else tie_pnr_across_scenarios
    return _Builder(case, variant, C, limit_mode, bool(tie)).run()


class _Builder:
    def __init__(self, case: Case, variant: Variant, contingencies: list[int],
                 limit_mode: str, tie_pnr: bool):
        self.case = case
        self.variant = variant
        self.C = contingencies
        self.limit_mode = limit_mode
        self.tie_pnr = tie_pnr
        self.model = MILPModel(f"{case.name}-{variant.name}")
        self.index = VariableIndex()
        self.T = range(case.horizon)
        self.S = range(case.scenarios.count)
        self.theta_cap = case.options.theta_cap
        # opening a bridge islands part of the network, so bridges never switch
        self.bridges = set(bridges(case))

    def var(self, family, coords, kind=CONTINUOUS, lower=0.0, upper=float("inf"), origin=None):
        col = self.model.add_variable(variable_name(family, coords), kind, lower, upper, origin)
        self.index.add(family, coords, col)
        return col

    def row(self, terms, sense, rhs, tag):
        return self.model.add_constraint(terms, sense, rhs, tag)

    def c(self, family, *coords):
        return self.index.col(family, *coords)

    def switchable(self, line) -> bool:
        return line.switchable and line.id not in self.bridges

    def post_limit(self, line) -> float:
        return line.limit_emergency if self.limit_mode == "emergency" else line.limit_normal

    # ------------------------------------------------------------------

    def run(self) -> Formulation:
        self.make_variables()
        self.commitment_rows()
        for s in self.S:
            for t in self.T:
                self.base_rows(t, s)
        for c in self.C:
            for s in self.S:
                for t in self.T:
                    self.contingency_rows(c, t, s)
        if self.tie_pnr and self.variant.pnr:
            self.tie_rows()
        self.objective()
        self.model.freeze()
        return Formulation(self.case, self.variant, list(self.C), self.model, self.index)

    def make_variables(self):
        case, inf = self.case, float("inf")
        ref = case.reference_bus
        for g in case.generators:
            for t in self.T:
                self.var("u", (g.id, t), BINARY, 0, 1)
                self.var("v", (g.id, t), BINARY, 0, 1)
        for s in self.S:
            for t in self.T:
                for g in case.generators:
                    self.var("P_g", (g.id, t, s), lower=0.0, upper=g.p_max)
                    self.var("r", (g.id, t, s), lower=0.0, upper=inf)
                for w in case.res_units:
                    cap = case.scenarios.available(w.id, t, s)
                    self.var("P_w", (w.id, t, s), lower=0.0, upper=cap,
                             origin=_tag(11, w=w.id, t=t, s=s))
                for e in case.ess_units:
                    self.var("p_cha", (e.id, t, s))
                    self.var("p_dis", (e.id, t, s))
                    self.var("E", (e.id, t, s), lower=e.soc_min * e.energy_max,
                             upper=e.soc_max * e.energy_max, origin=_tag(17, e=e.id, t=t, s=s))
                    self.var("b_cha", (e.id, t, s), BINARY, 0, 1)
                    self.var("b_dis", (e.id, t, s), BINARY, 0, 1)
                for ln in case.lines:
                    # (20) is the column bound without switching; with it, (23) does the job
                    origin = None if self.variant.pnr else _tag(20, k=ln.id, t=t, s=s)
                    self.var("P_k", (ln.id, t, s), lower=-ln.limit_normal,
                             upper=ln.limit_normal, origin=origin)
                    if self.variant.pnr:
                        fixed = 0.0 if self.switchable(ln) else 1.0
                        self.var("z_pnr", (ln.id, t, s), BINARY, fixed, 1)
                for b in case.buses:
                    cap = 0.0 if b.id == ref else self.theta_cap
                    self.var("theta", (b.id, t, s), lower=-cap, upper=cap)
        for c in self.C:
            for s in self.S:
                for t in self.T:
                    for g in case.generators:
                        self.var("P_g_c", (g.id, c, t, s), lower=0.0, upper=g.p_max)
                    for w in case.res_units:
                        cap = case.scenarios.available(w.id, t, s)
                        self.var("P_w_c", (w.id, c, t, s), lower=0.0, upper=cap,
                                 origin=_tag(30, w=w.id, c=c, t=t, s=s))
                    for e in case.ess_units:
                        self.var("p_cha_c", (e.id, c, t, s))
                        self.var("p_dis_c", (e.id, c, t, s))
                        self.var("E_c", (e.id, c, t, s), lower=e.soc_min * e.energy_max,
                                 upper=e.soc_max * e.energy_max,
                                 origin=_tag(35, e=e.id, c=c, t=t, s=s))
                    for ln in case.lines:
                        lim = self.post_limit(ln)
                        if ln.id == c:
                            # the outaged line carries nothing
                            self.var("P_k_c", (ln.id, c, t, s), lower=0.0, upper=0.0)
                        else:
                            origin = None if self.variant.cnr else \
                                _tag(38, k=ln.id, c=c, t=t, s=s)
                            self.var("P_k_c", (ln.id, c, t, s), lower=-lim, upper=lim,
                                     origin=origin)
                        if self.variant.cnr:
                            if ln.id == c:
                                self.var("z_cnr", (ln.id, c, t, s), BINARY, 0, 0)
                            else:
                                fixed = 0.0 if self.switchable(ln) else 1.0
                                self.var("z_cnr", (ln.id, c, t, s), BINARY, fixed, 1)
                    for b in case.buses:
                        cap = 0.0 if b.id == ref else self.theta_cap
                        self.var("theta_c", (b.id, c, t, s), lower=-cap, upper=cap)

    def commitment_rows(self):
        T = self.case.horizon
        for g in self.case.generators:
            u0 = 1.0 if g.init_on else 0.0
            for t in self.T:
                # (8): the window is truncated at the first period
                first = max(0, t - g.min_up + 1)
                terms = [(self.c("v", g.id, q), 1.0) for q in range(first, t + 1)]
                self.row(terms + [(self.c("u", g.id, t), -1.0)], LE, 0.0, _tag(8, g=g.id, t=t))
            for t in range(0, T - g.min_down):
                terms = [(self.c("v", g.id, q), 1.0) for q in range(t + 1, t + g.min_down + 1)]
                self.row(terms + [(self.c("u", g.id, t), 1.0)], LE, 1.0, _tag(9, g=g.id, t=t))
            for t in self.T:
                terms = [(self.c("v", g.id, t), 1.0), (self.c("u", g.id, t), -1.0)]
                if t > 0:
                    self.row(terms + [(self.c("u", g.id, t - 1), 1.0)], GE, 0.0,
                             _tag(10, g=g.id, t=t))
                else:
                    self.row(terms, GE, -u0, _tag(10, g=g.id, t=t))

    def base_rows(self, t: int, s: int):
        case, c = self.case, self.c
        dT = case.period_length
        gens = case.generators
        for g in gens:
            P, r, u, v = c("P_g", g.id, t, s), c("r", g.id, t, s), c("u", g.id, t), c("v", g.id, t)
            k = dict(g=g.id, t=t, s=s)
            self.row([(P, 1.0), (u, -g.p_min)], GE, 0.0, _tag(2, **k))
            self.row([(P, 1.0), (r, 1.0), (u, -g.p_max)], LE, 0.0, _tag(3, **k))
            self.row([(r, 1.0), (u, -g.ramp_10)], LE, 0.0, _tag(4, **k))
            terms = [(c("r", q.id, t, s), 1.0) for q in gens] + [(P, -1.0), (r, -1.0)]
            self.row(terms, GE, 0.0, _tag(5, **k))
            u0 = 1.0 if g.init_on else 0.0
            if t > 0:
                Pp, up = c("P_g", g.id, t - 1, s), c("u", g.id, t - 1)
                self.row([(P, 1.0), (Pp, -1.0), (up, -g.ramp_hr), (v, -g.ramp_su)], LE, 0.0,
                         _tag(6, **k))
                self.row([(Pp, 1.0), (P, -1.0), (u, g.ramp_sd - g.ramp_hr), (v, -g.ramp_sd),
                          (up, -g.ramp_sd)], LE, 0.0, _tag(7, **k))
            else:
                self.row([(P, 1.0), (v, -g.ramp_su)], LE, g.init_power + g.ramp_hr * u0,
                         _tag(6, **k))
                self.row([(P, -1.0), (u, g.ramp_sd - g.ramp_hr), (v, -g.ramp_sd)], LE,
                         -g.init_power + g.ramp_sd * u0, _tag(7, **k))
        for e in case.ess_units:
            k = dict(e=e.id, t=t, s=s)
            ch, dis, E = c("p_cha", e.id, t, s), c("p_dis", e.id, t, s), c("E", e.id, t, s)
            bc, bd = c("b_cha", e.id, t, s), c("b_dis", e.id, t, s)
            self.row([(bc, 1.0), (bd, 1.0)], LE, 1.0, _tag(12, **k))
            self.row([(ch, 1.0), (bc, -e.p_max_charge)], LE, 0.0, _tag(13, **k))
            self.row([(dis, 1.0), (bd, -e.p_max_discharge)], LE, 0.0, _tag(15, **k))
            for eq, col, fam, rate in ((14, ch, "p_cha", e.ramp_charge),
                                       (16, dis, "p_dis", e.ramp_discharge)):
                terms = [(col, dT)]
                if t > 0:
                    terms.append((c(fam, e.id, t - 1, s), -dT))
                self.row(terms, GE, -rate, _tag(eq, **k, side="lo"))
                self.row(terms, LE, rate, _tag(eq, **k, side="hi"))
            terms = [(E, 1.0), (ch, -e.eff_charge), (dis, 1.0 / e.eff_discharge)]
            if t > 0:
                self.row(terms + [(c("E", e.id, t - 1, s), -1.0)], EQ, 0.0, _tag(18, **k))
            else:
                self.row(terms, EQ, e.init_energy, _tag(18, **k))
        self._network_rows(t, s, None)

    def contingency_rows(self, cl: int, t: int, s: int):
        case, c = self.case, self.c
        dT = case.period_length
        for g in case.generators:
            k = dict(g=g.id, c=cl, t=t, s=s)
            P, Pc, u = c("P_g", g.id, t, s), c("P_g_c", g.id, cl, t, s), c("u", g.id, t)
            self.row([(P, 1.0), (Pc, -1.0), (u, -g.ramp_10)], LE, 0.0, _tag(26, **k))
            self.row([(Pc, 1.0), (P, -1.0), (u, -g.ramp_10)], LE, 0.0, _tag(27, **k))
            self.row([(Pc, 1.0), (u, -g.p_min)], GE, 0.0, _tag(28, **k))
            self.row([(Pc, 1.0), (u, -g.p_max)], LE, 0.0, _tag(29, **k))
        for e in case.ess_units:
            k = dict(e=e.id, c=cl, t=t, s=s)
            ch, dis, E = c("p_cha", e.id, t, s), c("p_dis", e.id, t, s), c("E", e.id, t, s)
            chc, disc = c("p_cha_c", e.id, cl, t, s), c("p_dis_c", e.id, cl, t, s)
            Ec = c("E_c", e.id, cl, t, s)
            self.row([(chc, 1.0), (c("b_cha", e.id, t, s), -e.p_max_charge)], LE, 0.0,
                     _tag(31, **k))
            self.row([(disc, 1.0), (c("b_dis", e.id, t, s), -e.p_max_discharge)], LE, 0.0,
                     _tag(33, **k))
            for eq, post, base, rate in ((32, chc, ch, e.ramp_charge),
                                         (34, disc, dis, e.ramp_discharge)):
                terms = [(post, dT), (base, -dT)]
                self.row(terms, GE, -rate, _tag(eq, **k, side="lo"))
                self.row(terms, LE, rate, _tag(eq, **k, side="hi"))
            self.row([(Ec, 1.0), (E, -1.0), (chc, -e.eff_charge), (disc, 1.0 / e.eff_discharge)],
                     EQ, 0.0, _tag(36, **k))
        self._network_rows(t, s, cl)

    def _network_rows(self, t: int, s: int, cl: int | None):
        """Flow definitions, switching rows and nodal balance, base case or one outage."""
        case, c = self.case, self.c
        base = case.base_mva
        post = cl is not None
        switching = self.variant.cnr if post else self.variant.pnr
        if post:
            ctx = dict(c=cl, t=t, s=s)
            flow = lambda k: c("P_k_c", k, cl, t, s)  # noqa: E731
            angle = lambda n: c("theta_c", n, cl, t, s)  # noqa: E731
            status = lambda k: c("z_cnr", k, cl, t, s)  # noqa: E731
            gen = lambda g: c("P_g_c", g, cl, t, s)  # noqa: E731
            res = lambda w: c("P_w_c", w, cl, t, s)  # noqa: E731
            cha = lambda e: c("p_cha_c", e, cl, t, s)  # noqa: E731
            dis = lambda e: c("p_dis_c", e, cl, t, s)  # noqa: E731
            eq_def, eq_lo, eq_hi, eq_cap, eq_card, eq_bal = 37, 39, 40, 41, 42, 43
        else:
            ctx = dict(t=t, s=s)
            flow = lambda k: c("P_k", k, t, s)  # noqa: E731
            angle = lambda n: c("theta", n, t, s)  # noqa: E731
            status = lambda k: c("z_pnr", k, t, s)  # noqa: E731
            gen = lambda g: c("P_g", g, t, s)  # noqa: E731
            res = lambda w: c("P_w", w, t, s)  # noqa: E731
            cha = lambda e: c("p_cha", e, t, s)  # noqa: E731
            dis = lambda e: c("p_dis", e, t, s)  # noqa: E731
            eq_def, eq_lo, eq_hi, eq_cap, eq_card, eq_bal = 19, 21, 22, 23, 24, 25

        live = [ln for ln in case.lines if ln.id != cl]
        for ln in live:
            B = base * ln.susceptance
            k = dict(k=ln.id, **ctx)
            definition = [(flow(ln.id), 1.0), (angle(ln.from_bus), -B), (angle(ln.to_bus), B)]
            if not switching:
                self.row(definition, EQ, 0.0, _tag(eq_def, **k))
                continue
            limit = self.post_limit(ln) if post else ln.limit_normal
            M = base * big_m_value(case, ln, limit)
            z = status(ln.id)
            self.row(definition + [(z, -M)], GE, -M, _tag(eq_lo, **k))
            self.row(definition + [(z, M)], LE, M, _tag(eq_hi, **k))
            self.row([(flow(ln.id), 1.0), (z, limit)], GE, 0.0, _tag(eq_cap, **k, side="lo"))
            self.row([(flow(ln.id), 1.0), (z, -limit)], LE, 0.0, _tag(eq_cap, **k, side="hi"))
        if switching:
            # (24)/(42) sum over lines, so they hold per (t, s) and per (c, t, s);
            # the outaged line is not part of the corrective budget
            self.row([(status(ln.id), -1.0) for ln in live], LE, 1.0 - len(live),
                     _tag(eq_card, **ctx))

        for b in case.buses:
            terms = [(gen(g.id), 1.0) for g in case.generators if g.bus == b.id]
            terms += [(flow(ln.id), 1.0) for ln in live if ln.to_bus == b.id]
            terms += [(flow(ln.id), -1.0) for ln in live if ln.from_bus == b.id]
            terms += [(res(w.id), 1.0) for w in case.res_units if w.bus == b.id]
            for e in case.ess_units:
                if e.bus == b.id:
                    terms += [(cha(e.id), -1.0), (dis(e.id), 1.0)]
            self.row(terms, EQ, b.demand[t], _tag(eq_bal, n=b.id, **ctx))

    def tie_rows(self):
        for ln in self.case.lines:
            for t in self.T:
                first = self.c("z_pnr", ln.id, t, 0)
                for s in list(self.S)[1:]:
                    self.row([(self.c("z_pnr", ln.id, t, s), 1.0), (first, -1.0)], EQ, 0.0,
                             f"tiepnr/k={ln.id}/t={t}/s={s}")

    def objective(self):
        case, c = self.case, self.c
        probs = case.scenarios.probabilities
        terms = []
        for g in case.generators:
            for t in self.T:
                terms.append((c("u", g.id, t), g.cost_no_load))
                terms.append((c("v", g.id, t), g.cost_startup))
                for s in self.S:
                    terms.append((c("P_g", g.id, t, s), probs[s] * g.cost))
        self.model.set_objective(terms)


def pin_topology(formulation: Formulation, assignments) -> MILPModel:
    """Frozen copy of the model with the named binary columns fixed.

    ``assignments`` maps ``(family, coords)`` to 0 or 1, e.g.
    ``{("z_cnr", (2, 3, 0, 0)): 0}``.
    """
    model, index = formulation.model, formulation.index
    changes = {}
    for (family, coords), value in assignments.items():
        col = index.get(family, *coords)
        if col is None:
            raise KeyError(f"no column for {family} at {coords}")
        if model.variable(col).kind != BINARY:
            raise ValueError(f"{model.variable(col).name} is not binary")
        if value not in (0, 1):
            raise ValueError(f"pin value must be 0 or 1, got {value!r}")
        changes[col] = (float(value), float(value))
    return model.with_bounds(changes)


def pin_all(formulation: Formulation, family: str, value: int) -> MILPModel:
    """Pin every free column of a switching family, e.g. all ``z_pnr`` closed.

    Columns already fixed by construction (the outaged line, lines that
    may not switch) keep their values.
    """
    model = formulation.model
    cols = {coords: col for coords, col in formulation.index.family(family).items()
            if not model.variable(col).is_fixed}
    return pin_topology(formulation, {(family, coords): value for coords in cols})


def scenario_product(formulation: Formulation):
    """All ``(t, s)`` pairs in canonical order."""
    return itertools.product(range(formulation.case.horizon),
                             range(formulation.case.scenarios.count))
