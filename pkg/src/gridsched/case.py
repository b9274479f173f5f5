"""Power-system case data: component types, case files, validation.

A case file is a YAML document (``format_version: 1``) with sections
``buses``, ``lines``, ``generators``, ``ess``, ``res``, ``scenarios`` and
``options``.  Quantities are MW, MWh and hours; susceptances are per unit
on ``base_mva``.  Scenario capacities are either embedded or read from a
CSV with header ``scenario,unit,period,capacity_mw`` next to the case file.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import MISSING, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

FORMAT_VERSION = 1
PROBABILITY_TOL = 1e-9


class CaseError(ValueError):
    """A case file that fails to parse or validate; ``errors`` lists every defect."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid case")


@dataclass(frozen=True)
class Bus:
    id: int
    demand: tuple[float, ...]


@dataclass(frozen=True)
class Line:
    id: int
    from_bus: int
    to_bus: int
    susceptance: float
    limit_normal: float
    limit_emergency: float
    switchable: bool = True
    outage_candidate: bool = True


@dataclass(frozen=True)
class Generator:
    id: int
    bus: int
    p_min: float
    p_max: float
    cost: float
    cost_no_load: float
    cost_startup: float
    ramp_hr: float
    ramp_10: float
    ramp_su: float
    ramp_sd: float
    min_up: int = 1
    min_down: int = 1
    init_on: bool = False
    init_power: float = 0.0


@dataclass(frozen=True)
class ESSUnit:
    id: int
    bus: int
    p_max_charge: float
    p_max_discharge: float
    ramp_charge: float
    ramp_discharge: float
    soc_min: float
    soc_max: float
    energy_max: float
    eff_charge: float
    eff_discharge: float
    init_energy: float


@dataclass(frozen=True)
class RESUnit:
    id: int
    bus: int


@dataclass
class ScenarioSet:
    """Equal-length scenarios of RES capacity.

    ``capacity[s, i, t]`` is the available MW of the ``i``-th unit in
    ``units`` during period ``t`` of scenario ``s``.
    """
    probabilities: np.ndarray
    units: tuple[int, ...]
    capacity: np.ndarray

    @property
    def count(self) -> int:
        return len(self.probabilities)

    def available(self, unit: int, t: int, s: int) -> float:
        return float(self.capacity[s, self.units.index(unit), t])

    def __eq__(self, other):
        return (isinstance(other, ScenarioSet) and self.units == other.units
                and np.array_equal(self.probabilities, other.probabilities)
                and np.array_equal(self.capacity, other.capacity))


@dataclass
class Options:
    contingencies: object = "all_lines"
    contingency_limit: str = "emergency"
    tie_pnr_across_scenarios: bool = False
    theta_cap: float = 0.6


@dataclass
class Case:
    name: str
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]
    generators: tuple[Generator, ...]
    ess_units: tuple[ESSUnit, ...]
    res_units: tuple[RESUnit, ...]
    scenarios: ScenarioSet
    horizon: int
    period_length: float = 1.0
    base_mva: float = 100.0
    reference_bus: int | None = None
    options: Options = field(default_factory=Options)
    header: str = ""
    scenario_csv: str | None = None

    # lookups ------------------------------------------------------------

    def bus(self, bus_id: int) -> Bus:
        return _find(self.buses, bus_id, "bus")

    def line(self, line_id: int) -> Line:
        return _find(self.lines, line_id, "line")

    def generator(self, gen_id: int) -> Generator:
        return _find(self.generators, gen_id, "generator")

    def ess(self, ess_id: int) -> ESSUnit:
        return _find(self.ess_units, ess_id, "ess unit")

    @property
    def periods(self) -> range:
        return range(self.horizon)

    def demand(self, bus_id: int, t: int) -> float:
        return self.bus(bus_id).demand[t]

    def total_demand(self) -> np.ndarray:
        return np.sum([b.demand[:self.horizon] for b in self.buses], axis=0)

    def fingerprint(self) -> str:
        return hashlib.sha256(dump_case(self, embed_scenarios=True).encode()).hexdigest()[:16]

    def restricted(self, horizon: int | None = None,
                   scenarios: list[int] | None = None) -> "Case":
        """Copy keeping the first ``horizon`` periods and the listed scenarios.

        Scenario probabilities are renormalized over the kept subset.
        """
        T = self.horizon if horizon is None else horizon
        if not 1 <= T <= self.horizon:
            raise ValueError(f"horizon {T} outside 1..{self.horizon}")
        keep = list(range(self.scenarios.count)) if scenarios is None else list(scenarios)
        probs = self.scenarios.probabilities[keep]
        scen = ScenarioSet(probs / probs.sum(), self.scenarios.units,
                           self.scenarios.capacity[keep][:, :, :T].copy())
        buses = tuple(replace(b, demand=b.demand[:T]) for b in self.buses)
        return replace(self, buses=buses, scenarios=scen, horizon=T, scenario_csv=None)


def _find(items, key, what):
    for item in items:
        if item.id == key:
            return item
    raise KeyError(f"no {what} with id {key}")


# parsing --------------------------------------------------------------------

_LINE_KEYS = {"id": "id", "from": "from_bus", "to": "to_bus", "b": "susceptance",
              "limit": "limit_normal", "emergency": "limit_emergency",
              "switchable": "switchable", "outage": "outage_candidate"}
_GEN_KEYS = {"id": "id", "bus": "bus", "pmin": "p_min", "pmax": "p_max", "cost": "cost",
             "no_load": "cost_no_load", "startup": "cost_startup", "ramp_hr": "ramp_hr",
             "ramp_10": "ramp_10", "ramp_su": "ramp_su", "ramp_sd": "ramp_sd",
             "min_up": "min_up", "min_down": "min_down", "init_on": "init_on",
             "init_power": "init_power"}
_ESS_KEYS = {"id": "id", "bus": "bus", "p_charge": "p_max_charge",
             "p_discharge": "p_max_discharge", "ramp_charge": "ramp_charge",
             "ramp_discharge": "ramp_discharge", "soc_min": "soc_min", "soc_max": "soc_max",
             "energy": "energy_max", "eff_charge": "eff_charge",
             "eff_discharge": "eff_discharge", "init_energy": "init_energy"}


def _build(cls, keymap, raw, where, errors, defaults=None):
    if not isinstance(raw, dict):
        errors.append(f"{where}: expected a mapping")
        return None
    kwargs = dict(defaults or {})
    unknown = set(raw) - set(keymap)
    if unknown:
        errors.append(f"{where}: unknown keys {sorted(unknown)}")
    for key, attr in keymap.items():
        if key in raw:
            kwargs[attr] = raw[key]
    required = {f.name for f in fields(cls)
                if f.default is MISSING and f.default_factory is MISSING}
    missing = [k for k, a in keymap.items() if a in required and a not in kwargs]
    if missing:
        errors.append(f"{where}: missing {missing}")
        return None
    try:
        return cls(**{k: _coerce(cls, k, v) for k, v in kwargs.items()})
    except (TypeError, ValueError) as exc:
        errors.append(f"{where}: {exc}")
        return None


def _coerce(cls, attr, value):
    ftype = {f.name: f.type for f in fields(cls)}[attr]
    if ftype == "int":
        if isinstance(value, bool) or float(value) != int(value):
            raise ValueError(f"{attr} must be an integer, got {value!r}")
        return int(value)
    if ftype == "float":
        if isinstance(value, bool):
            raise ValueError(f"{attr} must be a number, got {value!r}")
        return float(value)
    if ftype == "bool":
        if not isinstance(value, bool):
            raise ValueError(f"{attr} must be true/false, got {value!r}")
        return value
    return value


def _header_of(text: str) -> str:
    lines = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        lines.append(line[1:].strip())
    return "\n".join(lines)


def parse_case(text: str, base_dir: Path | None = None) -> Case:
    """Parse case text without semantic validation; raises :class:`CaseError`."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CaseError([f"parse error: {exc}"]) from None
    if not isinstance(doc, dict):
        raise CaseError(["parse error: top level must be a mapping"])
    errors: list[str] = []
    if doc.get("format_version") != FORMAT_VERSION:
        errors.append(f"format_version must be {FORMAT_VERSION}")
    horizon = doc.get("horizon")
    if not isinstance(horizon, int) or horizon < 1:
        errors.append("horizon must be a positive integer")
        horizon = 0

    buses = []
    for i, raw in enumerate(doc.get("buses") or []):
        try:
            demand = tuple(float(d) for d in raw.get("demand", [0.0] * horizon))
            buses.append(Bus(int(raw["id"]), demand))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            errors.append(f"buses[{i}]: {exc!r}")
    lines = [_build(Line, _LINE_KEYS, raw, f"lines[{i}]", errors)
             for i, raw in enumerate(doc.get("lines") or [])]
    gens = [_build(Generator, _GEN_KEYS, raw, f"generators[{i}]", errors)
            for i, raw in enumerate(doc.get("generators") or [])]
    ess = [_build(ESSUnit, _ESS_KEYS, raw, f"ess[{i}]", errors)
           for i, raw in enumerate(doc.get("ess") or [])]
    res = [_build(RESUnit, {"id": "id", "bus": "bus"}, raw, f"res[{i}]", errors)
           for i, raw in enumerate(doc.get("res") or [])]

    opts_raw = doc.get("options") or {}
    options = Options()
    for key, value in opts_raw.items():
        if not hasattr(options, key):
            errors.append(f"options: unknown key {key!r}")
        else:
            setattr(options, key, value)

    scen_raw = doc.get("scenarios") or {}
    res_ids = tuple(r.id for r in res if r is not None)
    scenarios, csv_name = _parse_scenarios(scen_raw, res_ids, horizon, base_dir, errors)

    if errors:
        raise CaseError(errors)
    return Case(
        name=str(doc.get("name", "case")),
        buses=tuple(buses), lines=tuple(lines), generators=tuple(gens),
        ess_units=tuple(ess), res_units=tuple(res), scenarios=scenarios,
        horizon=horizon, period_length=float(doc.get("period_length", 1.0)),
        base_mva=float(doc.get("base_mva", 100.0)),
        reference_bus=doc.get("reference_bus"), options=options,
        header=_header_of(text), scenario_csv=csv_name,
    )


def _parse_scenarios(raw, res_ids, horizon, base_dir, errors):
    probs = np.asarray(raw.get("probabilities", [1.0]), dtype=float)
    S, W = len(probs), len(res_ids)
    cap = np.zeros((S, W, horizon))
    csv_name = raw.get("csv")
    if csv_name is not None:
        path = Path(csv_name) if base_dir is None else Path(base_dir) / csv_name
        try:
            rows = read_scenario_csv(path.read_text())
        except (OSError, ValueError) as exc:
            errors.append(f"scenarios: cannot read {csv_name}: {exc}")
            rows = []
        for s, unit, t, mw in rows:
            if not (0 <= s < S) or unit not in res_ids or not (0 <= t < horizon):
                errors.append(f"scenarios csv: row ({s}, {unit}, {t}) out of range")
                continue
            cap[s, res_ids.index(unit), t] = mw
    else:
        for s, per_unit in enumerate(raw.get("capacity") or []):
            if s >= S:
                errors.append("scenarios: more capacity blocks than probabilities")
                break
            for unit, values in (per_unit or {}).items():
                if int(unit) not in res_ids:
                    errors.append(f"scenarios: unknown RES unit {unit}")
                    continue
                values = list(values)
                if len(values) != horizon:
                    errors.append(f"scenarios[{s}] unit {unit}: {len(values)} values, "
                                  f"expected {horizon}")
                    continue
                cap[s, res_ids.index(int(unit))] = values
    return ScenarioSet(probs, res_ids, cap), csv_name


def read_scenario_csv(text: str) -> list[tuple[int, int, int, float]]:
    reader = csv.DictReader(io.StringIO(text))
    expected = ["scenario", "unit", "period", "capacity_mw"]
    if reader.fieldnames != expected:
        raise ValueError(f"header must be {','.join(expected)}")
    return [(int(r["scenario"]), int(r["unit"]), int(r["period"]), float(r["capacity_mw"]))
            for r in reader]


def scenario_csv(scenarios: ScenarioSet) -> str:
    out = io.StringIO()
    out.write("scenario,unit,period,capacity_mw\n")
    S, W, T = scenarios.capacity.shape
    for s in range(S):
        for i, unit in enumerate(scenarios.units):
            for t in range(T):
                out.write(f"{s},{unit},{t},{float(scenarios.capacity[s, i, t])!r}\n")
    return out.getvalue()


# serialization --------------------------------------------------------------

def _plain(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _record(obj, keymap) -> dict:
    return {key: _plain(getattr(obj, attr)) for key, attr in keymap.items()}


class _FlowList(list):
    pass


class _FlowDict(dict):
    pass


class _Dumper(yaml.SafeDumper):
    pass


_Dumper.add_representer(_FlowList, lambda d, v: d.represent_sequence(
    "tag:yaml.org,2002:seq", v, flow_style=True))
_Dumper.add_representer(_FlowDict, lambda d, v: d.represent_mapping(
    "tag:yaml.org,2002:map", v.items(), flow_style=True))


def dump_case(case: Case, embed_scenarios: bool = False) -> str:
    """Case file text; scenarios go to ``case.scenario_csv`` unless embedded."""
    doc = {
        "format_version": FORMAT_VERSION,
        "name": case.name,
        "base_mva": case.base_mva,
        "horizon": case.horizon,
        "period_length": case.period_length,
        "reference_bus": case.reference_bus,
        "options": {
            "contingencies": case.options.contingencies,
            "contingency_limit": case.options.contingency_limit,
            "tie_pnr_across_scenarios": case.options.tie_pnr_across_scenarios,
            "theta_cap": case.options.theta_cap,
        },
        "buses": [_FlowDict(id=b.id, demand=_FlowList(_plain(d) for d in b.demand))
                  for b in case.buses],
        "lines": [_FlowDict(_record(l, _LINE_KEYS)) for l in case.lines],
        "generators": [_FlowDict(_record(g, _GEN_KEYS)) for g in case.generators],
        "ess": [_FlowDict(_record(e, _ESS_KEYS)) for e in case.ess_units],
        "res": [_FlowDict(id=r.id, bus=r.bus) for r in case.res_units],
    }
    scen = {"probabilities": _FlowList(float(p) for p in case.scenarios.probabilities)}
    if case.scenario_csv and not embed_scenarios:
        scen["csv"] = case.scenario_csv
    else:
        scen["capacity"] = [
            {unit: _FlowList(float(v) for v in case.scenarios.capacity[s, i])
             for i, unit in enumerate(case.scenarios.units)}
            for s in range(case.scenarios.count)
        ]
    doc["scenarios"] = scen
    if isinstance(case.options.contingencies, list):
        doc["options"]["contingencies"] = _FlowList(case.options.contingencies)
    header = "".join(f"# {line}\n".replace("# \n", "#\n") for line in case.header.splitlines())
    return header + yaml.dump(doc, Dumper=_Dumper, sort_keys=False, width=100)


def save_case(case: Case, path: Path) -> None:
    path = Path(path)
    path.write_text(dump_case(case))
    if case.scenario_csv:
        (path.parent / case.scenario_csv).write_text(scenario_csv(case.scenarios))


def load_case(source, base_dir: Path | None = None) -> Case:
    """Parse and validate a case from text or a path.

    Raises :class:`CaseError` carrying every defect found, not just the first.
    """
    if isinstance(source, Path):
        base_dir = source.parent if base_dir is None else base_dir
        text = source.read_text()
    else:
        text = source
    case = parse_case(text, base_dir)
    report = validate_case(case)
    if report.errors:
        raise CaseError(report.errors)
    return case


# validation -----------------------------------------------------------------

@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    totals: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def render(self) -> str:
        lines = [f"{'PASS' if self.ok else 'FAIL'}"]
        lines += [f"  {k}: {v:,.2f}" for k, v in self.totals.items()]
        lines += [f"  error: {e}" for e in self.errors]
        lines += [f"  warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def validate_case(case: Case) -> ValidationReport:
    """Check every structural and physical invariant; defects are returned, not raised."""
    from .network import is_connected

    rep = ValidationReport()
    err = rep.errors.append
    bus_ids = [b.id for b in case.buses]
    known = set(bus_ids)
    T = case.horizon

    for kind, items in (("bus", case.buses), ("line", case.lines), ("generator", case.generators),
                        ("ess", case.ess_units), ("res", case.res_units)):
        ids = [x.id for x in items]
        if len(ids) != len(set(ids)):
            err(f"duplicate {kind} ids")
    if not case.buses:
        err("case has no buses")
    for b in case.buses:
        if len(b.demand) != T:
            err(f"bus {b.id}: demand has {len(b.demand)} periods, expected {T}")
        if any(d < 0 for d in b.demand):
            err(f"bus {b.id}: negative demand")
    for ln in case.lines:
        if ln.from_bus not in known or ln.to_bus not in known:
            err(f"line {ln.id}: dangling bus reference")
        if ln.from_bus == ln.to_bus:
            err(f"line {ln.id}: from and to bus are both {ln.from_bus}")
        if not ln.limit_normal > 0:
            err(f"line {ln.id}: normal limit must be positive")
        if ln.limit_emergency < ln.limit_normal:
            err(f"line {ln.id}: emergency limit below normal limit")
    for g in case.generators:
        if g.bus not in known:
            err(f"generator {g.id}: dangling bus reference {g.bus}")
        if not 0 <= g.p_min <= g.p_max:
            err(f"generator {g.id}: need 0 <= p_min <= p_max")
        if min(g.ramp_hr, g.ramp_10, g.ramp_su, g.ramp_sd) < 0:
            err(f"generator {g.id}: negative ramp rate")
        if g.min_up < 1 or g.min_down < 1:
            err(f"generator {g.id}: minimum up/down times must be >= 1")
        if not g.init_on and g.init_power != 0:
            err(f"generator {g.id}: offline unit with nonzero initial power")
    for e in case.ess_units:
        if e.bus not in known:
            err(f"ess {e.id}: dangling bus reference {e.bus}")
        if e.soc_min > e.soc_max:
            err(f"ess {e.id}: soc bounds inverted")
        elif not 0 <= e.soc_min <= e.soc_max <= 1:
            err(f"ess {e.id}: soc bounds outside [0, 1]")
        if not (0 < e.eff_charge <= 1 and 0 < e.eff_discharge <= 1):
            err(f"ess {e.id}: efficiencies must lie in (0, 1]")
        lo, hi = e.soc_min * e.energy_max, e.soc_max * e.energy_max
        if e.soc_min <= e.soc_max and not lo - 1e-9 <= e.init_energy <= hi + 1e-9:
            err(f"ess {e.id}: initial energy outside the soc window")
        if min(e.p_max_charge, e.p_max_discharge, e.ramp_charge, e.ramp_discharge,
               e.energy_max) < 0:
            err(f"ess {e.id}: negative rating")
    for r in case.res_units:
        if r.bus not in known:
            err(f"res {r.id}: dangling bus reference {r.bus}")

    scen = case.scenarios
    if scen.count == 0:
        err("scenario set is empty")
    elif abs(float(np.sum(scen.probabilities)) - 1.0) > PROBABILITY_TOL:
        err(f"scenario probabilities sum to {float(np.sum(scen.probabilities))!r}, not 1")
    if np.any(scen.probabilities < 0):
        err("negative scenario probability")
    if scen.capacity.shape[1:] != (len(case.res_units), T):
        err("scenario capacity shape does not match RES units and horizon")
    if np.any(scen.capacity < 0):
        err("negative RES capacity")

    if case.reference_bus is None:
        err("no reference bus designated")
    elif case.reference_bus not in known:
        err(f"reference bus {case.reference_bus} does not exist")
    if case.buses and all(ln.from_bus in known and ln.to_bus in known for ln in case.lines):
        if not is_connected(bus_ids, case.lines):
            err("network graph is disconnected")

    if case.options.contingency_limit not in ("emergency", "normal"):
        err("options.contingency_limit must be 'emergency' or 'normal'")
    if not case.options.theta_cap > 0:
        err("options.theta_cap must be positive")

    capacity = sum(g.p_max for g in case.generators)
    peak = float(case.total_demand().max()) if case.buses and T else 0.0
    rep.totals = {"conventional_capacity_mw": capacity, "peak_load_mw": peak}
    if capacity < peak:
        rep.warnings.append(f"conventional capacity {capacity:.1f} MW is below peak load "
                            f"{peak:.1f} MW")
    return rep


def case_from_file(path) -> Case:
    return load_case(Path(path))
